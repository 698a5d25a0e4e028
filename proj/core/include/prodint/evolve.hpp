#pragma once

#include <optional>
#include <vector>

#include "prodint/context.hpp"
#include "prodint/curve.hpp"
#include "prodint/matrix.hpp"

namespace prodint {

enum class StepMethod {
  ExponentialMidpoint,  // mu <- exp(h phi(mid)) mu, order 2, the default
  CommutatorFree4,      // two-exponential Gauss scheme, order 4
  ReferenceRK4,         // dense classical 4-stage on mu' = phi mu (oracle)
};

struct StepperConfig {
  StepMethod method = StepMethod::ExponentialMidpoint;
  int steps = 256;          // 0 selects adaptive step halving
  double tolerance = 1e-10; // adaptive acceptance threshold
  bool with_oracle_gap = false;  // also run the dense reference at 16x steps
};

struct EvolveReport {
  GroupElement result;
  int steps_used = 0;
  double defect = 0.0;  // sup of ||d(mu_num) - phi|| on a sample grid
  std::optional<double> oracle_gap;
};

/// Dense numerical solution of mu' = phi(t) mu, mu(s) = 1, queryable at any
/// t in [s, t_end] (between grid points one extra stepper step is taken, so
/// interpolation stays on the group).
class Trajectory {
 public:
  Trajectory(const LieContext& ctx, Curve phi, double s, double t_end, StepperConfig cfg);

  double lo() const { return t_.front(); }
  double hi() const { return t_.back(); }
  int steps() const { return static_cast<int>(t_.size()) - 1; }
  const LieContext& context() const { return ctx_; }
  const std::vector<double>& times() const { return t_; }
  const std::vector<Mat>& values() const { return mu_; }

  /// Group element carrying s to t.
  Mat at(double t) const;
  /// Ad along the trajectory: g(t) y g(t)^{-1}.
  Mat ad(double t, const Mat& y) const;
  /// Ad along the inverse: g(t)^{-1} y g(t).
  Mat ad_inv(double t, const Mat& y) const;

 private:
  LieContext ctx_;
  Curve phi_;
  StepMethod method_;
  std::vector<double> t_;
  std::vector<Mat> mu_;
};

/// Product integral of phi over [s, t]. s == t returns the identity. The
/// report's defect samples the log derivative of the numerical trajectory
/// against phi.
EvolveReport evolve(const LieContext& ctx, const Curve& phi, double s, double t,
                    const StepperConfig& cfg = {});

Trajectory evolve_trajectory(const LieContext& ctx, const Curve& phi, double s, double t,
                             const StepperConfig& cfg = {});

/// A differentiable group-valued curve (value and derivatives in the ambient
/// matrix space).
struct GroupCurve {
  double lo;
  double hi;
  int order;
  std::function<Mat(double t, int deriv)> eval;
};

/// Right logarithmic derivative t |-> mu'(t) mu(t)^{-1}.
Curve log_derivative(const LieContext& ctx, const GroupCurve& mu);

/// t |-> -phi(r + r' - t); evolving it inverts the product integral.
Curve inverse_curve(const Curve& phi);

/// t |-> phi(t) + Ad_{evolve(phi)|_r^t}(psi(t)); its product integral equals
/// evolve(phi) * evolve(psi).
Curve combine_product(const LieContext& ctx, const Curve& phi, const Curve& psi,
                      const StepperConfig& cfg = {});

/// t |-> -Ad_{[evolve(phi)|_r^t]^{-1}}(phi(t)); its product integral is the
/// pointwise inverse of evolve(phi).
Curve combine_inverse(const LieContext& ctx, const Curve& phi, const StepperConfig& cfg = {});

/// Telescoped product over a sorted partition of the curve interval.
GroupElement split_evolve(const LieContext& ctx, const Curve& phi,
                          const std::vector<double>& partition, const StepperConfig& cfg = {});

/// rho' . (phi o rho); the reparametrized curve integrates to
/// evolve(phi)|_r^{rho(.)} up to the constant factor at rho(lo).
Curve substitute(const LieContext& ctx, const Curve& phi, const ScalarCurve& rho);

/// Product integral of a piecewise curve up to t: ordered product of the
/// piece integrals. Pieces must cover [lo, t].
GroupElement evolve_piecewise(const LieContext& ctx, const Curve& phi, double t,
                              const StepperConfig& cfg = {});

}  // namespace prodint
