#pragma once

#include <utility>
#include <vector>

#include "prodint/context.hpp"
#include "prodint/curve.hpp"
#include "prodint/estimates.hpp"
#include "prodint/evolve.hpp"
#include "prodint/matrix.hpp"

namespace prodint {

/// Partial exponential-adjoint sum sum_{k=0}^{n} t^k/k! ad_X^k (Y).
Mat lambda_poly(const LieContext& ctx, const Mat& x, int n, double t, const Mat& y);

/// Ad_{evolve(phi)|_r^t}(Y): evolve, then conjugate.
Mat transport_exact(const LieContext& ctx, const Curve& phi, const Mat& y, double t,
                    const StepperConfig& cfg = {});

struct TransportScheme {
  int n = 4;            // uniform subdivisions t_p = r + p/n (r'-r)
  int truncation = -1;  // polynomial degree inside each panel; -1 couples it to n
};

/// Piecewise truncated-exponential transport: panel p applies the partial
/// sum generated by phi(t_p) to the value entering the panel. Endpoint
/// matching across panels is exact by construction.
class PiecewiseTransport {
 public:
  PiecewiseTransport(const LieContext& ctx, const Curve& phi, TransportScheme scheme,
                     const Mat& y);

  int panels() const { return static_cast<int>(nodes_.size()) - 1; }
  int truncation() const { return truncation_; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Value entering panel p (the glued curve at t_p).
  Mat panel_entry(int p) const;

  Mat value(double t) const;
  Mat derivative(double t) const;

  /// d/dt value - [phi(t), value]: the quantity driven to zero as n grows.
  Mat defect(double t) const;

  /// The defect split into its two closed-form contributions: the
  /// frozen-coefficient sum (scaled by phi(t_p) - phi(t)) and the
  /// series-truncation tail.
  std::pair<Mat, Mat> defect_decomposition(double t) const;

  /// The glued transport as a piecewise-C^1 curve (exact derivatives).
  Curve to_piecewise_curve() const;

 private:
  LieContext ctx_;
  Curve phi_;
  int truncation_;
  std::vector<double> nodes_;
  std::vector<Mat> xs_;                // phi at the left node of each panel
  std::vector<std::vector<Mat>> adk_;  // ad_{X_p}^k (Z_p), k = 0..truncation

  int panel_of(double t) const;
};

PiecewiseTransport transport_scheme(const LieContext& ctx, const Curve& phi,
                                    TransportScheme scheme, const Mat& y);

/// Accumulated weighted defect of a piecewise-C^1 curve family against the
/// adjoint equation along phi:
///   AI(t) = sum of integrals of Ad_{[evolve(phi)|_r^s]^{-1}}(alpha'(s) -
///           [phi(s), alpha(s)]) over the panels up to t.
/// alpha must cover phi's interval; piece values must match at the knots.
Curve residual_AI(const LieContext& ctx, const Curve& phi, const Curve& alpha,
                  const StepperConfig& cfg = {});

struct DuhamelResult {
  Mat value;
  int terms_used = 0;
  double remainder_bound = 0.0;
};

/// sum_k t^k/k! ad_X^k(Y), truncated once the majorant
/// w(Y) (|t| C)^k / k! exp(|t| C) drops below tol. Requires a certified
/// constricted witness whose node set contains X.
DuhamelResult duhamel_series(const LieContext& ctx, const SeminormFamily& fam, const Mat& x,
                             const Mat& y, double t, double tol, const EstimateWitness& witness);

/// Finite-difference check of the transport product rule
///   d/dt Ad(psi) = [phi, Ad(psi)] + Ad(psi').
/// Central differences with one Richardson pass; the returned curve lives on
/// the interval shrunk by two stencil widths.
Curve adjoint_ode_defect(const LieContext& ctx, const Curve& phi, const Curve& psi,
                         const StepperConfig& cfg = {}, double fd_step = 1e-4);

}  // namespace prodint
