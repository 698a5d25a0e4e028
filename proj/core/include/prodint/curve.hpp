#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "prodint/context.hpp"
#include "prodint/matrix.hpp"
#include "prodint/rng.hpp"

namespace prodint {

/// Proxy order for C^infinity curves (closed-form families whose derivative
/// of every order is available).
inline constexpr int kSmoothOrder = 1 << 20;

/// A matrix-valued map on [lo, hi] with exact derivative evaluation up to a
/// declared order. Interior breakpoints mark piecewise curves; on each closed
/// subinterval between breakpoints eval(.., m) is continuous, and evaluation
/// at a breakpoint takes the right-hand piece (half-open convention, last
/// piece closed).
class Curve {
 public:
  using EvalFn = std::function<Mat(double t, int deriv)>;

  Curve(double lo, double hi, int order, EvalFn eval, std::vector<double> breakpoints = {});

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double length() const { return hi_ - lo_; }
  int order() const { return order_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  Mat operator()(double t) const { return eval(t, 0); }
  Mat eval(double t, int deriv) const;

  /// Knot positions including both endpoints.
  std::vector<double> knots() const;

  bool has_pieces() const { return pieces_ != nullptr; }
  const std::vector<Curve>& pieces() const;

  Curve restricted(double a, double b) const;

  /// Glue pieces end to end. Pieces only need to agree on open subintervals;
  /// with require_continuity the piece values must match at the knots to
  /// 1e-12 (the piecewise-C^1 convention used by the transport residual).
  static Curve piecewise(std::vector<Curve> pieces, bool require_continuity = false);

  static Curve constant(const Mat& value, double lo, double hi);
  /// sum_k coeffs[k] * t^k
  static Curve polynomial(std::vector<Mat> coeffs, double lo, double hi);
  /// amplitude * sin(omega t + phase)
  static Curve sinusoid(const Mat& amplitude, double omega, double phase, double lo, double hi);
  static Curve from_fn(double lo, double hi, int order, EvalFn fn,
                       std::vector<double> breakpoints = {});

  friend Curve operator+(const Curve& a, const Curve& b);
  friend Curve operator*(double scale, const Curve& c);

 private:
  double lo_, hi_;
  int order_;
  EvalFn eval_;
  std::vector<double> breakpoints_;
  std::shared_ptr<const std::vector<Curve>> pieces_;
};

/// Scalar reparametrization rho: [lo, hi] -> R of class C^order.
class ScalarCurve {
 public:
  using EvalFn = std::function<double(double t, int deriv)>;

  ScalarCurve(double lo, double hi, int order, EvalFn eval);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int order() const { return order_; }

  double operator()(double t) const { return eval(t, 0); }
  double eval(double t, int deriv) const;

  static ScalarCurve identity(double lo, double hi);
  /// a + b t
  static ScalarCurve affine(double a, double b, double lo, double hi);
  /// t |-> lo + hi - t
  static ScalarCurve reversal(double lo, double hi);
  /// t^k
  static ScalarCurve monomial(int k, double lo, double hi);

 private:
  double lo_, hi_;
  int order_;
  EvalFn eval_;
};

/// The velocity-weighted pullback rho' . (phi o rho) with exact derivatives
/// (product and chain rule expanded term by term).
Curve reparametrize_velocity(const Curve& phi, const ScalarCurve& rho);

/// Random smooth curve: constant + sinusoid terms with algebra-valued
/// coefficients, sup-norm (order 0) at most norm_bound. With omega_max <= 1
/// all higher derivatives obey the same bound.
Curve random_smooth_curve(Rng& rng, const LieContext& ctx, double lo, double hi,
                          double norm_bound, int trig_terms = 2, double omega_max = 2.5);

/// CLI-facing curve specifications (constant, polynomial, sinusoid, sum,
/// piecewise-constant) as JSON.
Curve curve_from_json(const std::string& text, int dim);
Curve load_curve_file(const std::string& path, int dim);

}  // namespace prodint
