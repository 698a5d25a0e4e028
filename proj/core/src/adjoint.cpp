#include "prodint/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "prodint/errors.hpp"
#include "prodint/lie_ops.hpp"
#include "prodint/quadrature.hpp"

namespace prodint {

Mat lambda_poly(const LieContext& ctx, const Mat& x, int n, double t, const Mat& y) {
  if (n < 0) throw ArgumentError("lambda_poly needs n >= 0");
  (void)ctx;
  Mat acc = y;
  Mat term = y;
  for (int k = 1; k <= n; ++k) {
    term = (t / k) * detail::bracket_raw(x, term);
    acc += term;
  }
  return acc;
}

Mat transport_exact(const LieContext& ctx, const Curve& phi, const Mat& y, double t,
                    const StepperConfig& cfg) {
  if (t == phi.lo()) return y;
  const Mat g = evolve(ctx, phi, phi.lo(), t, cfg).result.matrix;
  return g * y * invert(g);
}

PiecewiseTransport::PiecewiseTransport(const LieContext& ctx, const Curve& phi,
                                       TransportScheme scheme, const Mat& y)
    : ctx_(ctx), phi_(phi) {
  if (scheme.n < 1) throw ArgumentError("transport scheme needs n >= 1");
  truncation_ = scheme.truncation >= 0 ? scheme.truncation : scheme.n;
  const double r = phi.lo(), len = phi.length();
  const int n = scheme.n;
  nodes_.resize(static_cast<size_t>(n) + 1);
  for (int p = 0; p <= n; ++p) nodes_[static_cast<size_t>(p)] = r + len * p / n;

  Mat entry = y;
  for (int p = 0; p < n; ++p) {
    const Mat x = phi_(nodes_[static_cast<size_t>(p)]);
    xs_.push_back(x);
    std::vector<Mat> adk;
    adk.push_back(entry);
    for (int k = 1; k <= truncation_; ++k) adk.push_back(detail::bracket_raw(x, adk.back()));
    adk_.push_back(std::move(adk));
    // value at the right node seeds the next panel
    const double h = nodes_[static_cast<size_t>(p) + 1] - nodes_[static_cast<size_t>(p)];
    Mat next = adk_.back()[0];
    double coeff = 1.0;
    for (int k = 1; k <= truncation_; ++k) {
      coeff *= h / k;
      next += coeff * adk_.back()[static_cast<size_t>(k)];
    }
    entry = next;
  }
}

int PiecewiseTransport::panel_of(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(nodes_.front()) + std::abs(nodes_.back()));
  if (t < nodes_.front() - tol || t > nodes_.back() + tol) {
    throw ArgumentError("transport queried outside its interval");
  }
  t = std::clamp(t, nodes_.front(), nodes_.back());
  int p = static_cast<int>(std::upper_bound(nodes_.begin(), nodes_.end(), t) - nodes_.begin()) - 1;
  return std::clamp(p, 0, panels() - 1);
}

Mat PiecewiseTransport::panel_entry(int p) const {
  if (p < 0 || p >= panels()) throw ArgumentError("panel index out of range");
  return adk_[static_cast<size_t>(p)][0];
}

Mat PiecewiseTransport::value(double t) const {
  const int p = panel_of(t);
  const double dt = t - nodes_[static_cast<size_t>(p)];
  const auto& adk = adk_[static_cast<size_t>(p)];
  Mat acc = adk[0];
  double coeff = 1.0;
  for (int k = 1; k <= truncation_; ++k) {
    coeff *= dt / k;
    acc += coeff * adk[static_cast<size_t>(k)];
  }
  return acc;
}

Mat PiecewiseTransport::derivative(double t) const {
  const int p = panel_of(t);
  const double dt = t - nodes_[static_cast<size_t>(p)];
  const auto& adk = adk_[static_cast<size_t>(p)];
  Mat acc = Mat::Zero(ctx_.dim(), ctx_.dim());
  double coeff = 1.0;  // dt^{k-1} / (k-1)!
  for (int k = 1; k <= truncation_; ++k) {
    acc += coeff * adk[static_cast<size_t>(k)];
    coeff *= dt / k;
  }
  return acc;
}

Mat PiecewiseTransport::defect(double t) const {
  return derivative(t) - detail::bracket_raw(phi_(t), value(t));
}

std::pair<Mat, Mat> PiecewiseTransport::defect_decomposition(double t) const {
  const int p = panel_of(t);
  const double dt = t - nodes_[static_cast<size_t>(p)];
  const auto& adk = adk_[static_cast<size_t>(p)];
  const Mat frozen_minus_current = xs_[static_cast<size_t>(p)] - phi_(t);
  Mat head = Mat::Zero(ctx_.dim(), ctx_.dim());
  double coeff = 1.0;
  for (int k = 0; k < truncation_; ++k) {
    if (k > 0) coeff *= dt / k;
    head += coeff * detail::bracket_raw(frozen_minus_current, adk[static_cast<size_t>(k)]);
  }
  coeff *= truncation_ > 0 ? dt / truncation_ : 1.0;
  Mat tail = -coeff * detail::bracket_raw(phi_(t), adk[static_cast<size_t>(truncation_)]);
  return {head, tail};
}

Curve PiecewiseTransport::to_piecewise_curve() const {
  std::vector<Curve> pieces;
  for (int p = 0; p < panels(); ++p) {
    const double a = nodes_[static_cast<size_t>(p)], b = nodes_[static_cast<size_t>(p) + 1];
    auto adk = std::make_shared<const std::vector<Mat>>(adk_[static_cast<size_t>(p)]);
    const int trunc = truncation_;
    const int d = ctx_.dim();
    pieces.push_back(Curve(a, b, kSmoothOrder, [adk, trunc, a, d](double t, int m) -> Mat {
      const double dt = t - a;
      Mat acc = Mat::Zero(d, d);
      // m-th derivative of sum dt^k/k! adk[k]
      double coeff = 1.0;  // dt^{k-m} / (k-m)!
      for (int k = m; k <= trunc; ++k) {
        if (k > m) coeff *= dt / (k - m);
        acc += coeff * (*adk)[static_cast<size_t>(k)];
      }
      return acc;
    }));
  }
  return Curve::piecewise(std::move(pieces), /*require_continuity=*/true);
}

PiecewiseTransport transport_scheme(const LieContext& ctx, const Curve& phi,
                                    TransportScheme scheme, const Mat& y) {
  return PiecewiseTransport(ctx, phi, scheme, y);
}

Curve residual_AI(const LieContext& ctx, const Curve& phi, const Curve& alpha,
                  const StepperConfig& cfg) {
  if (std::abs(alpha.lo() - phi.lo()) > 1e-12 || std::abs(alpha.hi() - phi.hi()) > 1e-12) {
    throw ArgumentError("residual_AI needs alpha on the curve interval");
  }
  if (alpha.order() < 1) throw ArgumentError("residual_AI needs a piecewise-C^1 alpha");
  // Knots of alpha; pieces must match at them (checked when alpha was glued
  // with continuity; re-check here for curves assembled elsewhere).
  std::vector<double> knots = alpha.knots();
  for (size_t i = 1; i + 1 < knots.size(); ++i) {
    const double k = knots[i];
    const double eps = 1e-9 * alpha.length();
    const Mat left = alpha(k - eps), right = alpha(k + eps);
    if (max_norm(left - right) > 1e-6 * std::max(1.0, max_norm(left))) {
      throw ArgumentError("alpha pieces do not match at knot " + std::to_string(k));
    }
  }

  auto traj = std::make_shared<Trajectory>(ctx, phi, phi.lo(), phi.hi(), cfg);
  Curve phi_copy = phi, alpha_copy = alpha;
  auto integrand = [traj, phi_copy, alpha_copy](double s) -> Mat {
    return traj->ad_inv(s, alpha_copy.eval(s, 1) -
                               detail::bracket_raw(phi_copy(s), alpha_copy(s)));
  };

  // Prefix sums over full panels, then a partial panel integral per query.
  const int d = ctx.dim();
  auto prefixes = std::make_shared<std::vector<Mat>>();
  prefixes->push_back(Mat::Zero(d, d));
  QuadratureOptions qopts;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    Curve seg(knots[i], knots[i + 1], 0, [integrand](double s, int) { return integrand(s); });
    prefixes->push_back(prefixes->back() + riemann_integral(seg, qopts));
  }

  auto knots_shared = std::make_shared<std::vector<double>>(knots);
  return Curve(alpha.lo(), alpha.hi(), 0,
               [integrand, prefixes, knots_shared, d](double t, int) -> Mat {
                 const auto& ks = *knots_shared;
                 size_t p = 0;
                 while (p + 2 < ks.size() && t >= ks[p + 1]) ++p;
                 Mat acc = (*prefixes)[p];
                 if (t > ks[p]) {
                   Curve seg(ks[p], std::max(t, ks[p] + 1e-15), 0,
                             [integrand](double s, int) { return integrand(s); });
                   acc += riemann_integral(seg, QuadratureOptions{});
                 }
                 return acc;
               },
               alpha.breakpoints());
}

DuhamelResult duhamel_series(const LieContext& ctx, const SeminormFamily& fam, const Mat& x,
                             const Mat& y, double t, double tol, const EstimateWitness& witness) {
  if (!witness.certified || witness.kind != WitnessKind::Constricted) {
    throw PreconditionError(
        "duhamel_series needs a certified constricted witness; run constricted_constants first");
  }
  double node_dist = std::numeric_limits<double>::infinity();
  for (const auto& node : witness.compact_nodes) {
    node_dist = std::min(node_dist, max_norm(x - node));
  }
  if (!(node_dist <= 1e-9 * std::max(1.0, max_norm(x)))) {
    throw PreconditionError(
        "duhamel_series argument X is not covered by the witness node set; "
        "re-run constricted_constants on a node set containing X");
  }
  const Seminorm w = fam.scaled(witness.v_id, witness.w_multiplier);
  const double c = witness.C;
  const double wy = w(y);
  const double exp_tc = std::exp(std::abs(t) * c);

  // After summing terms 0..k the tail is bounded by
  // (|t| C)^{k+1} / (k+1)!  exp(|t| C)  w(y).
  Mat acc = y;
  Mat term = y;
  double mk = 1.0;  // (|t| C)^k / k!
  const int hard_cap = 1000;
  for (int k = 0;; ++k) {
    const double m_next = mk * std::abs(t) * c / (k + 1);
    const double remainder = wy * m_next * exp_tc;
    if (remainder < tol) return DuhamelResult{acc, k + 1, remainder};
    if (k >= hard_cap) {
      throw PreconditionError("duhamel_series failed to converge under the certified majorant");
    }
    term = (t / (k + 1)) * detail::bracket_raw(x, term);
    // nilpotent arguments terminate the series exactly
    if (is_exactly_zero(term)) return DuhamelResult{acc, k + 1, 0.0};
    acc += term;
    mk = m_next;
  }
}

Curve adjoint_ode_defect(const LieContext& ctx, const Curve& phi, const Curve& psi,
                         const StepperConfig& cfg, double fd_step) {
  if (std::abs(psi.lo() - phi.lo()) > 1e-12 || std::abs(psi.hi() - phi.hi()) > 1e-12) {
    throw ArgumentError("adjoint_ode_defect needs a common interval");
  }
  if (psi.order() < 1) throw ArgumentError("adjoint_ode_defect needs a C^1 psi");
  auto traj = std::make_shared<Trajectory>(ctx, phi, phi.lo(), phi.hi(), cfg);
  Curve phi_copy = phi, psi_copy = psi;
  auto transported = [traj, psi_copy](double s) -> Mat { return traj->ad(s, psi_copy(s)); };
  const double h = fd_step;
  const double lo = phi.lo() + 2.0 * h, hi = phi.hi() - 2.0 * h;
  if (!(lo < hi)) throw ArgumentError("interval too short for the finite-difference stencil");
  return Curve(lo, hi, 0, [traj, phi_copy, psi_copy, transported, h](double t, int) -> Mat {
    auto central = [&](double step) -> Mat {
      return (transported(t + step) - transported(t - step)) / (2.0 * step);
    };
    const Mat coarse = central(h);
    const Mat fine = central(0.5 * h);
    const Mat lhs = (4.0 * fine - coarse) / 3.0;  // one Richardson pass
    const Mat f = transported(t);
    const Mat rhs = detail::bracket_raw(phi_copy(t), f) + traj->ad(t, psi_copy.eval(t, 1));
    return lhs - rhs;
  });
}

}  // namespace prodint
