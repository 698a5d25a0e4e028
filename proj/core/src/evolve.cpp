#include "prodint/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "prodint/errors.hpp"
#include "prodint/lie_ops.hpp"

namespace prodint {

namespace {

// Gauss nodes and weights of the two-exponential fourth-order scheme.
const double kSqrt3 = std::sqrt(3.0);
const double kC1 = 0.5 - kSqrt3 / 6.0;
const double kC2 = 0.5 + kSqrt3 / 6.0;
const double kA = 0.25 + kSqrt3 / 6.0;
const double kB = 0.25 - kSqrt3 / 6.0;

Mat step_once(StepMethod method, const Curve& phi, double t0, double t1, const Mat& mu) {
  const double h = t1 - t0;
  switch (method) {
    case StepMethod::ExponentialMidpoint: {
      return detail::exp_raw(h * phi(t0 + 0.5 * h)) * mu;
    }
    case StepMethod::CommutatorFree4: {
      const Mat a1 = phi(t0 + kC1 * h);
      const Mat a2 = phi(t0 + kC2 * h);
      // The factor applied first weights the earlier Gauss node more.
      return detail::exp_raw(h * (kB * a1 + kA * a2)) * detail::exp_raw(h * (kA * a1 + kB * a2)) *
             mu;
    }
    case StepMethod::ReferenceRK4: {
      const Mat k1 = phi(t0) * mu;
      const Mat k2 = phi(t0 + 0.5 * h) * (mu + 0.5 * h * k1);
      const Mat k3 = phi(t0 + 0.5 * h) * (mu + 0.5 * h * k2);
      const Mat k4 = phi(t1) * (mu + h * k3);
      return mu + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  throw ArgumentError("unknown stepper method");
}

// Step grid over [s, t]: breakpoints are always step boundaries, remaining
// steps distributed proportionally to segment length.
std::vector<double> step_grid(const Curve& phi, double s, double t, int steps) {
  std::vector<double> seg_edges;
  seg_edges.push_back(s);
  for (double b : phi.breakpoints())
    if (b > s && b < t) seg_edges.push_back(b);
  seg_edges.push_back(t);

  std::vector<double> grid;
  grid.push_back(s);
  const double total = t - s;
  for (size_t i = 0; i + 1 < seg_edges.size(); ++i) {
    const double a = seg_edges[i], b = seg_edges[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil(steps * (b - a) / total)));
    for (int k = 1; k <= n; ++k) grid.push_back(a + (b - a) * k / n);
  }
  return grid;
}

}  // namespace

Trajectory::Trajectory(const LieContext& ctx, Curve phi, double s, double t_end, StepperConfig cfg)
    : ctx_(ctx), phi_(std::move(phi)), method_(cfg.method) {
  if (!(s < t_end)) throw ArgumentError("trajectory needs s < t");
  const double tol = 1e-9 * std::max(1.0, std::abs(phi_.lo()) + std::abs(phi_.hi()));
  if (s < phi_.lo() - tol || t_end > phi_.hi() + tol) {
    throw ArgumentError("trajectory interval is not contained in the curve interval");
  }
  int steps = cfg.steps;
  if (steps <= 0) steps = 256;  // adaptive mode is resolved in evolve()
  t_ = step_grid(phi_, s, t_end, steps);
  mu_.reserve(t_.size());
  mu_.push_back(ctx_.identity());
  for (size_t k = 0; k + 1 < t_.size(); ++k) {
    mu_.push_back(step_once(method_, phi_, t_[k], t_[k + 1], mu_.back()));
  }
}

Mat Trajectory::at(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(lo()) + std::abs(hi()));
  if (t < lo() - tol || t > hi() + tol) {
    throw ArgumentError("trajectory queried outside its interval");
  }
  t = std::clamp(t, lo(), hi());
  // Last grid point <= t, then one extra stepper step; stays on the group
  // for the exponential methods.
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  size_t k = static_cast<size_t>(std::distance(t_.begin(), it));
  k = (k == 0) ? 0 : k - 1;
  if (k >= t_.size() - 1 && t >= t_.back()) return mu_.back();
  if (t == t_[k]) return mu_[k];
  return step_once(method_, phi_, t_[k], t, mu_[k]);
}

Mat Trajectory::ad(double t, const Mat& y) const {
  const Mat g = at(t);
  return g * y * invert(g);
}

Mat Trajectory::ad_inv(double t, const Mat& y) const {
  const Mat g = at(t);
  return invert(g) * y * g;
}

namespace {

double sample_defect(const Trajectory& traj, const Curve& phi) {
  const double span = traj.hi() - traj.lo();
  const int samples = std::min(48, std::max(8, traj.steps()));
  const double h_fd = std::min(1e-5 * std::max(1.0, span), span / (8.0 * samples));
  double defect = 0.0;
  for (int i = 1; i < samples; ++i) {
    const double t = traj.lo() + span * i / samples;
    if (t - h_fd < traj.lo() || t + h_fd > traj.hi()) continue;
    const Mat d = (traj.at(t + h_fd) - traj.at(t - h_fd)) / (2.0 * h_fd);
    defect = std::max(defect, op_norm(d * invert(traj.at(t)) - phi(t)));
  }
  return defect;
}

}  // namespace

EvolveReport evolve(const LieContext& ctx, const Curve& phi, double s, double t,
                    const StepperConfig& cfg) {
  if (s == t) return EvolveReport{GroupElement{ctx.identity()}, 0, 0.0, std::nullopt};
  if (s > t) throw ArgumentError("evolve needs s <= t");

  StepperConfig used = cfg;
  if (cfg.steps <= 0) {
    // step halving until two successive endpoint estimates agree
    int n = 16;
    Mat prev = Trajectory(ctx, phi, s, t, {cfg.method, n, cfg.tolerance}).values().back();
    while (true) {
      n *= 2;
      Mat next = Trajectory(ctx, phi, s, t, {cfg.method, n, cfg.tolerance}).values().back();
      if (op_norm(next - prev) < cfg.tolerance) {
        used.steps = n;
        break;
      }
      if (n >= (1 << 20)) {
        throw ConvergenceError("adaptive stepping underflowed before reaching tolerance", next);
      }
      prev = next;
    }
  }

  Trajectory traj(ctx, phi, s, t, used);
  EvolveReport report{GroupElement{traj.values().back()}, traj.steps(),
                      sample_defect(traj, phi), std::nullopt};
  if (cfg.with_oracle_gap) {
    StepperConfig ref{StepMethod::ReferenceRK4, 16 * std::max(1, used.steps), cfg.tolerance, false};
    Trajectory dense(ctx, phi, s, t, ref);
    report.oracle_gap = op_norm(report.result.matrix - dense.values().back());
  }
  return report;
}

Trajectory evolve_trajectory(const LieContext& ctx, const Curve& phi, double s, double t,
                             const StepperConfig& cfg) {
  return Trajectory(ctx, phi, s, t, cfg);
}

Curve log_derivative(const LieContext& ctx, const GroupCurve& mu) {
  (void)ctx;
  if (mu.order < 1) throw ArgumentError("log derivative needs a C^1 group curve");
  auto eval = mu.eval;
  return Curve(mu.lo, mu.hi, 0, [eval](double t, int) -> Mat {
    const Mat value = eval(t, 0);
    Eigen::FullPivLU<Mat> lu(value);
    if (!lu.isInvertible()) {
      throw InversionError("group curve value is singular at t = " + std::to_string(t));
    }
    return eval(t, 1) * lu.inverse();
  });
}

Curve inverse_curve(const Curve& phi) {
  const double lo = phi.lo(), hi = phi.hi();
  Curve copy = phi;
  std::vector<double> bps;
  for (double b : phi.breakpoints()) bps.push_back(lo + hi - b);
  return Curve(lo, hi, phi.order(),
               [copy, lo, hi](double t, int m) -> Mat {
                 const double sign = (m % 2 == 0) ? -1.0 : 1.0;
                 return sign * copy.eval(lo + hi - t, m);
               },
               std::move(bps));
}

Curve combine_product(const LieContext& ctx, const Curve& phi, const Curve& psi,
                      const StepperConfig& cfg) {
  if (std::abs(phi.lo() - psi.lo()) > 1e-12 || std::abs(phi.hi() - psi.hi()) > 1e-12) {
    throw ArgumentError("combine_product needs a common interval");
  }
  auto traj = std::make_shared<Trajectory>(ctx, phi, phi.lo(), phi.hi(), cfg);
  Curve phi_copy = phi, psi_copy = psi;
  std::vector<double> bps = phi.breakpoints();
  bps.insert(bps.end(), psi.breakpoints().begin(), psi.breakpoints().end());
  return Curve(phi.lo(), phi.hi(), 0,
               [traj, phi_copy, psi_copy](double t, int) -> Mat {
                 return phi_copy(t) + traj->ad(t, psi_copy(t));
               },
               std::move(bps));
}

Curve combine_inverse(const LieContext& ctx, const Curve& phi, const StepperConfig& cfg) {
  auto traj = std::make_shared<Trajectory>(ctx, phi, phi.lo(), phi.hi(), cfg);
  Curve phi_copy = phi;
  return Curve(phi.lo(), phi.hi(), 0,
               [traj, phi_copy](double t, int) -> Mat { return -traj->ad_inv(t, phi_copy(t)); },
               phi.breakpoints());
}

GroupElement split_evolve(const LieContext& ctx, const Curve& phi,
                          const std::vector<double>& partition, const StepperConfig& cfg) {
  if (partition.size() < 2) throw ArgumentError("partition needs at least two points");
  for (size_t i = 0; i + 1 < partition.size(); ++i) {
    if (!(partition[i] < partition[i + 1])) {
      throw ArgumentError("partition must be strictly increasing");
    }
  }
  Mat acc = ctx.identity();
  for (size_t i = 0; i + 1 < partition.size(); ++i) {
    const Mat factor = evolve(ctx, phi, partition[i], partition[i + 1], cfg).result.matrix;
    acc = factor * acc;  // later panels act on the left
  }
  return GroupElement{acc};
}

Curve substitute(const LieContext& ctx, const Curve& phi, const ScalarCurve& rho) {
  (void)ctx;
  const double tol = 1e-9 * std::max(1.0, std::abs(phi.lo()) + std::abs(phi.hi()));
  const int probes = 257;
  for (int i = 0; i < probes; ++i) {
    const double t = rho.lo() + (rho.hi() - rho.lo()) * i / (probes - 1);
    const double v = rho(t);
    if (v < phi.lo() - tol || v > phi.hi() + tol) {
      throw ArgumentError("reparametrization range leaves the curve interval");
    }
  }
  return reparametrize_velocity(phi, rho);
}

GroupElement evolve_piecewise(const LieContext& ctx, const Curve& phi, double t,
                              const StepperConfig& cfg) {
  if (!phi.has_pieces()) {
    if (t < phi.lo() - 1e-12 || t > phi.hi() + 1e-12) {
      throw ArgumentError("evolve_piecewise endpoint outside the curve interval");
    }
    if (t == phi.lo()) return GroupElement{ctx.identity()};
    return evolve(ctx, phi, phi.lo(), t, cfg).result;
  }
  const auto& pieces = phi.pieces();
  if (t < phi.lo() - 1e-12 || t > phi.hi() + 1e-12) {
    throw ArgumentError("piecewise pieces do not cover the requested interval");
  }
  if (t <= phi.lo()) return GroupElement{ctx.identity()};
  Mat acc = ctx.identity();
  for (const auto& piece : pieces) {
    if (piece.lo() >= t) break;
    const double b = std::min(piece.hi(), t);
    acc = evolve(ctx, piece, piece.lo(), b, cfg).result.matrix * acc;
    if (b >= t) break;
  }
  return GroupElement{acc};
}

}  // namespace prodint
