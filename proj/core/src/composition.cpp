#include "prodint/composition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "prodint/errors.hpp"
#include "prodint/lie_ops.hpp"

namespace prodint {

void CurveStack::validate() const {
  if (curves.empty()) throw ArgumentError("curve stack must be nonempty");
  for (const auto& c : curves) {
    if (std::abs(c.lo() - lo()) > 1e-12 || std::abs(c.hi() - hi()) > 1e-12) {
      throw ArgumentError("curve stack needs a common interval");
    }
  }
}

namespace {

// One word of the composed curve's derivative expansion:
// slots applied left to right, each slot a bracket factor (optional)
// followed by an Ad factor (optional), ending in a stack-curve derivative.
struct ChiSlot {
  bool has_bracket = false;
  int br_curve = -1;
  int br_deriv = 0;
  int ad_curve = -1;  // -1: identity
};

struct ChiTerm {
  std::vector<ChiSlot> slots;
  int leaf_curve = 0;
  int leaf_deriv = 0;
};

std::vector<ChiTerm> differentiate_terms(const std::vector<ChiTerm>& terms) {
  std::vector<ChiTerm> out;
  for (const auto& term : terms) {
    // leaf derivative
    {
      ChiTerm t = term;
      t.leaf_deriv += 1;
      out.push_back(std::move(t));
    }
    for (size_t i = 0; i < term.slots.size(); ++i) {
      if (term.slots[i].has_bracket) {
        ChiTerm t = term;
        t.slots[i].br_deriv += 1;
        out.push_back(std::move(t));
      }
      if (term.slots[i].ad_curve >= 0) {
        // d/dt Ad inserts a bracket by the generating curve in front;
        // an existing bracket block keeps its own slot with identity Ad.
        ChiTerm t = term;
        ChiSlot fresh;
        fresh.has_bracket = true;
        fresh.br_curve = term.slots[i].ad_curve;
        fresh.br_deriv = 0;
        fresh.ad_curve = term.slots[i].ad_curve;
        t.slots[i].ad_curve = -1;
        t.slots.insert(t.slots.begin() + static_cast<std::ptrdiff_t>(i) + 1, fresh);
        out.push_back(std::move(t));
      }
    }
  }
  return out;
}

class ChiComposer {
 public:
  ChiComposer(const LieContext& ctx, CurveStack stack, const StepperConfig& cfg)
      : ctx_(ctx), stack_(std::move(stack)) {
    const int n = stack_.size();
    for (int j = 0; j < n; ++j) {
      trajectories_.emplace_back(ctx_, stack_.curves[static_cast<size_t>(j)], stack_.lo(),
                                 stack_.hi(), cfg);
    }
    // chi = phi_{n-1} + sum_{p} Ad_{phi_{n-1}} .. Ad_{phi_{p+1}} (phi_p)
    // (zero-based indices; the last stack curve is the leading summand).
    std::vector<ChiTerm> base;
    for (int p = n - 1; p >= 0; --p) {
      ChiTerm t;
      for (int j = n - 1; j > p; --j) {
        ChiSlot slot;
        slot.ad_curve = j;
        t.slots.push_back(slot);
      }
      t.leaf_curve = p;
      t.leaf_deriv = 0;
      base.push_back(std::move(t));
    }
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      memo_[0] = std::move(base);
    }
  }

  int order_cap() const {
    int order = kSmoothOrder;
    for (const auto& c : stack_.curves) order = std::min(order, c.order());
    return order;
  }

  Mat eval(double t, int m) const {
    const std::vector<ChiTerm>& terms = terms_for(m);
    const int n = stack_.size();
    std::vector<Mat> g(static_cast<size_t>(n)), ginv(static_cast<size_t>(n));
    std::vector<bool> have(static_cast<size_t>(n), false);
    auto conj = [&](int j, const Mat& y) {
      const size_t idx = static_cast<size_t>(j);
      if (!have[idx]) {
        g[idx] = trajectories_[idx].at(t);
        ginv[idx] = invert(g[idx]);
        have[idx] = true;
      }
      return Mat(g[idx] * y * ginv[idx]);
    };
    Mat acc = Mat::Zero(ctx_.dim(), ctx_.dim());
    for (const auto& term : terms) {
      Mat value = stack_.curves[static_cast<size_t>(term.leaf_curve)].eval(t, term.leaf_deriv);
      for (auto it = term.slots.rbegin(); it != term.slots.rend(); ++it) {
        if (it->ad_curve >= 0) value = conj(it->ad_curve, value);
        if (it->has_bracket) {
          value = detail::bracket_raw(
              stack_.curves[static_cast<size_t>(it->br_curve)].eval(t, it->br_deriv), value);
        }
      }
      acc += value;
    }
    return acc;
  }

 private:
  const std::vector<ChiTerm>& terms_for(int m) const {
    std::lock_guard<std::mutex> lock(memo_mutex_);
    int have = 0;
    for (const auto& [k, v] : memo_) have = std::max(have, k);
    while (have < m) {
      memo_[have + 1] = differentiate_terms(memo_.at(have));
      ++have;
    }
    return memo_.at(m);
  }

  LieContext ctx_;
  CurveStack stack_;
  std::vector<Trajectory> trajectories_;
  mutable std::mutex memo_mutex_;
  mutable std::map<int, std::vector<ChiTerm>> memo_;
};

}  // namespace

Curve chi_compose(const LieContext& ctx, const CurveStack& stack, const StepperConfig& cfg) {
  stack.validate();
  auto composer = std::make_shared<ChiComposer>(ctx, stack, cfg);
  return Curve(stack.lo(), stack.hi(), composer->order_cap(),
               [composer](double t, int m) -> Mat { return composer->eval(t, m); });
}

CurveStack rescale_stack(const LieContext& ctx, const CurveStack& chis) {
  (void)ctx;
  chis.validate();
  const int n = chis.size();
  if (std::abs(chis.lo()) > 1e-12 || std::abs(chis.hi() - 1.0 / n) > 1e-9) {
    throw ArgumentError("rescale_stack expects curves on [0, 1/n] with n the stack size");
  }
  CurveStack out;
  for (const auto& chi : chis.curves) {
    Curve copy = chi;
    const double scale = 1.0 / n;
    out.curves.push_back(Curve(0.0, 1.0, chi.order(), [copy, scale](double t, int m) -> Mat {
      return std::pow(scale, m + 1) * copy.eval(t * scale, m);
    }));
  }
  return out;
}

std::uint64_t term_count(int n, int k) {
  if (n < 1) throw ArgumentError("term_count needs n >= 1");
  if (k < 0) throw ArgumentError("term_count needs k >= 0");
  std::uint64_t acc = static_cast<std::uint64_t>(n);
  for (int j = 1; j <= k; ++j) {
    const std::uint64_t factor = static_cast<std::uint64_t>(n + j);
    if (acc > UINT64_MAX / factor) throw ArgumentError("term_count overflows 64 bits");
    acc *= factor;
  }
  return acc;
}

ChiBoundReport chi_sup_bound_check(const LieContext& ctx, const SeminormFamily& fam,
                                   const EstimateWitness& witness, const CurveStack& chis, int q,
                                   const StepperConfig& cfg, int t_samples) {
  chis.validate();
  if (q < 0) throw ArgumentError("chi_sup_bound_check needs q >= 0");
  for (const auto& c : chis.curves) {
    if (c.order() < q) throw ArgumentError("stack curves do not provide derivatives through q");
  }
  if (!witness.certified) throw PreconditionError("chi_sup_bound_check needs a certified witness");
  const int n = chis.size();
  const Seminorm v = fam.at(witness.v_id);
  const Seminorm w = fam.scaled(witness.v_id, witness.w_multiplier);

  ChiBoundReport report;
  report.n = n;
  report.q = q;

  // Precondition: unit w-sup-norms through order q on [0, 1/n].
  double stack_sup = 0.0;
  for (const auto& c : chis.curves) {
    for (int m = 0; m <= q; ++m) {
      for (int i = 0; i <= t_samples; ++i) {
        const double t = c.lo() + c.length() * i / t_samples;
        stack_sup = std::max(stack_sup, w(c.eval(t, m)));
      }
    }
  }
  if (stack_sup > 1.0 + 1e-12) {
    report.skipped = true;
    report.skip_reason = "stack w-sup-norm " + std::to_string(stack_sup) + " exceeds 1";
    return report;
  }

  const CurveStack rescaled = rescale_stack(ctx, chis);
  const Curve chi = chi_compose(ctx, rescaled, cfg);

  double measured = 0.0;
  for (int m = 0; m <= q; ++m) {
    for (int i = 0; i <= t_samples; ++i) {
      const double t = chi.lo() + chi.length() * i / t_samples;
      measured = std::max(measured, v(chi.eval(t, m)));
    }
  }
  double bound = std::exp(1.0);
  for (int j = 1; j <= q; ++j) bound *= static_cast<double>(n + j) / n;

  report.measured = measured;
  report.bound = bound;
  report.max_ratio = measured / bound;
  report.pass = report.max_ratio <= 1.0;
  return report;
}

SubdivisionResult subdivide_for_chart_bound(const LieContext& ctx, const Seminorm& m_norm,
                                            const Curve& phi, const StepperConfig& cfg,
                                            int m_cap) {
  double m_inf = 0.0;
  const int probes = 129;
  for (int i = 0; i < probes; ++i) {
    m_inf = std::max(m_inf, m_norm(phi(phi.lo() + phi.length() * i / (probes - 1))));
  }
  const double budget = std::min(1.0, ctx.chart_radius());
  const Mat id = ctx.identity();

  SubdivisionResult result;
  for (int m = 1; m <= m_cap; m *= 2) {
    const double panel_len = phi.length() / m;
    const double stopping_bound = panel_len * m_inf;
    if (stopping_bound > budget) continue;  // the certificate cannot hold yet
    double sup = 0.0;
    bool inside = true;
    for (int p = 0; p < m && inside; ++p) {
      const double a = phi.lo() + panel_len * p;
      Trajectory traj(ctx, phi, a, a + panel_len, cfg);
      for (int i = 1; i <= 8 && inside; ++i) {
        const double t = a + panel_len * i / 8.0;
        const double chart_norm = m_norm(traj.at(t) - id);
        sup = std::max(sup, chart_norm);
        // measured panel norm must obey both the chart budget and the
        // panel-length bound (with quadrature slack)
        if (chart_norm > budget || chart_norm > stopping_bound * (1.0 + 1e-6) + 1e-12) {
          inside = false;
        }
      }
    }
    if (inside) {
      result.m = m;
      result.certified = true;
      result.panel_chart_sup = sup;
      result.per_panel_bound = stopping_bound;
      return result;
    }
  }
  result.certified = false;
  result.m = m_cap;
  return result;
}

SubdivisionResult subdivide_for_chart_bound(const LieContext& ctx, const SeminormFamily& fam,
                                            const std::string& m_id, const Curve& phi,
                                            const StepperConfig& cfg, int m_cap) {
  return subdivide_for_chart_bound(ctx, fam.at(m_id), phi, cfg, m_cap);
}

PipelineReport continuity_pipeline(const LieContext& ctx, const SeminormFamily& fam,
                                   const std::string& p_id, const Curve& phi,
                                   const StepperConfig& cfg, int q_bar) {
  if (std::abs(phi.lo()) > 1e-12 || std::abs(phi.hi() - 1.0) > 1e-12) {
    throw ArgumentError("continuity_pipeline expects curves on [0, 1]");
  }
  if (q_bar < 1) throw ArgumentError("continuity_pipeline needs q_bar >= 1");

  const Seminorm p_norm = fam.at(p_id);
  // Seminorm tower p <= w <= q <= m chosen so the chart-map derivative
  // bounds hold with chart points up to operator norm 1/2: q = c_q p with
  // c_q >= 2 (j!)^{1/(j+1)} for j <= q_bar, rounded up to a power of two,
  // and m = 2 q.
  double c_q = 2.0;
  for (int j = 1; j <= q_bar; ++j) {
    double need = 2.0 * std::pow(std::tgamma(j + 1.0), 1.0 / (j + 1));
    c_q = std::max(c_q, need);
  }
  double c_pow = 1.0;
  while (c_pow < c_q) c_pow *= 2.0;
  c_q = c_pow;
  const Seminorm q_norm = fam.scaled(p_id, c_q);
  const Seminorm m_norm = fam.scaled(p_id, 2.0 * c_q);

  PipelineReport report;

  double m_inf = 0.0;
  for (int i = 0; i <= 128; ++i) m_inf = std::max(m_inf, m_norm(phi(i / 128.0)));
  if (m_inf > 1.0 + 1e-12) {
    report.skipped = true;
    report.skip_reason = "m-norm sup " + std::to_string(m_inf) + " exceeds 1";
    return report;
  }

  // Stage 1: subdivision certificate.
  const SubdivisionResult sub = subdivide_for_chart_bound(ctx, m_norm, phi, cfg);
  report.subdivisions = sub.m;
  report.stages.push_back({"subdivision", std::min(1.0, ctx.chart_radius()), sub.panel_chart_sup,
                           sub.certified});
  if (!sub.certified) {
    report.pass = false;
    return report;
  }
  const int m = sub.m;

  // Stage 2: panel endpoints in the chart, q(m X_p) <= 1.
  const Mat id = ctx.identity();
  std::vector<Mat> xs;
  double q_sup = 0.0;
  for (int p = 0; p < m; ++p) {
    const double a = static_cast<double>(p) / m, b = static_cast<double>(p + 1) / m;
    const Mat g = evolve(ctx, phi, a, b, cfg).result.matrix;
    xs.push_back(g - id);
    q_sup = std::max(q_sup, q_norm(m * xs.back()));
  }
  report.stages.push_back({"panel-endpoints", 1.0, q_sup, q_sup <= 1.0 + 1e-9});

  // Stage 3: straight chart lines and their log derivatives
  // psi_p(t) = m X_p (1 + t m X_p)^{-1}, with psi^{(j)} = (-1)^j j! psi^{j+1};
  // derivative sup-norms must stay within the unit w-ball (w = 2 p).
  const LieContext amb = ctx.ambient();
  std::vector<Curve> lines;
  double w_sup = 0.0;
  for (int p = 0; p < m; ++p) {
    const Mat a = m * xs[static_cast<size_t>(p)];
    const int d = ctx.dim();
    lines.push_back(Curve(0.0, 1.0 / m, kSmoothOrder, [a, d](double t, int deriv) -> Mat {
      // psi(t) = A (1 + tA)^{-1} satisfies psi' = -psi^2, so
      // psi^{(j)} = (-1)^j j! psi^{j+1}.
      const Mat base = a * invert(Mat(Mat::Identity(d, d) + t * a));
      Mat acc = base;
      double coeff = 1.0;
      for (int j = 1; j <= deriv; ++j) {
        acc = acc * base;
        coeff *= -static_cast<double>(j);
      }
      return Mat(coeff * acc);
    }));
    for (int j = 0; j <= q_bar; ++j) {
      for (int i = 0; i <= 8; ++i) {
        const double t = (1.0 / m) * i / 8.0;
        w_sup = std::max(w_sup, 2.0 * p_norm(lines.back().eval(t, j)));
      }
    }
  }
  report.stages.push_back({"line-derivative-bounds", 1.0, w_sup, w_sup <= 1.0 + 1e-9});

  // Stage 4: collapse. The ordered product of the line integrals equals the
  // full integral; the composed curve of the rescaled stack evolves to the
  // same element.
  Mat product = amb.identity();
  for (const auto& line : lines) {
    product = evolve(amb, line, 0.0, 1.0 / m, cfg).result.matrix * product;
  }
  const Mat whole = evolve(ctx, phi, 0.0, 1.0, cfg).result.matrix;
  const double collapse_tol = 1e-7 * m;
  const double gap_direct = rel_error(product, whole);

  CurveStack stack;
  stack.curves = lines;
  const CurveStack rescaled = rescale_stack(amb, stack);
  const Curve chi = chi_compose(amb, rescaled, cfg);
  const Mat via_chi = evolve(amb, chi, 0.0, 1.0, cfg).result.matrix;
  const double gap_chi = rel_error(via_chi, whole);
  report.stages.push_back(
      {"collapse", collapse_tol, std::max(gap_direct, gap_chi),
       gap_direct <= collapse_tol && gap_chi <= collapse_tol});

  // Stage 5: factorial sup bound of the composed curve (v = p, w = 2 p).
  double chi_sup = 0.0;
  for (int j = 0; j <= q_bar; ++j) {
    for (int i = 0; i <= 16; ++i) {
      chi_sup = std::max(chi_sup, p_norm(chi.eval(i / 16.0, j)));
    }
  }
  double factorial_bound = std::exp(1.0);
  for (int j = 1; j <= q_bar; ++j) factorial_bound *= static_cast<double>(m + j) / m;
  report.stages.push_back({"factorial-sup-bound", factorial_bound, chi_sup,
                           chi_sup <= factorial_bound});

  // Stage 6: final chart norm of the full integral.
  const double final_norm = p_norm(whole - id);
  report.stages.push_back({"final-chart-bound", 1.0, final_norm, final_norm <= 1.0});

  report.pass = true;
  for (const auto& stage : report.stages) report.pass = report.pass && stage.pass;
  return report;
}

}  // namespace prodint
