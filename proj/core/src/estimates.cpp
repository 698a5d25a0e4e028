#include "prodint/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prodint/errors.hpp"
#include "prodint/lie_ops.hpp"

namespace prodint {

namespace {

// A sampled ad-chain, reduced to the numbers the certification grids need.
struct ChainStat {
  int depth;
  double lhs;        // v(ad_{X1}..ad_{Xn}(Y))
  double prod_norm;  // v(X1) ... v(Xn)
  double y_norm;     // v(Y)
};

Mat random_unit_element(Rng& rng, const LieContext& ctx, const Seminorm& v) {
  const int k = ctx.algebra_dim();
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vec coords(k);
    for (int i = 0; i < k; ++i) coords(i) = rng.normal();
    Mat m = ctx.from_coords(coords);
    const double n = v(m);
    if (n > 1e-12) return Mat((rng.uniform(0.05, 1.0) / n) * m);
  }
  throw DomainError("could not draw a nonzero algebra element in context " + ctx.name());
}

ChainStat stat_of(const Seminorm& v, const std::vector<Mat>& xs, const Mat& y) {
  ChainStat s;
  s.depth = static_cast<int>(xs.size());
  s.lhs = v(detail::ad_chain_raw(xs, y));
  s.prod_norm = 1.0;
  for (const auto& x : xs) s.prod_norm *= v(x);
  s.y_norm = v(y);
  return s;
}

// Exhaustive tuples over a pool, depth fixed; appends (xs..., y) stats.
void exhaustive_chains(const Seminorm& v, const std::vector<Mat>& pool,
                       const std::vector<Mat>& y_pool, int depth, size_t cap,
                       std::vector<ChainStat>& out) {
  const size_t k = pool.size();
  size_t tuples = 1;
  for (int i = 0; i < depth; ++i) {
    tuples *= k;
    if (tuples * y_pool.size() > cap) return;
  }
  std::vector<size_t> idx(static_cast<size_t>(depth), 0);
  std::vector<Mat> xs(static_cast<size_t>(depth), pool.front());
  while (true) {
    for (int i = 0; i < depth; ++i) xs[static_cast<size_t>(i)] = pool[idx[static_cast<size_t>(i)]];
    for (const auto& y : y_pool) out.push_back(stat_of(v, xs, y));
    int p = depth - 1;
    while (p >= 0 && ++idx[static_cast<size_t>(p)] == k) idx[static_cast<size_t>(p--)] = 0;
    if (p < 0) break;
  }
}

std::vector<ChainStat> sample_chains_asymptotic(const LieContext& ctx, const Seminorm& v,
                                                uint64_t seed, const WitnessSearchOptions& opts) {
  std::vector<ChainStat> stats;
  for (int depth = 1; depth <= std::min(opts.basis_depth, opts.depth_max); ++depth) {
    exhaustive_chains(v, ctx.basis(), ctx.basis(), depth, opts.exhaustive_cap, stats);
  }
  Rng rng(seed);
  for (int depth = 1; depth <= opts.depth_max; ++depth) {
    for (int s = 0; s < opts.samples_per_depth; ++s) {
      std::vector<Mat> xs;
      xs.reserve(static_cast<size_t>(depth));
      for (int i = 0; i < depth; ++i) xs.push_back(random_unit_element(rng, ctx, v));
      stats.push_back(stat_of(v, xs, random_unit_element(rng, ctx, v)));
    }
  }
  return stats;
}

std::vector<ChainStat> sample_chains_constricted(const LieContext& ctx, const Seminorm& v,
                                                 const std::vector<Mat>& nodes, uint64_t seed,
                                                 const WitnessSearchOptions& opts) {
  std::vector<ChainStat> stats;
  std::vector<Mat> y_pool = ctx.basis();
  for (int depth = 1; depth <= std::min(opts.basis_depth, opts.depth_max); ++depth) {
    exhaustive_chains(v, nodes, y_pool, depth, opts.exhaustive_cap, stats);
  }
  Rng rng(seed);
  for (int depth = 1; depth <= opts.depth_max; ++depth) {
    for (int s = 0; s < opts.samples_per_depth; ++s) {
      std::vector<Mat> xs;
      xs.reserve(static_cast<size_t>(depth));
      for (int i = 0; i < depth; ++i) {
        xs.push_back(nodes[static_cast<size_t>(rng.bits() % nodes.size())]);
      }
      stats.push_back(stat_of(v, xs, random_unit_element(rng, ctx, v)));
    }
  }
  return stats;
}

// lhs <= c^{depth+1} prod_norm y_norm for every sample?
bool certify_multiplier(const std::vector<ChainStat>& stats, double c, double* slack,
                        const ChainStat** violator) {
  double max_slack = 0.0;
  bool ok = true;
  for (const auto& s : stats) {
    const double rhs = std::pow(c, s.depth + 1) * s.prod_norm * s.y_norm;
    if (s.lhs > rhs) {
      ok = false;
      if (violator && (*violator == nullptr || s.depth > (*violator)->depth)) *violator = &s;
      continue;
    }
    if (rhs > 0.0) max_slack = std::max(max_slack, s.lhs / rhs);
  }
  if (slack) *slack = max_slack;
  return ok;
}

bool certify_constant(const std::vector<ChainStat>& stats, double c_const, double w_multiplier,
                      double* slack, const ChainStat** violator) {
  double max_slack = 0.0;
  bool ok = true;
  for (const auto& s : stats) {
    const double rhs = std::pow(c_const, s.depth) * w_multiplier * s.y_norm;
    if (s.lhs > rhs) {
      ok = false;
      if (violator && (*violator == nullptr || s.depth > (*violator)->depth)) *violator = &s;
      continue;
    }
    if (rhs > 0.0) max_slack = std::max(max_slack, s.lhs / rhs);
  }
  if (slack) *slack = max_slack;
  return ok;
}

ChainSampleLog make_log(uint64_t seed, const WitnessSearchOptions& opts, size_t total) {
  return ChainSampleLog{seed, opts.depth_max, opts.basis_depth, opts.samples_per_depth, total};
}

}  // namespace

EstimateWitness asymptotic_witness(const LieContext& ctx, const SeminormFamily& fam,
                                   const std::string& v_id, uint64_t seed,
                                   const WitnessSearchOptions& opts) {
  const Seminorm v = fam.at(v_id);
  const auto stats = sample_chains_asymptotic(ctx, v, seed, opts);

  EstimateWitness w;
  w.kind = WitnessKind::Asymptotic;
  w.context = ctx.name();
  w.v_id = v_id;
  w.log = make_log(seed, opts, stats.size());

  for (double c = 1.0; c <= opts.multiplier_cap; c *= 2.0) {
    double slack = 0.0;
    if (certify_multiplier(stats, c, &slack, nullptr)) {
      w.w_multiplier = c;
      w.certified = true;
      w.max_slack = slack;
      return w;
    }
  }
  const ChainStat* violator = nullptr;
  certify_multiplier(stats, opts.multiplier_cap, nullptr, &violator);
  w.certified = false;
  w.failure_note = "no multiplier <= " + std::to_string(opts.multiplier_cap) +
                   " certifies; deepest violating chain depth " +
                   std::to_string(violator ? violator->depth : -1);
  return w;
}

bool certify_asymptotic(const LieContext& ctx, const SeminormFamily& fam, const std::string& v_id,
                        double multiplier, uint64_t seed, const WitnessSearchOptions& opts,
                        double* max_slack) {
  const Seminorm v = fam.at(v_id);
  const auto stats = sample_chains_asymptotic(ctx, v, seed, opts);
  return certify_multiplier(stats, multiplier, max_slack, nullptr);
}

EstimateWitness constricted_constants(const LieContext& ctx, const SeminormFamily& fam,
                                      const std::string& v_id,
                                      const std::vector<Mat>& compact_nodes, uint64_t seed,
                                      const WitnessSearchOptions& opts) {
  if (compact_nodes.empty()) throw ArgumentError("constricted_constants needs a nonempty node set");
  const Seminorm v = fam.at(v_id);
  const auto stats = sample_chains_constricted(ctx, v, compact_nodes, seed, opts);

  EstimateWitness w;
  w.kind = WitnessKind::Constricted;
  w.context = ctx.name();
  w.v_id = v_id;
  w.w_multiplier = 1.0;
  w.compact_nodes = compact_nodes;
  w.log = make_log(seed, opts, stats.size());

  // Anchor the grid at the submultiplicativity value 2 max ||X||_op; search
  // downward-shifted dyadic steps for the smallest certified constant.
  double anchor = 0.0;
  for (const auto& node : compact_nodes) anchor = std::max(anchor, 2.0 * op_norm(node));
  if (anchor == 0.0) {
    bool all_zero = true;
    for (const auto& s : stats) all_zero = all_zero && s.lhs == 0.0;
    w.certified = all_zero;
    w.C = 0.0;
    if (!all_zero) w.failure_note = "zero node set with nonvanishing chains";
    return w;
  }
  for (int k = -8; k <= 12; ++k) {
    const double c_const = anchor * std::pow(2.0, k);
    double slack = 0.0;
    if (certify_constant(stats, c_const, w.w_multiplier, &slack, nullptr)) {
      w.C = c_const;
      w.certified = true;
      w.max_slack = slack;
      return w;
    }
  }
  const ChainStat* violator = nullptr;
  certify_constant(stats, anchor * std::pow(2.0, 12), w.w_multiplier, nullptr, &violator);
  w.certified = false;
  w.failure_note = "no constant <= " + std::to_string(anchor * std::pow(2.0, 12)) +
                   " certifies; deepest violating chain depth " +
                   std::to_string(violator ? violator->depth : -1);
  return w;
}

BoundCheckReport transport_bound_check(const LieContext& ctx, const SeminormFamily& fam,
                                       const EstimateWitness& witness, const Curve& phi,
                                       const std::vector<Mat>& ys, const std::vector<double>& ts,
                                       const StepperConfig& cfg) {
  if (!witness.certified || witness.kind != WitnessKind::Constricted) {
    throw PreconditionError("transport_bound_check needs a certified constricted witness");
  }
  // Guard: the node set must reach at least as far out as the curve image.
  double node_sup = 0.0;
  for (const auto& node : witness.compact_nodes) node_sup = std::max(node_sup, op_norm(node));
  double curve_sup = 0.0;
  for (int i = 0; i <= 64; ++i) {
    curve_sup = std::max(curve_sup, op_norm(phi(phi.lo() + phi.length() * i / 64.0)));
  }
  if (curve_sup > node_sup * (1.0 + 1e-9) + 1e-12) {
    throw PreconditionError("witness node set does not cover the curve image");
  }

  const Seminorm v = fam.at(witness.v_id);
  const Seminorm w = fam.scaled(witness.v_id, witness.w_multiplier);
  const double factor = std::exp(phi.length() * witness.C);

  Trajectory traj(ctx, phi, phi.lo(), phi.hi(), cfg);
  BoundCheckReport report;
  report.bound_factor = factor * witness.w_multiplier;
  for (double t : ts) {
    for (const auto& y : ys) {
      const double measured = v(traj.ad_inv(t, y));
      const double bound = factor * w(y);
      if (bound == 0.0) continue;
      report.max_ratio = std::max(report.max_ratio, measured / bound);
      ++report.samples;
    }
  }
  report.pass = report.max_ratio <= 1.0;
  return report;
}

MuConvexityReport mu_convexity_check(const LieContext& ctx, const SeminormFamily& fam,
                                     const std::string& u_id,
                                     const std::vector<int>& word_lengths, int budget_samples,
                                     uint64_t seed, double multiplier_cap) {
  const Seminorm u = fam.at(u_id);
  MuConvexityReport report;
  report.u_id = u_id;
  report.word_lengths = word_lengths;
  report.seed = seed;

  // Words of near-identity group elements, generated once (independent of
  // the searched multiplier, so certification is monotone). Each word stores
  // the chart vectors X_i = g_i - 1 and the chart norm of the product.
  struct Word {
    double sum_u;      // sum of u(X_i)
    double chart_norm; // u(product - 1)
  };
  std::vector<Word> words;
  Rng rng(seed);
  for (int len : word_lengths) {
    if (len < 1) throw ArgumentError("word lengths must be >= 1");
    for (int s = 0; s < budget_samples; ++s) {
      // total chart budget log-uniform so small-sum words stay represented
      const double budget = std::pow(2.0, rng.uniform(-12.0, 0.0));
      Mat prod = ctx.identity();
      double sum_u = 0.0;
      for (int i = 0; i < len; ++i) {
        double step = budget / len;
        Mat gen = random_unit_element(rng, ctx, u);
        Mat g = detail::exp_raw(step * gen);
        Mat chart = g - ctx.identity();
        int shrink = 0;
        while (op_norm(chart) >= ctx.chart_radius() && shrink < 60) {
          step *= 0.5;
          g = detail::exp_raw(step * gen);
          chart = g - ctx.identity();
          ++shrink;
          ++report.shrink_events;
        }
        prod = prod * g;
        sum_u += u(chart);
      }
      words.push_back({sum_u, u(prod - ctx.identity())});
    }
  }

  for (double c = 1.0; c <= multiplier_cap; c *= 2.0) {
    bool ok = true;
    double max_ratio = 0.0;
    bool any = false;
    for (const auto& word : words) {
      const double sum_o = c * word.sum_u;
      if (sum_o > 1.0 || sum_o == 0.0) continue;  // outside the word budget
      any = true;
      max_ratio = std::max(max_ratio, word.chart_norm / sum_o);
      if (word.chart_norm > sum_o) {
        ok = false;
        break;
      }
    }
    if (ok && any) {
      report.certified = true;
      report.o_multiplier = c;
      report.max_ratio = max_ratio;
      return report;
    }
  }
  report.certified = false;
  return report;
}

namespace {

TameReport tame_measure(const LieContext& ctx, const SeminormFamily& fam,
                        const std::vector<Curve>& curves, const std::string& v_id,
                        const StepperConfig& cfg, int t_samples, int y_samples, uint64_t seed) {
  const Seminorm v = fam.at(v_id);
  Rng rng(seed);
  std::vector<Mat> ys;
  for (int i = 0; i < y_samples; ++i) ys.push_back(random_unit_element(rng, ctx, v));

  TameReport report;
  report.v_id = v_id;
  int index = 0;
  for (const auto& phi : curves) {
    double worst = 0.0;
    // Piecewise members integrate panel by panel so breakpoints stay on
    // step boundaries.
    Trajectory traj(ctx, phi, phi.lo(), phi.hi(), cfg);
    for (int i = 0; i <= t_samples; ++i) {
      const double t = phi.lo() + phi.length() * i / t_samples;
      for (const auto& y : ys) {
        const double vy = v(y);
        if (vy == 0.0) continue;
        worst = std::max(worst, v(traj.ad_inv(t, y)) / vy);
      }
    }
    report.ratios.emplace_back(index++, worst);
    report.max_ratio = std::max(report.max_ratio, worst);
  }
  return report;
}

}  // namespace

TameReport tame_check(const LieContext& ctx, const SeminormFamily& fam,
                      const std::vector<Curve>& curves, const std::string& v_id,
                      const StepperConfig& cfg, int t_samples, int y_samples, uint64_t seed,
                      double multiplier_cap) {
  if (curves.empty()) throw ArgumentError("tame_check needs a nonempty sequence");
  TameReport report = tame_measure(ctx, fam, curves, v_id, cfg, t_samples, y_samples, seed);
  report.cap = multiplier_cap;
  double mult = 1.0;
  while (mult < report.max_ratio && mult <= multiplier_cap) mult *= 2.0;
  if (mult <= multiplier_cap) {
    report.certified = true;
    report.w_multiplier = mult;
  }
  return report;
}

TameReport tame_check_with(const LieContext& ctx, const SeminormFamily& fam,
                           const std::vector<Curve>& curves, const std::string& v_id,
                           double w_multiplier, const StepperConfig& cfg, int t_samples,
                           int y_samples, uint64_t seed) {
  if (curves.empty()) throw ArgumentError("tame_check needs a nonempty sequence");
  TameReport report = tame_measure(ctx, fam, curves, v_id, cfg, t_samples, y_samples, seed);
  report.w_multiplier = w_multiplier;
  report.cap = w_multiplier;
  report.certified = report.max_ratio <= w_multiplier;
  return report;
}

namespace {

nlohmann::json matrix_to_flat(const Mat& m) {
  nlohmann::json row = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
  return row;
}

Mat matrix_from_flat_json(const nlohmann::json& row, int dim) {
  Mat m(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = row.at(static_cast<size_t>(k++)).get<double>();
  return m;
}

}  // namespace

std::string witness_to_json(const EstimateWitness& w) {
  nlohmann::json j;
  j["kind"] = w.kind == WitnessKind::Asymptotic ? "asymptotic" : "constricted";
  j["context"] = w.context;
  j["v_id"] = w.v_id;
  j["w_multiplier"] = w.w_multiplier;
  j["C"] = w.C;
  j["certified"] = w.certified;
  j["max_slack"] = w.max_slack;
  j["failure_note"] = w.failure_note;
  j["seed"] = w.log.seed;
  j["depth_max"] = w.log.depth_max;
  j["basis_depth"] = w.log.basis_depth;
  j["samples_per_depth"] = w.log.samples_per_depth;
  j["total_chains"] = w.log.total_chains;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : w.compact_nodes) nodes.push_back(matrix_to_flat(node));
  j["compact_nodes"] = nodes;
  return j.dump(2) + "\n";
}

EstimateWitness witness_from_json(const std::string& text, int dim) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("witness file is not valid JSON: ") + e.what());
  }
  try {
    EstimateWitness w;
    w.kind = j.at("kind").get<std::string>() == "asymptotic" ? WitnessKind::Asymptotic
                                                             : WitnessKind::Constricted;
    w.context = j.at("context").get<std::string>();
    w.v_id = j.at("v_id").get<std::string>();
    w.w_multiplier = j.at("w_multiplier").get<double>();
    w.C = j.at("C").get<double>();
    w.certified = j.at("certified").get<bool>();
    w.max_slack = j.at("max_slack").get<double>();
    w.failure_note = j.at("failure_note").get<std::string>();
    w.log.seed = j.at("seed").get<uint64_t>();
    w.log.depth_max = j.at("depth_max").get<int>();
    w.log.basis_depth = j.at("basis_depth").get<int>();
    w.log.samples_per_depth = j.at("samples_per_depth").get<int>();
    w.log.total_chains = j.at("total_chains").get<size_t>();
    for (const auto& node : j.at("compact_nodes")) {
      w.compact_nodes.push_back(matrix_from_flat_json(node, dim));
    }
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("witness file is missing required fields: ") + e.what());
  }
}

void save_witness_file(const EstimateWitness& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open witness file for writing: " + path);
  out << witness_to_json(w);
}

EstimateWitness load_witness_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open witness file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return witness_from_json(ss.str(), dim);
}

}  // namespace prodint
