#include "prodint/approx.hpp"

#include <algorithm>
#include <cmath>

#include "prodint/errors.hpp"

namespace prodint {

Curve freeze_approximate(const Curve& phi, int n, FreezeMode mode) {
  if (n < 1) throw ArgumentError("freeze_approximate needs n >= 1");
  std::vector<Curve> pieces;
  const double len = phi.length();
  for (int p = 0; p < n; ++p) {
    const double a = phi.lo() + len * p / n;
    const double b = phi.lo() + len * (p + 1) / n;
    const Mat frozen = phi(a);
    if (mode == FreezeMode::ConstantHold) {
      pieces.push_back(Curve::constant(frozen, a, b));
    } else {
      // phi(t_p) (1 + (t - t_p) phi(t_p)) as a degree-1 matrix polynomial
      const Mat sq = frozen * frozen;
      pieces.push_back(Curve::polynomial({frozen - a * sq, sq}, a, b));
    }
  }
  return Curve::piecewise(std::move(pieces));
}

std::string to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::MackeyCauchy: return "mackey-cauchy";
    case SequenceKind::Cauchy: return "cauchy";
    case SequenceKind::Neither: return "neither";
  }
  throw ArgumentError("unknown sequence kind");
}

std::string to_string(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::Pow2Min: return "2^-min(m,n)";
    case EnvelopeKind::InvMin: return "1/min(m,n)";
  }
  throw ArgumentError("unknown envelope kind");
}

double envelope_value(EnvelopeKind k, int m, int n) {
  const int lo = std::min(m, n);
  switch (k) {
    case EnvelopeKind::Pow2Min: return std::pow(2.0, -lo);
    case EnvelopeKind::InvMin: return 1.0 / lo;
  }
  throw ArgumentError("unknown envelope kind");
}

namespace {

SequenceReport classify_from_distances(
    size_t count, const SeminormFamily& fam, EnvelopeKind envelope, std::vector<int> labels,
    const std::function<double(size_t, size_t, const Seminorm&)>& distance) {
  SequenceReport report;
  report.envelope = envelope;
  if (count == 0) throw ArgumentError("classify_sequence needs a nonempty sequence");
  if (labels.empty()) {
    for (size_t i = 0; i < count; ++i) labels.push_back(static_cast<int>(i) + 1);
  }
  if (labels.size() != count) throw ArgumentError("classification labels mismatch sequence size");
  if (count == 1) {
    report.kind = SequenceKind::MackeyCauchy;
    report.envelope_sound = true;
    report.cauchy_evidence = true;
    for (const auto& norm : fam.norms()) report.constants[norm.id] = 0.0;
    return report;
  }

  const size_t half = count / 2;
  bool sound_all = true;
  bool cauchy_all = true;
  for (const auto& norm : fam.norms()) {
    double c_head = 0.0;  // fit over pairs among the first half of the sequence
    double c_all = 0.0;   // fit over the whole grid; this is what gets reported
    std::vector<double> tail_sup(count, 0.0);  // max distance over pairs with position >= k
    for (size_t i = 0; i < count; ++i) {
      for (size_t j = i + 1; j < count; ++j) {
        const double d = distance(i, j, norm);
        const double lambda = envelope_value(envelope, labels[i], labels[j]);
        report.evidence.push_back({labels[i], labels[j], norm.id, d, lambda});
        if (j < half || count < 4) c_head = std::max(c_head, d / lambda);
        c_all = std::max(c_all, d / lambda);
        for (size_t k = 0; k <= i; ++k) tail_sup[k] = std::max(tail_sup[k], d);
      }
    }
    // The reported constant dominates every evidence row by construction.
    // The envelope matches the actual decay when extending the fit from the
    // head of the sequence to the whole grid barely moves it.
    report.constants[norm.id] = c_all;
    sound_all = sound_all && c_all <= 4.0 * c_head + 1e-15;
    // decay of tail sup-distances
    const double d_first = tail_sup[0];
    const double d_last = tail_sup[half > 0 ? half : 0];
    cauchy_all = cauchy_all && (d_first <= 1e-12 || d_last <= 0.5 * d_first + 1e-15);
  }
  report.envelope_sound = sound_all;
  report.cauchy_evidence = cauchy_all;
  if (sound_all && cauchy_all) {
    report.kind = SequenceKind::MackeyCauchy;
  } else if (cauchy_all) {
    report.kind = SequenceKind::Cauchy;
  } else {
    report.kind = SequenceKind::Neither;
  }
  return report;
}

}  // namespace

SequenceReport classify_sequence(const std::vector<Curve>& seq, const SeminormFamily& fam,
                                 EnvelopeKind envelope, int grid_samples,
                                 std::vector<int> labels) {
  if (seq.empty()) throw ArgumentError("classify_sequence needs a nonempty sequence");
  for (const auto& c : seq) {
    if (std::abs(c.lo() - seq.front().lo()) > 1e-12 ||
        std::abs(c.hi() - seq.front().hi()) > 1e-12) {
      throw ArgumentError("sequence members need a common interval");
    }
  }
  const double lo = seq.front().lo(), len = seq.front().length();
  auto dist = [&](size_t i, size_t j, const Seminorm& norm) {
    double sup = 0.0;
    for (int s = 0; s <= grid_samples; ++s) {
      const double t = lo + len * s / grid_samples;
      sup = std::max(sup, norm(seq[i](t) - seq[j](t)));
    }
    return sup;
  };
  return classify_from_distances(seq.size(), fam, envelope, std::move(labels), dist);
}

SequenceReport classify_group_sequence(const std::vector<Mat>& seq, const LieContext& ctx,
                                       const SeminormFamily& fam, EnvelopeKind envelope,
                                       std::vector<int> labels) {
  if (seq.empty()) throw ArgumentError("classify_sequence needs a nonempty sequence");
  const Mat id = ctx.identity();
  auto dist = [&](size_t i, size_t j, const Seminorm& norm) {
    return norm(invert(seq[i]) * seq[j] - id);
  };
  return classify_from_distances(seq.size(), fam, envelope, std::move(labels), dist);
}

ConfinedReport confined_pipeline(const LieContext& ctx, const SeminormFamily& fam,
                                 const Curve& phi, bool lipschitz, int n_max,
                                 const std::string& v_id, const StepperConfig& cfg, uint64_t seed,
                                 const WitnessSearchOptions& wopts) {
  if (n_max < 1) throw ArgumentError("confined_pipeline needs n_max >= 1");
  ConfinedReport report;
  for (int n = 1; n <= n_max; n *= 2) report.ns.push_back(n);

  // Lipschitz constant: exact derivative sup when available, difference
  // quotients otherwise.
  const int grid = 256;
  const double len = phi.length();
  double lip = 0.0;
  if (phi.order() >= 1 && phi.breakpoints().empty()) {
    for (int i = 0; i <= grid; ++i) lip = std::max(lip, op_norm(phi.eval(phi.lo() + len * i / grid, 1)));
  } else {
    Mat prev = phi(phi.lo());
    for (int i = 1; i <= grid; ++i) {
      const Mat cur = phi(phi.lo() + len * i / grid);
      lip = std::max(lip, op_norm(cur - prev) / (len / grid));
      prev = cur;
    }
  }

  // Stage 1: uniform convergence within the modulus bound L len / n.
  std::vector<Curve> freezes;
  double last_dist = 0.0;
  bool within = true;
  for (int n : report.ns) {
    freezes.push_back(freeze_approximate(phi, n));
    double sup = 0.0;
    for (int i = 0; i <= 4 * grid; ++i) {
      const double t = phi.lo() + len * i / (4 * grid);
      sup = std::max(sup, op_norm(freezes.back()(t) - phi(t)));
    }
    const double bound = lip * len / n;
    within = within && sup <= bound * (1.0 + 1e-9) + 1e-12;
    last_dist = sup;
  }
  report.stages.push_back({"uniform-convergence", within, last_dist,
                           lip * len / report.ns.back()});

  // Stage 2: Cauchy / Mackey-Cauchy classification of the freeze sequence,
  // with the freeze parameters as envelope indices.
  const EnvelopeKind envelope = lipschitz ? EnvelopeKind::InvMin : EnvelopeKind::Pow2Min;
  report.classification = classify_sequence(freezes, fam, envelope, 64, report.ns);
  const bool class_ok = lipschitz
                            ? report.classification.kind == SequenceKind::MackeyCauchy
                            : report.classification.kind != SequenceKind::Neither;
  report.stages.push_back({"sequence-classification", class_ok,
                           static_cast<double>(static_cast<int>(report.classification.kind)),
                           0.0});

  // Stage 3: tameness from the single constricted constant on the sampled
  // image. Dyadic freeze values sit on the sample grid, so the node set
  // covers every member's image.
  std::vector<Mat> nodes;
  const int node_grid = std::max(64, n_max);
  for (int i = 0; i <= node_grid; ++i) nodes.push_back(phi(phi.lo() + len * i / node_grid));
  report.witness = constricted_constants(ctx, fam, v_id, nodes, seed, wopts);
  report.tame_constant = std::exp(len * report.witness.C);
  report.tame = tame_check_with(ctx, fam, freezes, v_id,
                                report.tame_constant * report.witness.w_multiplier, cfg);
  report.stages.push_back({"tameness", report.witness.certified && report.tame.certified,
                           report.tame.max_ratio,
                           report.tame_constant * report.witness.w_multiplier});

  report.pass = true;
  for (const auto& stage : report.stages) report.pass = report.pass && stage.pass;
  return report;
}

}  // namespace prodint
