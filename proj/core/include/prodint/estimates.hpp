#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prodint/context.hpp"
#include "prodint/curve.hpp"
#include "prodint/evolve.hpp"
#include "prodint/matrix.hpp"
#include "prodint/seminorm.hpp"

namespace prodint {

enum class WitnessKind { Asymptotic, Constricted };

struct ChainSampleLog {
  uint64_t seed = 0;
  int depth_max = 0;
  int basis_depth = 0;
  int samples_per_depth = 0;
  size_t total_chains = 0;
};

/// Certified domination of iterated bracket operators. For asymptotic
/// witnesses the inequality is
///   v(ad_{X1}..ad_{Xn}(Y)) <= (c v)(X1) ... (c v)(Xn) . (c v)(Y)
/// with c = w_multiplier; for constricted witnesses it is
///   v(ad_{X1}..ad_{Xn}(Y)) <= C^n . (w_multiplier v)(Y),  Xi in compact_nodes.
struct EstimateWitness {
  WitnessKind kind = WitnessKind::Asymptotic;
  std::string context;
  std::string v_id;
  double w_multiplier = 1.0;
  double C = 0.0;
  bool certified = false;
  double max_slack = 0.0;  // max lhs/rhs over the sample set (<= 1 when certified)
  std::string failure_note;
  ChainSampleLog log;
  std::vector<Mat> compact_nodes;
};

struct WitnessSearchOptions {
  int depth_max = 6;
  int samples_per_depth = 1000;
  int basis_depth = 3;             // exhaustive basis/node tuples through this depth
  double multiplier_cap = 1024.0;  // search grid {1, 2, 4, ..., cap}
  size_t exhaustive_cap = 20000;   // skip exhaustive enumeration beyond this many tuples
};

/// Smallest multiplier c on the dyadic grid such that w = c v dominates all
/// sampled ad-chains multiplicatively. Search failure is returned as an
/// uncertified witness flagging the deepest violating chain, not thrown.
EstimateWitness asymptotic_witness(const LieContext& ctx, const SeminormFamily& fam,
                                   const std::string& v_id, uint64_t seed,
                                   const WitnessSearchOptions& opts = {});

/// Does the pinned multiplier certify on the same deterministic sample set?
bool certify_asymptotic(const LieContext& ctx, const SeminormFamily& fam, const std::string& v_id,
                        double multiplier, uint64_t seed, const WitnessSearchOptions& opts = {},
                        double* max_slack = nullptr);

/// Smallest constant C on a dyadic grid around 2 max ||X||_op such that
/// chains drawn from the compact node set are dominated by C^n w. The
/// returned witness is what duhamel_series and the transport bounds consume.
EstimateWitness constricted_constants(const LieContext& ctx, const SeminormFamily& fam,
                                      const std::string& v_id,
                                      const std::vector<Mat>& compact_nodes, uint64_t seed,
                                      const WitnessSearchOptions& opts = {});

struct BoundCheckReport {
  double max_ratio = 0.0;  // measured / bound, over all samples
  size_t samples = 0;
  bool pass = false;
  double bound_factor = 0.0;  // exp(|interval| C) w_multiplier
};

/// Checks v(Ad_{[evolve(phi)|_r^t]^{-1}}(Y)) <= exp(|r'-r| C) w(Y) at the
/// sampled (t, Y). The witness must cover the curve image (its node set's
/// sup-norm is the checked guard).
BoundCheckReport transport_bound_check(const LieContext& ctx, const SeminormFamily& fam,
                                       const EstimateWitness& witness, const Curve& phi,
                                       const std::vector<Mat>& ys, const std::vector<double>& ts,
                                       const StepperConfig& cfg = {});

struct MuConvexityReport {
  std::string u_id;
  double o_multiplier = 0.0;  // o = multiplier u
  bool certified = false;
  std::vector<int> word_lengths;
  double max_ratio = 0.0;  // (u o Xi)(word) / sum o(X_i), at the certified multiplier
  int shrink_events = 0;
  uint64_t seed = 0;
};

/// Searches o = c u over the dyadic grid: for every sampled word with
/// sum o(X_i) <= 1, the chart norm of the word product must be dominated by
/// that sum. Words are products of near-identity group elements.
MuConvexityReport mu_convexity_check(const LieContext& ctx, const SeminormFamily& fam,
                                     const std::string& u_id,
                                     const std::vector<int>& word_lengths, int budget_samples,
                                     uint64_t seed, double multiplier_cap = 1024.0);

struct TameReport {
  std::string v_id;
  double w_multiplier = 0.0;
  bool certified = false;
  double max_ratio = 0.0;
  std::vector<std::pair<int, double>> ratios;  // per sequence member
  double cap = 0.0;
};

/// Finds a single scalar multiple w = c v with
/// v(Ad_{[evolve(phi_n)|_r^t]^{-1}}(Y)) <= w(Y) across the whole sequence;
/// failure (cap exceeded) is reported as data with the per-member ratios.
TameReport tame_check(const LieContext& ctx, const SeminormFamily& fam,
                      const std::vector<Curve>& curves, const std::string& v_id,
                      const StepperConfig& cfg = {}, int t_samples = 9, int y_samples = 6,
                      uint64_t seed = 1234, double multiplier_cap = static_cast<double>(1 << 20));

/// Same measurement with a pinned multiplier (the exp(|r'-r| C_v) constant
/// handed over by the confined pipeline).
TameReport tame_check_with(const LieContext& ctx, const SeminormFamily& fam,
                           const std::vector<Curve>& curves, const std::string& v_id,
                           double w_multiplier, const StepperConfig& cfg = {}, int t_samples = 9,
                           int y_samples = 6, uint64_t seed = 1234);

/// Witness files: everything needed to reproduce the certification run
/// (seed included) plus the constants downstream modules reuse.
std::string witness_to_json(const EstimateWitness& w);
EstimateWitness witness_from_json(const std::string& text, int dim);
void save_witness_file(const EstimateWitness& w, const std::string& path);
EstimateWitness load_witness_file(const std::string& path, int dim);

}  // namespace prodint
