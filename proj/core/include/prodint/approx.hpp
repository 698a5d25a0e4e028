#pragma once

#include <map>
#include <string>
#include <vector>

#include "prodint/context.hpp"
#include "prodint/curve.hpp"
#include "prodint/estimates.hpp"
#include "prodint/seminorm.hpp"

namespace prodint {

enum class FreezeMode {
  ConstantHold,    // left-endpoint hold per panel (the default)
  ChartTransport,  // panel p carries phi(t_p) along the chart: phi(t_p)(1 + (t-t_p) phi(t_p))
};

/// Piecewise-smooth approximation on n uniform panels; uniform distance to
/// phi is governed by phi's modulus of continuity.
Curve freeze_approximate(const Curve& phi, int n, FreezeMode mode = FreezeMode::ConstantHold);

enum class SequenceKind { MackeyCauchy, Cauchy, Neither };
enum class EnvelopeKind { Pow2Min, InvMin };

std::string to_string(SequenceKind k);
std::string to_string(EnvelopeKind k);
double envelope_value(EnvelopeKind k, int m, int n);

struct EvidenceRow {
  int m;
  int n;
  std::string seminorm;
  double distance;
  double lambda;
};

struct SequenceReport {
  SequenceKind kind = SequenceKind::Neither;
  EnvelopeKind envelope = EnvelopeKind::Pow2Min;
  std::map<std::string, double> constants;  // fitted C_p per seminorm (index offsets
                                            // are circumvented by keeping lambda > 0)
  std::vector<EvidenceRow> evidence;
  bool envelope_sound = false;  // head-fitted constants dominate the full grid
  bool cauchy_evidence = false; // tail sup-distances decay on the evidence set
};

/// Pairwise sup-distances on the triangular index grid, smallest C_p fit for
/// the declared envelope, and the evidence-based classification. Members are
/// 1-indexed for the envelope unless labels (e.g. the freeze parameters n of
/// a dyadic subsequence) are supplied.
SequenceReport classify_sequence(const std::vector<Curve>& seq, const SeminormFamily& fam,
                                 EnvelopeKind envelope, int grid_samples = 64,
                                 std::vector<int> labels = {});

/// Group-element variant: distances are chart norms of g_m^{-1} g_n.
SequenceReport classify_group_sequence(const std::vector<Mat>& seq, const LieContext& ctx,
                                       const SeminormFamily& fam, EnvelopeKind envelope,
                                       std::vector<int> labels = {});

struct ConfinedStage {
  std::string stage;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct ConfinedReport {
  std::vector<int> ns;
  std::vector<ConfinedStage> stages;
  EstimateWitness witness;     // constricted witness on the sampled curve image
  double tame_constant = 0.0;  // exp(|r'-r| C_v), the pinned tame multiplier
  TameReport tame;
  SequenceReport classification;
  bool pass = false;
};

/// Builds freeze approximations for dyadic n up to n_max and certifies
/// (i) uniform convergence within the modulus bound, (ii) the Cauchy /
/// Mackey-Cauchy property of the sequence (envelope 1/min(m,n) in the
/// Lipschitz case), (iii) tameness under the single transport bound constant
/// derived from a constricted witness on the sampled curve image.
ConfinedReport confined_pipeline(const LieContext& ctx, const SeminormFamily& fam,
                                 const Curve& phi, bool lipschitz, int n_max,
                                 const std::string& v_id, const StepperConfig& cfg, uint64_t seed,
                                 const WitnessSearchOptions& wopts = {});

}  // namespace prodint
