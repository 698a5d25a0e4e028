#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prodint/context.hpp"
#include "prodint/curve.hpp"
#include "prodint/estimates.hpp"
#include "prodint/evolve.hpp"
#include "prodint/seminorm.hpp"

namespace prodint {

/// Ordered family phi_1 ... phi_n on a common interval.
struct CurveStack {
  std::vector<Curve> curves;

  int size() const { return static_cast<int>(curves.size()); }
  double lo() const { return curves.front().lo(); }
  double hi() const { return curves.front().hi(); }
  void validate() const;
};

/// The single curve whose product integral equals the ordered product
/// evolve(phi_n) ... evolve(phi_1):
///   chi(t) = phi_n(t) + sum_p (Ad_{phi_n} o ... o Ad_{phi_{p+1}})(phi_p(t)),
/// where each Ad factor conjugates along the trajectory of its curve.
/// Derivatives are evaluated by expanding the transport product rule term by
/// term (the bracket/Ad word algebra), so high orders are trustworthy up to
/// trajectory precision.
Curve chi_compose(const LieContext& ctx, const CurveStack& stack, const StepperConfig& cfg = {});

/// chi_p on [0, 1/n]  |->  phi_p(t) = 1/n chi_p(t/n) on [0, 1].
CurveStack rescale_stack(const LieContext& ctx, const CurveStack& chis);

/// n (n+1) ... (n+k): the term-count ceiling for the k-th derivative of an
/// n-fold composition.
std::uint64_t term_count(int n, int k);

struct ChiBoundReport {
  bool skipped = false;
  std::string skip_reason;
  int n = 0;
  int q = 0;
  double measured = 0.0;   // v-sup of chi derivatives through order q
  double bound = 0.0;      // e (n+1)...(n+q) / n^q
  double max_ratio = 0.0;  // measured / bound
  bool pass = false;
};

/// Factorial sup-norm bound: for chi_1..chi_n on [0, 1/n] with
/// w-sup-norms <= 1 through order q (w = witness multiplier times v), the
/// composed curve satisfies v_inf^q(chi) <= e (n+1)...(n+q)/n^q. A violated
/// sup-norm precondition yields a skipped report, not a failure.
ChiBoundReport chi_sup_bound_check(const LieContext& ctx, const SeminormFamily& fam,
                                   const EstimateWitness& witness, const CurveStack& chis, int q,
                                   const StepperConfig& cfg = {}, int t_samples = 17);

struct SubdivisionResult {
  int m = 0;
  bool certified = false;
  double panel_chart_sup = 0.0;  // max over panels of the measured chart norm
  double per_panel_bound = 0.0;  // panel length times the curve sup-norm
};

/// Doubles m until every panel trajectory stays inside the chart with
/// chart norm at most min(1, chart_radius), certified against the
/// panel-length times sup-norm stopping bound.
SubdivisionResult subdivide_for_chart_bound(const LieContext& ctx, const Seminorm& m_norm,
                                            const Curve& phi, const StepperConfig& cfg = {},
                                            int m_cap = 1 << 20);
SubdivisionResult subdivide_for_chart_bound(const LieContext& ctx, const SeminormFamily& fam,
                                            const std::string& m_id, const Curve& phi,
                                            const StepperConfig& cfg = {}, int m_cap = 1 << 20);

struct StageCert {
  std::string stage;
  double claimed = 0.0;
  double measured = 0.0;
  bool pass = false;
};

struct PipelineReport {
  bool skipped = false;
  std::string skip_reason;
  std::vector<StageCert> stages;
  bool pass = false;
  int subdivisions = 0;
};

/// Desk-scale run of the continuity argument for one curve on [0, 1] with
/// m-norm at most 1: subdivide until panels stay in the chart, replace each
/// panel integral by the straight chart line with the same endpoint, bound
/// the line curves' derivative sup-norms, collapse the panel product into a
/// single composed curve, check the factorial bound, and confirm the final
/// chart norm of the full integral. Chart lines leave embedded subgroups, so
/// those stages run in the ambient context.
PipelineReport continuity_pipeline(const LieContext& ctx, const SeminormFamily& fam,
                                   const std::string& p_id, const Curve& phi,
                                   const StepperConfig& cfg = {}, int q_bar = 2);

}  // namespace prodint
