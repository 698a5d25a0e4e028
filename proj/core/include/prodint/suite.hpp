#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prodint/adjoint.hpp"
#include "prodint/approx.hpp"
#include "prodint/composition.hpp"
#include "prodint/context.hpp"
#include "prodint/estimates.hpp"
#include "prodint/evolve.hpp"
#include "prodint/seminorm.hpp"

namespace prodint {

enum class ReportFormat { Csv, JsonLines };

struct SuiteConfig {
  std::string context_path;              // JSON context file
  std::optional<LieContext> context;     // alternative: pass the context directly
  std::string suite = "all";             // identities|adjoint|estimates|composition|approx|all
  uint64_t seed = 0;
  std::optional<double> tol_override;    // overrides the identity-check tolerance
  std::string out_path;                  // empty: rows are only returned
  ReportFormat format = ReportFormat::Csv;
};

/// One check row. `status` is pass/fail/skip; skip marks checks whose
/// preconditions did not hold (they do not fail the run). For >=-style
/// checks ratio is bound/measured so that ratio <= 1 always means pass.
struct SuiteRow {
  std::string suite;
  std::string check_id;
  std::string anchor;  // the identity or bound the check exercises
  double n = 0.0;      // size parameter (sample count, subdivisions, ...)
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  std::string status;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  int exit_status = 0;  // 0: all pass, 1: failures present
};

/// Runs the named suite deterministically under the seed and, when out_path
/// is set, writes the report (no timestamps, so identical configs produce
/// byte-identical bodies). Config problems throw; check failures are rows.
SuiteResult run_suite(const SuiteConfig& cfg);

std::string format_rows(const std::vector<SuiteRow>& rows, ReportFormat format);

/// Per-suite entry points (the CLI goes through run_suite; tests call these).
std::vector<SuiteRow> suite_identities(const LieContext& ctx, uint64_t seed,
                                       std::optional<double> tol = std::nullopt);
std::vector<SuiteRow> suite_adjoint(const LieContext& ctx, uint64_t seed);
std::vector<SuiteRow> suite_estimates(const LieContext& ctx, uint64_t seed);
std::vector<SuiteRow> suite_composition(const LieContext& ctx, uint64_t seed);
std::vector<SuiteRow> suite_approx(const LieContext& ctx, uint64_t seed);

/// Transport-scheme convergence study rows for the CSV export.
struct StudyRow {
  std::string context;
  std::string curve_id;
  int n = 0;
  double sup_node_error = 0.0;
  double defect_head = 0.0;  // frozen-coefficient defect component
  double defect_tail = 0.0;  // series-truncation component
};

std::vector<StudyRow> transport_study(const LieContext& ctx, const Curve& phi,
                                      const std::string& curve_id, const Mat& y,
                                      const std::vector<int>& ns, const StepperConfig& cfg = {});

std::string format_study_csv(const std::vector<StudyRow>& rows);

}  // namespace prodint
