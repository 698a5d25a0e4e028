#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "prodint/errors.hpp"
#include "prodint/lie_ops.hpp"
#include "prodint/quadrature.hpp"
#include "prodint/suite.hpp"

namespace {

namespace fs = std::filesystem;

// --context accepts a path, or a bare name resolved against
// PRODINT_CONTEXT_DIR, or a built-in context name.
prodint::LieContext resolve_context(const std::string& spec) {
  if (fs::exists(spec)) return prodint::load_context_file(spec);
  if (const char* dir = std::getenv("PRODINT_CONTEXT_DIR")) {
    const fs::path candidate = fs::path(dir) / (spec + ".json");
    if (fs::exists(candidate)) return prodint::load_context_file(candidate.string());
  }
  return prodint::context_by_name(spec);
}

prodint::ReportFormat parse_format(const std::string& fmt) {
  if (fmt == "csv") return prodint::ReportFormat::Csv;
  if (fmt == "jsonl") return prodint::ReportFormat::JsonLines;
  throw prodint::ArgumentError("unknown format: " + fmt + " (expected csv or jsonl)");
}

int run_suite_command(const std::string& context_spec, const std::string& suite, uint64_t seed,
                      double tol, bool tol_set, const std::string& out,
                      const std::string& format) {
  prodint::SuiteConfig cfg;
  cfg.context = resolve_context(context_spec);
  cfg.suite = suite;
  cfg.seed = seed;
  if (tol_set) cfg.tol_override = tol;
  cfg.out_path = out;
  cfg.format = parse_format(format);
  const prodint::SuiteResult result = prodint::run_suite(cfg);
  if (out.empty()) std::cout << prodint::format_rows(result.rows, cfg.format);
  int fails = 0, skips = 0;
  for (const auto& r : result.rows) {
    if (r.status == "fail") ++fails;
    if (r.status == "skip") ++skips;
  }
  std::fprintf(stderr, "suite %s on %s: %zu checks, %d failed, %d skipped\n", suite.c_str(),
               cfg.context->name().c_str(), result.rows.size(), fails, skips);
  return result.exit_status;
}

int run_study_command(const std::string& context_spec, const std::string& curve_path,
                      uint64_t seed, const std::string& out) {
  const prodint::LieContext ctx = resolve_context(context_spec);
  prodint::Rng rng(seed);
  prodint::Curve phi = curve_path.empty()
                           ? prodint::random_smooth_curve(rng, ctx, 0.0, 1.0, 1.0)
                           : prodint::load_curve_file(curve_path, ctx.dim());
  const std::string curve_id = curve_path.empty() ? "random-" + std::to_string(seed) : curve_path;
  Eigen::VectorXd coords(ctx.algebra_dim());
  for (int i = 0; i < ctx.algebra_dim(); ++i) coords(i) = rng.normal();
  const prodint::Mat y = ctx.from_coords(coords);

  prodint::StepperConfig cfg;
  cfg.method = prodint::StepMethod::CommutatorFree4;
  cfg.steps = 512;
  const auto rows = prodint::transport_study(ctx, phi, curve_id, y, {4, 8, 16, 32, 64}, cfg);
  const std::string body = prodint::format_study_csv(rows);
  if (out.empty()) {
    std::cout << body;
  } else {
    std::ofstream os(out);
    if (!os) throw prodint::ArgumentError("cannot open output path: " + out);
    os << body;
  }
  return 0;
}

int run_witness_command(const std::string& context_spec, const std::string& curve_path,
                        const std::string& v_id, uint64_t seed, const std::string& out) {
  const prodint::LieContext ctx = resolve_context(context_spec);
  const prodint::SeminormFamily fam = prodint::SeminormFamily::standard(ctx.dim());
  prodint::Rng rng(seed);
  prodint::Curve phi = curve_path.empty()
                           ? prodint::random_smooth_curve(rng, ctx, 0.0, 1.0, 1.0)
                           : prodint::load_curve_file(curve_path, ctx.dim());
  std::vector<prodint::Mat> nodes;
  for (int i = 0; i <= 64; ++i) nodes.push_back(phi(phi.lo() + phi.length() * i / 64.0));
  const prodint::EstimateWitness w =
      prodint::constricted_constants(ctx, fam, v_id, nodes, seed);
  if (out.empty()) {
    std::cout << prodint::witness_to_json(w);
  } else {
    prodint::save_witness_file(w, out);
  }
  std::fprintf(stderr, "witness on %s: certified=%d C=%g multiplier=%g\n", ctx.name().c_str(),
               w.certified ? 1 : 0, w.C, w.w_multiplier);
  return w.certified ? 0 : 1;
}

int run_evolve_command(const std::string& context_spec, const std::string& curve_path,
                       int steps, const std::string& method) {
  const prodint::LieContext ctx = resolve_context(context_spec);
  if (curve_path.empty()) throw prodint::ArgumentError("evolve needs --curve PATH");
  const prodint::Curve phi = prodint::load_curve_file(curve_path, ctx.dim());
  prodint::StepperConfig cfg;
  cfg.steps = steps;
  if (method == "midpoint") {
    cfg.method = prodint::StepMethod::ExponentialMidpoint;
  } else if (method == "cf4") {
    cfg.method = prodint::StepMethod::CommutatorFree4;
  } else if (method == "rk4") {
    cfg.method = prodint::StepMethod::ReferenceRK4;
  } else {
    throw prodint::ArgumentError("unknown method: " + method);
  }
  cfg.with_oracle_gap = true;
  const prodint::EvolveReport report = prodint::evolve(ctx, phi, phi.lo(), phi.hi(), cfg);
  std::cout << "result:\n" << report.result.matrix << "\n";
  std::cout << "steps_used: " << report.steps_used << "\n";
  std::cout << "defect: " << report.defect << "\n";
  if (report.oracle_gap) std::cout << "oracle_gap: " << *report.oracle_gap << "\n";
  std::cout << "membership_defect: " << ctx.membership_defect(report.result.matrix) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"product-integral laboratory for matrix Lie groups"};
  app.require_subcommand(1);

  std::string context_spec, out, format = "csv", curve_path, v_id = "op", method = "midpoint";
  std::string suite = "all";
  uint64_t seed = 0;
  double tol = 0.0;
  int steps = 256;

  auto* suite_cmd = app.add_subcommand("suite", "run a named check suite and emit report rows");
  suite_cmd->add_option("--context", context_spec, "context file, name in PRODINT_CONTEXT_DIR, or builtin")
      ->required();
  suite_cmd->add_option("--suite", suite, "identities|adjoint|estimates|composition|approx|all");
  auto* seed_opt = suite_cmd->add_option("--seed", seed, "RNG seed (required; suites are seeded)");
  seed_opt->required();
  auto* tol_opt = suite_cmd->add_option("--tol", tol, "override the identity-check tolerance");
  suite_cmd->add_option("--out", out, "report path (stdout when omitted)");
  suite_cmd->add_option("--format", format, "csv|jsonl");

  auto* study_cmd = app.add_subcommand("study", "transport-scheme convergence study (CSV)");
  study_cmd->add_option("--context", context_spec)->required();
  study_cmd->add_option("--curve", curve_path, "curve spec file (random when omitted)");
  study_cmd->add_option("--seed", seed)->required();
  study_cmd->add_option("--out", out);

  auto* witness_cmd = app.add_subcommand("witness", "certify constricted constants on a curve image");
  witness_cmd->add_option("--context", context_spec)->required();
  witness_cmd->add_option("--curve", curve_path);
  witness_cmd->add_option("--norm", v_id, "base seminorm id (op|fro|max)");
  witness_cmd->add_option("--seed", seed)->required();
  witness_cmd->add_option("--out", out, "witness file path");

  auto* evolve_cmd = app.add_subcommand("evolve", "product integral of a curve spec");
  evolve_cmd->add_option("--context", context_spec)->required();
  evolve_cmd->add_option("--curve", curve_path)->required();
  evolve_cmd->add_option("--steps", steps);
  evolve_cmd->add_option("--method", method, "midpoint|cf4|rk4");

  CLI11_PARSE(app, argc, argv);

  try {
    if (suite_cmd->parsed()) {
      return run_suite_command(context_spec, suite, seed, tol, tol_opt->count() > 0, out, format);
    }
    if (study_cmd->parsed()) return run_study_command(context_spec, curve_path, seed, out);
    if (witness_cmd->parsed()) return run_witness_command(context_spec, curve_path, v_id, seed, out);
    if (evolve_cmd->parsed()) return run_evolve_command(context_spec, curve_path, steps, method);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
