// Copyright 2026 The revquant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// revquant: reversal of quantum channels from the command line.
//
// Exit codes: 0 success, 1 suite failure or violated invariant, 2 bad input.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revquant/bounds.hpp"
#include "revquant/fidelities.hpp"
#include "revquant/json_io.hpp"
#include "revquant/pgm.hpp"
#include "revquant/reversal.hpp"
#include "revquant/suites.hpp"

namespace {

using namespace revquant;

constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

/// Failure detected after the input was accepted.
class InvariantError : public Error {
 public:
  using Error::Error;
};

struct Instance {
  std::optional<KrausChannel> channel;
  std::optional<Ensemble> ensemble;
};

Instance load_instance(const std::string& path) {
  const Json j = load_json_file(path);
  Instance inst;
  try {
    if (j.contains("channel")) inst.channel = channel_from_json(j.at("channel"));
    if (j.contains("ensemble")) inst.ensemble = ensemble_from_json(j.at("ensemble"));
  } catch (const InputError&) {
    throw;
  } catch (const Error& ex) {
    throw InputError(path + ": " + ex.what());
  }
  return inst;
}

void emit(const Json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw InputError("cannot open output file: " + out);
  f << j.dump(2) << "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// --- reverse -------------------------------------------------------------------

struct ReverseArgs {
  std::string in;
  std::string rho = "average";
  std::string out;
  double tol = 1.0;
};

DensityMatrix select_state(const Ensemble& e, const std::string& selector) {
  if (selector == "average") return e.average();
  std::size_t k = 0;
  try {
    std::size_t used = 0;
    k = std::stoul(selector, &used);
    if (used != selector.size()) throw std::invalid_argument(selector);
  } catch (const std::exception&) {
    throw InputError("--rho must be \"average\" or a member index, got \"" + selector + "\"");
  }
  if (k >= e.size()) throw InputError("--rho index " + selector + " out of range");
  return e[k].rho;
}

int cmd_reverse(const ReverseArgs& args) {
  const auto inst = load_instance(args.in);
  if (!inst.channel) throw InputError(args.in + ": missing \"channel\"");
  if (!inst.ensemble) throw InputError(args.in + ": missing \"ensemble\"");
  const auto& a = *inst.channel;
  const auto& e = *inst.ensemble;
  if (!a.trace_preserving()) throw InputError(args.in + ": channel must be trace-preserving");
  if (e.dim() != a.d_in()) throw InputError(args.in + ": ensemble dimension does not match channel input");
  const DensityMatrix rho = select_state(e, args.rho);

  ReversalOptions opts;
  opts.tol = kPsdTolerance * args.tol;
  const auto r = near_optimal_reversal(a, rho, opts);
  if (r.support_tp_defect > 1e-8 * args.tol) {
    throw InvariantError("invariant violated: reversal not trace-preserving on supp(A(rho)), defect " +
                         std::to_string(r.support_tp_defect));
  }
  const auto fixed = compose(r.channel, a);

  Json report;
  report["reversal"] = channel_to_json(r.channel);
  report["support_projector_output"] = matrix_to_json(r.support_in);
  report["support_projector_input"] = matrix_to_json(r.support_out);
  report["completion_used"] = r.completion_used;
  report["support_tp_defect"] = r.support_tp_defect;
  report["ensemble_commuting"] = e.commuting();
  report["rho"] = args.rho;
  report["fe_after"] = entanglement_fidelity(rho, fixed);
  report["avg_fe_after"] = avg_entanglement_fidelity(e, fixed);
  if (a.square()) {
    report["fe_before"] = entanglement_fidelity(rho, a);
    report["avg_fe_before"] = avg_entanglement_fidelity(e, a);
  } else {
    report["fe_before"] = nullptr;
    report["avg_fe_before"] = nullptr;
  }
  emit(report, args.out);
  return 0;
}

// --- pgm -----------------------------------------------------------------------

struct PgmArgs {
  std::string in;
  std::string out;
};

int cmd_pgm(const PgmArgs& args) {
  const auto inst = load_instance(args.in);
  if (!inst.ensemble) throw InputError(args.in + ": missing \"ensemble\"");
  const LabeledEnsemble e(*inst.ensemble);
  const auto povm = pgm_povm(e);
  const auto a = classicizing_channel(e);
  const auto r = near_optimal_reversal(a, e.label_state());
  const int n = e.n_labels();
  const double reversal_fcl =
      classical_fidelity(e.label_state(), compose(r.channel, a), Matrix(Matrix::Identity(n, n)));

  Json povm_json = Json::array();
  for (const auto& x : povm.elements) povm_json.push_back(matrix_to_json(x));
  Json report;
  report["labels"] = n;
  report["dim"] = e.dim();
  report["pgm"] = povm_json;
  report["completeness_defect"] = povm.completeness_defect();
  report["discrimination_success"] = discrimination_success(e, povm);
  report["pgm_fcl_value"] = pgm_fcl_value(e);
  report["reversal_fcl"] = reversal_fcl;
  report["bures_lower_bound"] = bures_lower_bound(e);
  report["error_probability_bound"] = error_probability_bound(e);
  report["normalization_identity_residual"] = normalization_identity_residual(e);
  report["classicizing_channel"] = channel_to_json(a);
  report["reversal"] = channel_to_json(r.channel);
  emit(report, args.out);
  return 0;
}

// --- suite ---------------------------------------------------------------------

struct SuiteArgs {
  std::string name;
  std::uint64_t seed = 1;
  int trials = -1;
  std::vector<int> dims = {2, 3, 4};
  double tol = 1.0;
  std::string out;
  std::string summary;
};

int cmd_suite(const SuiteArgs& args) {
  SuiteConfig cfg;
  cfg.seed = args.seed;
  cfg.trials = args.trials;
  cfg.dims = args.dims;
  cfg.tol_scale = args.tol;
  const auto result = run_suite(args.name, cfg);

  const bool csv_to_stdout = args.out.empty() || args.out == "-";
  if (csv_to_stdout) {
    write_csv(std::cout, result);
  } else {
    std::ofstream f(args.out);
    if (!f) throw InputError("cannot open output file: " + args.out);
    write_csv(f, result);
  }

  Json summary;
  summary["suite"] = result.name;
  summary["trials"] = result.rows.size();
  summary["passed"] = result.passed;
  summary["failed"] = static_cast<int>(result.rows.size()) - result.passed;
  summary["no_trials"] = result.no_trials();
  summary["all_pass"] = result.all_pass();
  if (result.no_trials()) {
    summary["worst_margin"] = nullptr;
    summary["worst_trial"] = nullptr;
  } else {
    summary["worst_margin"] = result.worst_margin;
    summary["worst_trial"] = result.worst_trial;
  }
  summary["seed"] = args.seed;
  summary["dims"] = args.dims;
  summary["tol_scale"] = args.tol;
  summary["metadata"] = {{"timestamp", utc_timestamp()}, {"threads", suite_detail::thread_count(cfg)}};
  if (!args.summary.empty()) {
    emit(summary, args.summary);
  } else {
    (csv_to_stdout ? std::cerr : std::cout) << summary.dump(2) << "\n";
  }
  return result.all_pass() ? 0 : kExitFailure;
}

// --- gen -----------------------------------------------------------------------

struct GenArgs {
  std::string kind = "instance";
  std::uint64_t seed = 1;
  std::vector<int> dims = {2};
  int rank = 0;
  int members = 2;
  bool commuting = false;
  std::string out;
};

int cmd_gen(const GenArgs& args) {
  if (args.dims.empty() || args.dims.front() < 1) throw InputError("--dims must name a positive dimension");
  if (args.members < 1) throw InputError("--members must be positive");
  const int d = args.dims.front();
  Rng rng(args.seed);
  const int rank = args.rank > 0 ? args.rank : rng.between(1, d * d);
  Json out;
  if (args.kind == "channel" || args.kind == "instance") {
    out["channel"] = channel_to_json(random_channel(d, d, rank, rng.next_u64()));
  }
  if (args.kind == "ensemble" || args.kind == "instance" || args.kind == "labeled") {
    const Ensemble e = args.commuting ? random_commuting_ensemble(d, args.members, rng)
                                      : suite_detail::random_ensemble(d, args.members, rng);
    out["ensemble"] = ensemble_to_json(e, args.kind == "labeled");
  }
  if (out.empty()) throw InputError("--kind must be one of channel, ensemble, instance, labeled");
  emit(out, args.out);
  return 0;
}

std::string suite_help() {
  std::ostringstream os;
  os << "Suites and their CSV columns (17 significant digits; a row passes iff margin >= 0):\n";
  for (const auto& s : suite_catalog()) {
    os << "  " << s.name << " (default " << s.default_trials << " trials): " << s.description << "\n    ";
    const auto cols = suite_columns(s);
    for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
    os << "\n";
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-optimal reversal of quantum channels: reversal maps, fidelities, pretty good measurements"};
  app.require_subcommand(1);

  ReverseArgs rev;
  auto* reverse = app.add_subcommand("reverse", "Build the reversal of an instance's channel and report fidelities");
  reverse->add_option("--in,instance", rev.in, "Instance JSON with \"channel\" and \"ensemble\"")->required();
  reverse->add_option("--rho", rev.rho, "\"average\" (default) or a member index");
  reverse->add_option("--tol", rev.tol, "Scale factor for all tolerances")->check(CLI::PositiveNumber);
  reverse->add_option("--out", rev.out, "Output JSON path (default stdout)");

  PgmArgs pg;
  auto* pgm = app.add_subcommand("pgm", "Pretty good measurement, classicizing reversal and bounds for an ensemble");
  pgm->add_option("--in,instance", pg.in, "Instance JSON with a labeled \"ensemble\"")->required();
  pgm->add_option("--out", pg.out, "Output JSON path (default stdout)");

  SuiteArgs su;
  std::vector<std::string> names;
  for (const auto& s : suite_catalog()) names.push_back(s.name);
  for (const auto& a : suite_aliases()) names.push_back(a.first);
  auto* suite = app.add_subcommand("suite", "Run a seeded property suite");
  suite->footer(suite_help());
  suite->add_option("name", su.name, "Suite name")->required()->check(CLI::IsMember(names));
  suite->add_option("--seed", su.seed, "Master seed");
  suite->add_option("--trials", su.trials, "Number of trials (default per suite)")->check(CLI::NonNegativeNumber);
  suite->add_option("--dims", su.dims, "Dimensions to draw from")->delimiter(',');
  suite->add_option("--tol", su.tol, "Scale factor for all tolerances")->check(CLI::PositiveNumber);
  suite->add_option("--out", su.out, "CSV path (default stdout; summary then goes to stderr)");
  suite->add_option("--summary", su.summary, "JSON summary path");

  GenArgs ge;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--kind", ge.kind, "channel, ensemble, instance or labeled")
      ->check(CLI::IsMember({"channel", "ensemble", "instance", "labeled"}));
  gen->add_option("--seed", ge.seed, "Seed");
  gen->add_option("--dims", ge.dims, "Dimension (first entry used)")->delimiter(',');
  gen->add_option("--rank", ge.rank, "Kraus rank (default random)");
  gen->add_option("--members", ge.members, "Ensemble size");
  gen->add_flag("--commuting", ge.commuting, "Draw members from a shared eigenbasis");
  gen->add_option("--out", ge.out, "Output JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*reverse) return cmd_reverse(rev);
    if (*pgm) return cmd_pgm(pg);
    if (*suite) return cmd_suite(su);
    if (*gen) return cmd_gen(ge);
  } catch (const InputError& ex) {
    std::cerr << "revquant: " << ex.what() << "\n";
    return kExitInput;
  } catch (const std::exception& ex) {
    std::cerr << "revquant: " << ex.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
