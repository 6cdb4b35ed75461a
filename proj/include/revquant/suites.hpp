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

#pragma once

// Seeded property suites. Every trial draws from its own stream
// derive_seed(seed, trial), so results do not depend on scheduling. A row's
// margin is the slack of its weakest check: the row passes iff margin >= 0.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "revquant/bounds.hpp"
#include "revquant/channels.hpp"
#include "revquant/fidelities.hpp"
#include "revquant/optimizer.hpp"
#include "revquant/pgm.hpp"
#include "revquant/reversal.hpp"

namespace revquant {

struct SuiteConfig {
  std::uint64_t seed = 1;
  int trials = -1;  // -1 selects the suite default
  std::vector<int> dims = {2, 3, 4};
  /// Multiplies every tolerance of the suite.
  double tol_scale = 1.0;
  /// 0 reads REVQUANT_THREADS, falling back to the hardware concurrency.
  int threads = 0;
};

struct SuiteRow {
  int trial = 0;
  std::vector<std::string> cells;
  double margin = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::string name;
  std::vector<std::string> columns;
  std::vector<SuiteRow> rows;
  int passed = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  int worst_trial = -1;

  bool no_trials() const { return rows.empty(); }
  bool all_pass() const { return passed == static_cast<int>(rows.size()); }
};

struct SuiteInfo {
  std::string name;
  int default_trials;
  std::vector<std::string> columns;
  std::string description;
};

namespace suite_detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt(std::uint64_t x) { return std::to_string(x); }
inline std::string fmt(int x) { return std::to_string(x); }

class RowBuilder {
 public:
  RowBuilder(int trial, std::uint64_t seed) {
    row_.trial = trial;
    row_.cells = {fmt(trial), fmt(seed)};
  }
  template <typename T>
  RowBuilder& add(T x) {
    row_.cells.push_back(fmt(x));
    return *this;
  }
  SuiteRow finish(double margin) {
    row_.margin = margin;
    row_.pass = margin >= 0.0;
    row_.cells.push_back(fmt(margin));
    row_.cells.push_back(row_.pass ? "1" : "0");
    return std::move(row_);
  }

 private:
  SuiteRow row_;
};

inline int pick_dim(const SuiteConfig& cfg, Rng& rng, int cap = 1 << 20) {
  if (cfg.dims.empty()) throw Error("suite: empty dimension list");
  const int d = cfg.dims[static_cast<std::size_t>(rng.below(cfg.dims.size()))];
  if (d < 1) throw Error("suite: dimensions must be positive");
  return std::min(d, cap);
}

inline Ensemble random_ensemble(int d, int n, Rng& rng) {
  const auto p = random_simplex(n, rng);
  std::vector<EnsembleMember> members;
  for (int i = 0; i < n; ++i) {
    members.push_back({p[static_cast<std::size_t>(i)], random_density_matrix(d, rng.between(1, d), rng)});
  }
  return Ensemble(std::move(members));
}

inline LabeledEnsemble random_labeled(int d, int n, Rng& rng) { return LabeledEnsemble(random_ensemble(d, n, rng)); }

inline KrausChannel random_square_channel(int d, Rng& rng) {
  return random_channel(d, d, rng.between(1, d * d), rng.next_u64());
}

/// Largest f^2 over the adversaries of the square-bound checks: seeded
/// random channels, the identity, and every candidate the optimizer evaluates.
struct AdversaryScan {
  double worst_sq = 0.0;
  int count = 0;

  void see(double f) {
    worst_sq = std::max(worst_sq, f * f);
    ++count;
  }
};

inline AdversaryScan scan_adversaries(const KrausChannel& a, const Ensemble& e, Rng& rng, int n_random,
                                      const OptimizerOptions& opts) {
  AdversaryScan scan;
  const int d = a.d_in();
  for (int k = 0; k < n_random; ++k) scan.see(avg_entanglement_fidelity(e, compose(random_square_channel(d, rng), a)));
  scan.see(avg_entanglement_fidelity(e, compose(identity_completion(a.d_out(), d), a)));
  optimize_reversal(a, e, rng.next_u64(), opts, [&](const KrausChannel&, double f) { scan.see(f); });
  return scan;
}

inline OptimizerOptions adversary_options() {
  OptimizerOptions opts;
  opts.budget = 150;
  opts.restarts = 2;
  return opts;
}

// --- suites ---------------------------------------------------------------------

inline SuiteRow square_bound(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int d = pick_dim(cfg, rng);
  const int rank = rng.between(1, d * d);
  const auto a = random_channel(d, d, rank, rng.next_u64());
  const int n = rng.between(1, 3);
  const auto e = random_commuting_ensemble(d, n, rng, rng.below(3) == 0);
  const double best = avg_entanglement_fidelity(e, compose(near_optimal_reversal(a, e).channel, a));
  const auto scan = scan_adversaries(a, e, rng, 4, adversary_options());
  const double tol = 1e-8 * cfg.tol_scale;
  return RowBuilder(trial, seed)
      .add(d)
      .add(rank)
      .add(n)
      .add(best)
      .add(scan.worst_sq)
      .add(scan.count)
      .finish(best + tol - scan.worst_sq);
}

inline SuiteRow single_state_bound(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int d = pick_dim(cfg, rng);
  const int rank = rng.between(1, d * d);
  const auto a = random_channel(d, d, rank, rng.next_u64());
  const auto rho = random_density_matrix(d, rng.between(1, d), rng);
  const auto r = near_optimal_reversal(a, rho).channel;
  const double tol = 1e-8 * cfg.tol_scale;

  // Single-member ensemble: entanglement fidelity.
  const auto single = Ensemble::single(rho);
  const double best_e = entanglement_fidelity(rho, compose(r, a));
  const auto scan_e = scan_adversaries(a, single, rng, 4, adversary_options());

  // Eigen-ensemble: classical fidelity in the basis hermitian_eig fixes.
  const auto eig = eigen_ensemble(rho);
  const double best_cl = classical_fidelity(rho, compose(r, a));
  const auto scan_cl = scan_adversaries(a, eig, rng, 4, adversary_options());

  return RowBuilder(trial, seed)
      .add(d)
      .add(rank)
      .add(best_e)
      .add(scan_e.worst_sq)
      .add(best_cl)
      .add(scan_cl.worst_sq)
      .finish(std::min(best_e + tol - scan_e.worst_sq, best_cl + tol - scan_cl.worst_sq));
}

inline SuiteRow decomposition(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int d = pick_dim(cfg, rng);
  const int rank = rng.between(1, d * d);
  const auto a = random_channel(d, d, rank, rng.next_u64());
  const auto rho = random_density_matrix(d, rng.between(1, d), rng);
  const int pad = rng.between(0, 3);
  const double tol = 1e-9 * cfg.tol_scale;
  const auto report = reversal_is_decomposition_independent(a, rho, rng.next_u64(), pad, tol);
  return RowBuilder(trial, seed).add(d).add(rank).add(pad).add(report.distance).finish(tol - report.distance);
}

inline SuiteRow perfect_code(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int c = rng.between(1, 3);
  const int n = rng.between(1, 3);
  const int d = c * n + rng.between(0, 2);
  const auto code = make_reversible_code_channel(d, c, n, random_simplex(n, rng), rng.next_u64());
  const DensityMatrix rho(code.code_projector / static_cast<double>(c));
  const double f = entanglement_fidelity(rho, compose(near_optimal_reversal(code.channel, rho).channel, code.channel));
  const double tol = 1e-9 * cfg.tol_scale;
  return RowBuilder(trial, seed).add(d).add(c).add(n).add(f).finish(f - (1.0 - tol));
}

inline SuiteRow tripartite_oracle(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int d = pick_dim(cfg, rng, 3);
  const int n = rng.between(1, 3);
  const int rank = rng.between(1, d * d);
  const auto c = random_channel(d, d, rank, rng.next_u64());
  const auto e = random_ensemble(d, n, rng);
  const double kraus = avg_entanglement_fidelity(e, c);
  const double classical = avg_fidelity_rqs_oracle(e, c, {RqsCorrelation::kClassical, false});
  const double entangled = avg_fidelity_rqs_oracle(e, c, {RqsCorrelation::kEntangled, false});
  const double diff = std::max(std::abs(kraus - classical), std::abs(kraus - entangled));
  const double tol = 1e-9 * cfg.tol_scale;
  return RowBuilder(trial, seed)
      .add(d)
      .add(n)
      .add(rank)
      .add(kraus)
      .add(classical)
      .add(entangled)
      .finish(tol - diff);
}

inline SuiteRow pgm(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int d = pick_dim(cfg, rng);
  const int n = rng.between(1, 4);
  const auto e = random_labeled(d, n, rng);
  const auto povm = pgm_povm(e);
  const auto reversal = classicizing_reversal(e);
  const auto grouped = grouped_effects(reversal, n);
  double coarse = 0.0;
  for (int j = 0; j < n; ++j) {
    coarse = std::max(coarse, (grouped[static_cast<std::size_t>(j)] - povm.elements[static_cast<std::size_t>(j)]).norm());
  }
  const double completeness = povm.completeness_defect();
  const auto general = near_optimal_reversal(classicizing_channel(e), e.label_state(), {false, kPsdTolerance});
  const double eq_distance = choi_distance(general.channel, reversal.channel);

  // Linearly independent pure states: at most d of them.
  const int m = rng.between(1, d);
  const auto p = random_simplex(m, rng);
  std::vector<EnsembleMember> pure;
  for (int j = 0; j < m; ++j) pure.push_back({p[static_cast<std::size_t>(j)], random_pure_state(d, rng)});
  double projective = 0.0;
  for (const auto& x : pgm_povm(LabeledEnsemble(Ensemble(std::move(pure)))).elements) {
    projective = std::max(projective, (x * x - x).norm());
  }
  const double s = cfg.tol_scale;
  return RowBuilder(trial, seed)
      .add(d)
      .add(n)
      .add(coarse)
      .add(completeness)
      .add(eq_distance)
      .add(m)
      .add(projective)
      .finish(std::min({1e-9 * s - coarse, 1e-8 * s - completeness, 1e-9 * s - eq_distance, 1e-8 * s - projective}));
}

inline SuiteRow bures_bound(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int d = pick_dim(cfg, rng);
  const int n = rng.between(2, 4);
  const auto e = random_labeled(d, n, rng);
  const double bound = bures_lower_bound(e);
  const double pgm_value = pgm_fcl_value(e);
  const double residual = normalization_identity_residual(e);
  const double consistency = std::abs(error_probability_bound(e) - 2.0 * (1.0 - pgm_value));

  // Classical fidelity of R o A on {p_j, |j><j|} is an average entanglement
  // fidelity over that ensemble, so the optimizer can search it directly.
  std::vector<EnsembleMember> labels;
  for (int j = 0; j < n; ++j) labels.push_back({e.p(j), DensityMatrix::basis_state(n, j)});
  OptimizerOptions opts;
  opts.budget = 60;
  opts.restarts = 1;
  const auto opt = optimize_reversal(classicizing_channel(e), Ensemble(std::move(labels)), rng.next_u64(), opts);
  const double best = std::max(pgm_value, opt.best_value);
  const double s = cfg.tol_scale;
  return RowBuilder(trial, seed)
      .add(d)
      .add(n)
      .add(bound)
      .add(pgm_value)
      .add(opt.best_value)
      .add(best * best)
      .add(residual)
      .add(consistency)
      .finish(std::min({best * best - bound + 1e-8 * s, 1e-9 * s - residual, 1e-9 * s - consistency}));
}

inline SuiteRow block_sqrt(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int size = rng.between(2, 8);
  const int rank = rng.between(1, size);
  const int split = rng.between(1, size - 1);
  const Matrix g = random_density_matrix(size, rank, rng).matrix();
  const Matrix m = rng.uniform(0.1, 10.0) * g;
  const auto check = block_sqrt_inequality_check(m, split, 1e-9 * cfg.tol_scale);
  return RowBuilder(trial, seed)
      .add(size)
      .add(rank)
      .add(split)
      .add(check.lhs)
      .add(check.rhs)
      .finish(check.rhs + 1e-9 * cfg.tol_scale - check.lhs);
}

inline SuiteRow identities(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int d = pick_dim(cfg, rng);
  const int n = rng.between(1, 4);
  const auto e = random_labeled(d, n, rng);
  const double residual = normalization_identity_residual(e);
  const double consistency = std::abs(error_probability_bound(e) - 2.0 * (1.0 - pgm_fcl_value(e)));
  const double completeness = pgm_povm(e).completeness_defect();
  Matrix x(d, d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) x(i, k) = rng.complex_normal();
  }
  const double trace_gap = trace_norm(x) - std::abs(x.trace());
  const double s = cfg.tol_scale;
  return RowBuilder(trial, seed)
      .add(d)
      .add(n)
      .add(residual)
      .add(consistency)
      .add(completeness)
      .add(trace_gap)
      .finish(std::min({1e-9 * s - residual, 1e-9 * s - consistency, 1e-8 * s - completeness, trace_gap + 1e-12 * s}));
}

inline SuiteRow optimizer(int trial, std::uint64_t seed, const SuiteConfig& cfg) {
  Rng rng(seed);
  const int d = pick_dim(cfg, rng, 3);
  const int rank = rng.between(1, d * d);
  const auto a = random_channel(d, d, rank, rng.next_u64());
  const auto e = random_ensemble(d, rng.between(1, 3), rng);
  const double s = cfg.tol_scale;

  // Gradient against central differences at a random point.
  const ReversalObjective objective(a, e);
  const Matrix v = haar_isometry(d * d * d, d, rng);
  Matrix dir(v.rows(), v.cols());
  for (Eigen::Index i = 0; i < dir.rows(); ++i) {
    for (Eigen::Index k = 0; k < dir.cols(); ++k) dir(i, k) = rng.complex_normal();
  }
  const double h = 1e-5;
  const double fd = (objective.value(v + h * dir) - objective.value(v - h * dir)) / (2.0 * h);
  const double analytic = (objective.gradient(v).adjoint() * dir).trace().real();
  const double grad_rel = std::abs(fd - analytic) / std::max(1.0, std::abs(analytic));

  // Monotone traces and CPTP candidates.
  double cptp = 0.0;
  OptimizerOptions opts;
  opts.budget = 30;
  opts.restarts = 1;
  const auto report = optimize_reversal(a, e, rng.next_u64(), opts, [&](const KrausChannel& r, double) {
    const auto choi = to_choi(r);
    cptp = std::max({cptp, choi.tp_defect(), choi.cp_defect()});
  });
  double drop = 0.0;
  for (const auto& st : report.starts) {
    for (std::size_t k = 1; k < st.trace.size(); ++k) drop = std::max(drop, st.trace[k - 1].value - st.trace[k].value);
  }

  // Unitary instance from the identity and random starts only.
  const auto u = unitary_channel(haar_unitary(d, rng));
  OptimizerOptions unitary_opts;
  unitary_opts.start_from_reversal = false;
  unitary_opts.budget = 500;
  const double unitary_best = optimize_reversal(u, random_ensemble(d, rng.between(1, 3), rng), rng.next_u64(),
                                                unitary_opts)
                                  .best_value;
  return RowBuilder(trial, seed)
      .add(d)
      .add(rank)
      .add(grad_rel)
      .add(drop)
      .add(cptp)
      .add(unitary_best)
      .finish(std::min({1e-5 * s - grad_rel, 0.0 - drop, 1e-7 * s - cptp, unitary_best - (1.0 - 1e-6 * s)}));
}

using TrialFn = SuiteRow (*)(int, std::uint64_t, const SuiteConfig&);

struct SuiteEntry {
  SuiteInfo info;
  TrialFn fn;
};

inline const std::vector<SuiteEntry>& registry() {
  static const std::vector<SuiteEntry> entries = {
      {{"square-bound", 200, {"d", "kraus_rank", "members", "f_near_optimal", "max_adversary_f_sq", "adversaries"},
        "avg entanglement fidelity: F(E, R o A)^2 <= F(E, R_near o A) + 1e-8 over random, identity and optimizer "
        "adversaries; commuting ensembles"},
       square_bound},
      {{"single-state-bound", 200, {"d", "kraus_rank", "fe_near_optimal", "max_fe_sq", "fcl_near_optimal", "max_fcl_sq"},
        "single-state square bounds for F_e and F_cl"},
       single_state_bound},
      {{"decomposition", 100, {"d", "kraus_rank", "pad", "choi_distance"},
        "reversal independent of Kraus decomposition (remix + null padding)"},
       decomposition},
      {{"perfect-code", 50, {"d", "code_dim", "isometries", "fe_after"},
        "perfectly reversible code channels are reversed with F_e >= 1 - 1e-9"},
       perfect_code},
      {{"tripartite-oracle", 100, {"d", "members", "kraus_rank", "f_kraus", "f_rqs_classical", "f_rqs_entangled"},
        "Kraus-trace formula agrees with the explicit tripartite state-vector oracle"},
       tripartite_oracle},
      {{"pgm", 100,
        {"d", "labels", "coarse_grain_residual", "completeness_defect", "reversal_choi_distance", "pure_states",
         "projective_defect"},
        "PGM completeness, coarse-graining, classicizing reversal formula, projectivity on independent pure states"},
       pgm},
      {{"bures-bound", 200,
        {"d", "labels", "bures_bound", "pgm_fcl", "optimizer_fcl", "best_fcl_sq", "normalization_residual",
         "error_bound_consistency"},
        "best classical fidelity squared >= Bures-fidelity lower bound; PGM identities"},
       bures_bound},
      {{"block-sqrt", 200, {"size", "rank", "split", "y_frobenius_sq", "b_trace_norm"},
        "off-diagonal block of M^{1/2}: ||y||_2^2 <= ||b||_1 + 1e-9"},
       block_sqrt},
      {{"identities", 100,
        {"d", "labels", "normalization_residual", "error_bound_consistency", "completeness_defect", "trace_norm_gap"},
        "PGM normalization identity, error-bound consistency, ||M||_1 >= |tr M|"},
       identities},
      {{"optimizer", 50, {"d", "kraus_rank", "gradient_rel_error", "max_trace_drop", "max_cptp_defect", "unitary_best"},
        "gradient vs central differences, monotone traces, CPTP iterates, unitary instances reach 1 - 1e-6"},
       optimizer},
  };
  return entries;
}

inline int thread_count(const SuiteConfig& cfg) {
  int n = cfg.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("REVQUANT_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

}  // namespace suite_detail

inline std::vector<SuiteInfo> suite_catalog() {
  std::vector<SuiteInfo> out;
  for (const auto& e : suite_detail::registry()) out.push_back(e.info);
  return out;
}

/// Full CSV header for a suite.
inline std::vector<std::string> suite_columns(const SuiteInfo& info) {
  std::vector<std::string> cols = {"trial", "seed"};
  cols.insert(cols.end(), info.columns.begin(), info.columns.end());
  cols.push_back("margin");
  cols.push_back("pass");
  return cols;
}

/// Alternative names accepted by run_suite.
inline const std::vector<std::pair<std::string, std::string>>& suite_aliases() {
  static const std::vector<std::pair<std::string, std::string>> aliases = {
      {"theorem1", "square-bound"}, {"corollary", "single-state-bound"}, {"lemma1", "decomposition"},
      {"rqs", "tripartite-oracle"},  {"theorem2", "bures-bound"},         {"block-lemma", "block-sqrt"},
  };
  return aliases;
}

inline std::string canonical_suite_name(const std::string& name) {
  for (const auto& [alias, canonical] : suite_aliases()) {
    if (alias == name) return canonical;
  }
  return name;
}

inline SuiteResult run_suite(const std::string& requested, const SuiteConfig& cfg) {
  const std::string name = canonical_suite_name(requested);
  const auto& reg = suite_detail::registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.info.name == name; });
  if (it == reg.end()) throw Error("unknown suite: " + name);
  const int trials = cfg.trials < 0 ? it->info.default_trials : cfg.trials;

  SuiteResult result{name, suite_columns(it->info), std::vector<SuiteRow>(static_cast<std::size_t>(trials)), 0,
                     std::numeric_limits<double>::infinity(), -1};
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        result.rows[static_cast<std::size_t>(t)] =
            it->fn(t, derive_seed(cfg.seed, static_cast<std::uint64_t>(t)), cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::min(suite_detail::thread_count(cfg), std::max(1, trials));
  std::vector<std::thread> pool;
  for (int k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (const auto& row : result.rows) {
    if (row.pass) ++result.passed;
    if (row.margin < result.worst_margin || result.worst_trial < 0) {
      result.worst_margin = row.margin;
      result.worst_trial = row.trial;
    }
  }
  return result;
}

inline void write_csv(std::ostream& os, const SuiteResult& r) {
  for (std::size_t k = 0; k < r.columns.size(); ++k) os << (k ? "," : "") << r.columns[k];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t k = 0; k < row.cells.size(); ++k) os << (k ? "," : "") << row.cells[k];
    os << "\n";
  }
}

}  // namespace revquant
