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

// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "revquant/channels.hpp"
#include "revquant/fidelities.hpp"
#include "revquant/suites.hpp"

#ifndef REVQUANT_CLI_PATH
#error "REVQUANT_CLI_PATH must point at the revquant executable"
#endif

namespace {

using namespace revquant;

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome suite_outcome(const std::string& name, double seconds_limit = 0.0) {
  SuiteConfig cfg;
  cfg.seed = kSeed;
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_suite(name, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream os;
  os << r.passed << "/" << r.rows.size() << " trials pass, worst margin " << r.worst_margin << " (trial "
     << r.worst_trial << "), " << secs << " s";
  bool pass = r.all_pass() && !r.no_trials();
  if (seconds_limit > 0.0 && secs > seconds_limit) {
    os << " exceeds " << seconds_limit << " s";
    pass = false;
  }
  return {pass, os.str()};
}

Outcome spot_values() {
  std::ostringstream os;
  bool pass = true;
  for (double p : {0.0, 0.3, 1.0}) {
    const double f = entanglement_fidelity(DensityMatrix::maximally_mixed(2), depolarizing_qubit(p));
    const double err = std::abs(f - (1.0 - 3.0 * p / 4.0));
    pass = pass && err <= 1e-12;
    os << "F_e(I/2, depol " << p << ") err " << err << "; ";
  }
  const double b = bures_fidelity(DensityMatrix::basis_state(2, 0), DensityMatrix::maximally_mixed(2));
  const double berr = std::abs(b - 1.0 / std::sqrt(2.0));
  pass = pass && berr <= 1e-10;
  os << "bures err " << berr << "; ";

  const auto dir = std::filesystem::temp_directory_path() / "revquant_acceptance";
  std::filesystem::create_directories(dir);
  std::string bodies[3];
  const char* threads[3] = {"1", "1", "4"};
  for (int k = 0; k < 3; ++k) {
    const auto csv = dir / ("run" + std::to_string(k) + ".csv");
    const auto summary = dir / ("run" + std::to_string(k) + ".json");
    const std::string cmd = std::string("REVQUANT_THREADS=") + threads[k] + " '" + REVQUANT_CLI_PATH +
                            "' suite square-bound --trials 25 --seed 11 --out '" + csv.string() + "' --summary '" +
                            summary.string() + "'";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      os << "CLI run " << k << " failed (status " << status << ")";
      return {false, os.str()};
    }
    std::ifstream in(csv, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    bodies[k] = buf.str();
  }
  const bool identical = !bodies[0].empty() && bodies[0] == bodies[1] && bodies[0] == bodies[2];
  pass = pass && identical;
  os << "CLI CSV " << (identical ? "byte-identical" : "differs") << " across 3 runs (" << bodies[0].size()
     << " bytes, threads 1/1/4)";
  return {pass, os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "square bound on average entanglement fidelity", [] { return suite_outcome("square-bound", 300.0); }},
      {2, "single-state square bounds", [] { return suite_outcome("single-state-bound"); }},
      {3, "decomposition independence", [] { return suite_outcome("decomposition"); }},
      {4, "perfect reversibility of codes", [] { return suite_outcome("perfect-code"); }},
      {5, "tripartite oracle equivalence", [] { return suite_outcome("tripartite-oracle"); }},
      {6, "pgm identities", [] { return suite_outcome("pgm"); }},
      {7, "Bures-fidelity bound on classical fidelity", [] { return suite_outcome("bures-bound"); }},
      {8, "off-diagonal block of a PSD square root", [] { return suite_outcome("block-sqrt"); }},
      {9, "optimizer validity", [] { return suite_outcome("optimizer"); }},
      {10, "spot regressions and CLI determinism", spot_values},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
              << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
