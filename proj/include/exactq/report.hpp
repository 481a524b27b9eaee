#pragma once

#include <string>
#include <vector>

#include "exactq/commproto.hpp"
#include "exactq/qcfa.hpp"
#include "exactq/queryalg.hpp"

// Exhaustive verifiers for the three experiment families and the aggregate
// report emitted by the CLI. All verification runs in explore mode; a sampled
// run cannot certify a probability-1 claim.

namespace exactq::report {

using qcore::RunOptions;

struct DjVerification {
  int n = 0;
  long long inputs_checked = 0;
  bool all_exact = false;
  std::vector<std::string> failures;
};

// Runs every promise input through run_dj_prime and checks per-branch answers
// against dj_prime_oracle, query_count == 2, and branch probabilities summing
// to 1 within tol.norm.
DjVerification verify_dj_exhaustive(int n, const RunOptions& opts = {});

struct EqVerification {
  int n = 0;
  long long pairs_checked = 0;
  bool all_exact = false;
  bool ledgers_consistent = false;
  std::vector<std::string> failures;
};

// Runs every promise pair through run_eq_protocol, checks per-branch answers
// against eq_prime_oracle, and cross-checks every transcript against
// cost_formula: long paths must match it step by step, short paths charge the
// first message only.
EqVerification verify_eq_exhaustive(int n, const RunOptions& opts = {});

struct QcfaVerification {
  int n = 0;
  long long words_checked = 0;
  bool all_exact = false;
  bool dfa_checked = false;
  bool dfa_agrees = false;
  std::size_t quantum_dim = 0;
  std::size_t classical_states = 0;
  std::vector<std::string> failures;
};

// Builds A(n) once and classifies every promise word x#y##x#y on all
// branches; with against_dfa set, the reference DFA verdicts are checked on
// the same words. Guarded to n <= 8 (4^n words).
QcfaVerification verify_qcfa_exhaustive(int n, bool against_dfa = false,
                                        const RunOptions& opts = {});

struct BoundValues {
  double c1_lower = 0.0;
  double d_lower_formula_value = 0.0;
  std::size_t fooling_subset_size = 0;
  int dfa_size_bound = 0;
};

// One aggregate line of the experiment table. Fields guarded by a cost bound
// hold -1 when n exceeds their guard (classical_depth beyond n = 8,
// fooling/dfa bounds beyond n = 12, the qcfa/DFA exhaustive loops beyond
// their word budgets).
struct ReportRow {
  int n = 0;
  long long dj_inputs_checked = 0;
  bool dj_all_exact = false;
  int classical_depth = -1;
  long long eq_pairs_checked = 0;
  bool eq_all_exact = false;
  int eq_qubits = 0;
  int eq_bits = 0;
  long long fooling_violations = -1;
  BoundValues bound_values;
  long long qcfa_words_checked = -1;
  bool qcfa_all_exact = false;
  std::size_t qcfa_qdim = 0;
  std::size_t qcfa_cstates = 0;
  long long dfa_ref_states = -1;
  long long dfa_lower_bound = -1;

  // True only if every exhaustive check that ran passed.
  bool all_passed() const;
};

ReportRow build_report_row(int n, const RunOptions& opts = {});

// CSV with one header line; columns are exactly the ReportRow fields in
// declaration order. Deterministic given explore mode.
std::string report_csv(const std::vector<ReportRow>& rows);
// JSON array of row objects with the same field names.
std::string report_json(const std::vector<ReportRow>& rows, int indent = 2);

}  // namespace exactq::report
