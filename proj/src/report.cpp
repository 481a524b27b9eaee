#include "exactq/report.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "exactq/bits.hpp"

namespace exactq::report {

namespace {

constexpr std::size_t kMaxFailures = 20;

void note_failure(std::vector<std::string>& failures, std::string msg) {
  if (failures.size() < kMaxFailures) failures.push_back(std::move(msg));
}

std::string join_outcomes(const std::vector<std::string>& outcomes) {
  std::string s;
  for (const std::string& o : outcomes) {
    if (!s.empty()) s += ",";
    s += o;
  }
  return s;
}

}  // namespace

DjVerification verify_dj_exhaustive(int n, const RunOptions& opts) {
  DjVerification v;
  v.n = n;
  v.all_exact = true;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    const auto inst = queryalg::DjInstance::make(n, bits::string_from_mask(n, m));
    const auto expected = queryalg::dj_prime_oracle(inst);
    if (!expected) continue;
    const auto result = queryalg::run_dj_prime(inst, opts);
    ++v.inputs_checked;
    if (result.query_count != 2) {
      v.all_exact = false;
      note_failure(v.failures, "x=" + inst.x + ": query_count = " +
                                   std::to_string(result.query_count));
    }
    double total = 0.0;
    for (const auto& b : result.branches) {
      total += b.prob;
      if (b.answer != *expected) {
        v.all_exact = false;
        note_failure(v.failures, "x=" + inst.x + ": branch " +
                                     join_outcomes(b.outcomes) + " answered " +
                                     std::to_string(b.answer) + ", expected " +
                                     std::to_string(*expected));
      }
    }
    if (std::abs(total - 1.0) > opts.tol.norm) {
      v.all_exact = false;
      note_failure(v.failures, "x=" + inst.x + ": branch probabilities sum to " +
                                   std::to_string(total));
    }
  }
  return v;
}

EqVerification verify_eq_exhaustive(int n, const RunOptions& opts) {
  EqVerification v;
  v.n = n;
  v.all_exact = true;
  v.ledgers_consistent = true;
  const commproto::CostLedger worst = commproto::cost_formula(n);
  const int first_charge =
      commproto::ceil_log2(static_cast<std::size_t>(n) * n);

  for (std::uint32_t xm = 0; xm < (1u << n); ++xm) {
    for (std::uint32_t ym = 0; ym < (1u << n); ++ym) {
      const auto p = commproto::PromisePair::make(n, bits::string_from_mask(n, xm),
                                                  bits::string_from_mask(n, ym));
      const auto expected = commproto::eq_prime_oracle(p);
      if (!expected) continue;
      const auto result = commproto::run_eq_protocol(p, opts);
      ++v.pairs_checked;
      const std::string tag = "x=" + p.x + " y=" + p.y;
      double total = 0.0;
      for (const auto& b : result.branches) {
        total += b.prob;
        if (b.answer != *expected) {
          v.all_exact = false;
          note_failure(v.failures, tag + ": branch " + join_outcomes(b.outcomes) +
                                       " answered " + std::to_string(b.answer) +
                                       ", expected " + std::to_string(*expected));
        }
        const commproto::CostLedger& ledger = b.transcript.ledger;
        if (b.outcomes.size() >= 2) {
          // Long path: must equal the closed form message for message.
          if (!ledger.same_steps(worst) || !ledger.same_totals(worst)) {
            v.ledgers_consistent = false;
            note_failure(v.failures,
                         tag + ": long-path ledger " +
                             std::to_string(ledger.qubits_total) + "q/" +
                             std::to_string(ledger.bits_total) + "b != formula " +
                             std::to_string(worst.qubits_total) + "q/" +
                             std::to_string(worst.bits_total) + "b");
          }
        } else {
          // Short path: the first quantum message only.
          const bool ok = ledger.per_step.size() == 1 &&
                          ledger.per_step[0].unit == "qubits" &&
                          ledger.per_step[0].charge == first_charge &&
                          ledger.qubits_total == first_charge &&
                          ledger.bits_total == 0;
          if (!ok) {
            v.ledgers_consistent = false;
            note_failure(v.failures, tag + ": short-path ledger is not the "
                                         "single first message");
          }
        }
      }
      if (std::abs(total - 1.0) > opts.tol.norm) {
        v.all_exact = false;
        note_failure(v.failures,
                     tag + ": branch probabilities sum to " + std::to_string(total));
      }
    }
  }
  return v;
}

QcfaVerification verify_qcfa_exhaustive(int n, bool against_dfa,
                                        const RunOptions& opts) {
  if (n > 8) {
    throw qcore::cost_guard_error(
        "verify_qcfa_exhaustive: the 4^n word loop is guarded to n <= 8");
  }
  QcfaVerification v;
  v.n = n;
  v.all_exact = true;
  const qcfa::QcfaSpec spec = qcfa::build_a_n(n);
  v.quantum_dim = spec.quantum_dim();
  v.classical_states = spec.classical_state_count();

  qcfa::DfaSpec dfa;
  if (against_dfa) {
    dfa = qcfa::build_reference_dfa(n);
    v.dfa_checked = true;
    v.dfa_agrees = true;
  }

  for (std::uint32_t xm = 0; xm < (1u << n); ++xm) {
    const std::string x = bits::string_from_mask(n, xm);
    for (std::uint32_t ym = 0; ym < (1u << n); ++ym) {
      const int h = std::popcount(xm ^ ym);
      const bool promise_yes = (h == 0 || h == 1 || h == n - 1 || h == n);
      if (!promise_yes && h != n / 2) continue;
      const std::string y = bits::string_from_mask(n, ym);
      const qcfa::Word word = qcfa::Word::parse(x + "#" + y + "##" + x + "#" + y);
      const auto expected = qcfa::a_n_oracle(n, word);
      const std::string want = *expected ? "accept" : "reject";
      const auto result = qcfa::run_qcfa(spec, word, opts);
      ++v.words_checked;
      double total = 0.0;
      for (const auto& b : result.branches) {
        total += b.prob;
        if (b.verdict != want) {
          v.all_exact = false;
          note_failure(v.failures, word.symbols + ": branch " +
                                       join_outcomes(b.outcomes) + " said " +
                                       b.verdict + ", expected " + want);
        }
      }
      if (std::abs(total - 1.0) > opts.tol.norm) {
        v.all_exact = false;
        note_failure(v.failures, word.symbols + ": branch probabilities sum to " +
                                     std::to_string(total));
      }
      if (against_dfa && qcfa::run_dfa(dfa, word) != *expected) {
        v.dfa_agrees = false;
        note_failure(v.failures, word.symbols + ": reference DFA disagrees with "
                                     "the oracle");
      }
    }
  }
  return v;
}

bool ReportRow::all_passed() const {
  if (!dj_all_exact || !eq_all_exact) return false;
  if (fooling_violations > 0) return false;
  if (qcfa_words_checked >= 0 && !qcfa_all_exact) return false;
  return true;
}

ReportRow build_report_row(int n, const RunOptions& opts) {
  ReportRow row;
  row.n = n;

  const DjVerification dj = verify_dj_exhaustive(n, opts);
  row.dj_inputs_checked = dj.inputs_checked;
  row.dj_all_exact = dj.all_exact;
  row.classical_depth = n <= 8 ? queryalg::classical_dt_depth(n) : -1;

  const EqVerification eq = verify_eq_exhaustive(n, opts);
  row.eq_pairs_checked = eq.pairs_checked;
  row.eq_all_exact = eq.all_exact && eq.ledgers_consistent;
  const commproto::CostLedger ledger = commproto::cost_formula(n);
  row.eq_qubits = ledger.qubits_total;
  row.eq_bits = ledger.bits_total;

  row.fooling_violations =
      n <= 12 ? static_cast<long long>(
                    commproto::verify_fooling_property(n).violations.size())
              : -1;
  const commproto::BoundReport bound = commproto::rectangle_bound(n);
  row.bound_values = {bound.c1_lower, bound.d_lower_formula_value,
                      bound.fooling_subset_size, bound.dfa_size_bound};

  if (n <= 6) {
    const QcfaVerification qv = verify_qcfa_exhaustive(n, true, opts);
    row.qcfa_words_checked = qv.words_checked;
    row.qcfa_all_exact = qv.all_exact && qv.dfa_agrees;
    row.qcfa_qdim = qv.quantum_dim;
    row.qcfa_cstates = qv.classical_states;
  } else {
    const qcfa::QcfaSpec spec = qcfa::build_a_n(n);
    row.qcfa_words_checked = -1;
    row.qcfa_all_exact = false;
    row.qcfa_qdim = spec.quantum_dim();
    row.qcfa_cstates = spec.classical_state_count();
  }

  row.dfa_ref_states =
      n <= 8 ? static_cast<long long>(qcfa::build_reference_dfa(n).state_count)
             : -1;
  row.dfa_lower_bound = n <= 12 ? qcfa::dfa_size_lower_bound(n).bound : -1;
  return row;
}

namespace {

std::string bound_values_string(const BoundValues& b) {
  std::ostringstream os;
  os << std::setprecision(14) << "c1=" << b.c1_lower
     << ";d_formula=" << b.d_lower_formula_value << ";F=" << b.fooling_subset_size
     << ";dfa_bound=" << b.dfa_size_bound;
  return os.str();
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "n,dj_inputs_checked,dj_all_exact,classical_depth,eq_pairs_checked,"
        "eq_all_exact,eq_qubits,eq_bits,fooling_violations,bound_values,"
        "qcfa_words_checked,qcfa_all_exact,qcfa_qdim,qcfa_cstates,"
        "dfa_ref_states,dfa_lower_bound\n";
  for (const ReportRow& r : rows) {
    os << r.n << ',' << r.dj_inputs_checked << ','
       << (r.dj_all_exact ? "true" : "false") << ',' << r.classical_depth << ','
       << r.eq_pairs_checked << ',' << (r.eq_all_exact ? "true" : "false") << ','
       << r.eq_qubits << ',' << r.eq_bits << ',' << r.fooling_violations << ','
       << bound_values_string(r.bound_values) << ',' << r.qcfa_words_checked
       << ',' << (r.qcfa_all_exact ? "true" : "false") << ',' << r.qcfa_qdim
       << ',' << r.qcfa_cstates << ',' << r.dfa_ref_states << ','
       << r.dfa_lower_bound << '\n';
  }
  return os.str();
}

std::string report_json(const std::vector<ReportRow>& rows, int indent) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json row;
    row["n"] = r.n;
    row["dj_inputs_checked"] = r.dj_inputs_checked;
    row["dj_all_exact"] = r.dj_all_exact;
    row["classical_depth"] = r.classical_depth;
    row["eq_pairs_checked"] = r.eq_pairs_checked;
    row["eq_all_exact"] = r.eq_all_exact;
    row["eq_qubits"] = r.eq_qubits;
    row["eq_bits"] = r.eq_bits;
    row["fooling_violations"] = r.fooling_violations;
    row["bound_values"] = {{"c1_lower", r.bound_values.c1_lower},
                           {"d_lower_formula_value",
                            r.bound_values.d_lower_formula_value},
                           {"fooling_subset_size",
                            r.bound_values.fooling_subset_size},
                           {"dfa_size_bound", r.bound_values.dfa_size_bound}};
    row["qcfa_words_checked"] = r.qcfa_words_checked;
    row["qcfa_all_exact"] = r.qcfa_all_exact;
    row["qcfa_qdim"] = r.qcfa_qdim;
    row["qcfa_cstates"] = r.qcfa_cstates;
    row["dfa_ref_states"] = r.dfa_ref_states;
    row["dfa_lower_bound"] = r.dfa_lower_bound;
    arr.push_back(std::move(row));
  }
  return arr.dump(indent);
}

}  // namespace exactq::report
