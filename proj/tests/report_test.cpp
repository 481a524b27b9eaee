#include "doctest.h"

#include <string>
#include <vector>

#include "json.hpp"

#include "exactq/report.hpp"

using namespace exactq;
using namespace exactq::report;

TEST_SUITE("report") {

TEST_CASE("query verification covers the full promise and passes") {
  const DjVerification v4 = verify_dj_exhaustive(4);
  CHECK(v4.inputs_checked == 16);
  CHECK(v4.all_exact);
  CHECK(v4.failures.empty());

  const DjVerification v6 = verify_dj_exhaustive(6);
  CHECK(v6.inputs_checked == 34);
  CHECK(v6.all_exact);

  const DjVerification v8 = verify_dj_exhaustive(8);
  CHECK(v8.inputs_checked == 88);
  CHECK(v8.all_exact);
}

TEST_CASE("protocol verification checks answers and ledgers") {
  const EqVerification v4 = verify_eq_exhaustive(4);
  CHECK(v4.pairs_checked == 256);
  CHECK(v4.all_exact);
  CHECK(v4.ledgers_consistent);
  CHECK(v4.failures.empty());

  const EqVerification v6 = verify_eq_exhaustive(6);
  CHECK(v6.pairs_checked == 2176);
  CHECK(v6.all_exact);
  CHECK(v6.ledgers_consistent);
}

TEST_CASE("automaton verification agrees with the reference DFA") {
  const QcfaVerification v = verify_qcfa_exhaustive(4, /*against_dfa=*/true);
  CHECK(v.words_checked == 256);
  CHECK(v.all_exact);
  CHECK(v.dfa_checked);
  CHECK(v.dfa_agrees);
  CHECK(v.quantum_dim == 13);
  CHECK(v.classical_states == 49);
  CHECK(v.failures.empty());

  const QcfaVerification plain = verify_qcfa_exhaustive(4);
  CHECK_FALSE(plain.dfa_checked);
  CHECK(plain.all_exact);

  CHECK_THROWS_AS((void)verify_qcfa_exhaustive(10), qcore::cost_guard_error);
}

TEST_CASE("aggregate row for n = 4 fills every column") {
  const ReportRow row = build_report_row(4);
  CHECK(row.n == 4);
  CHECK(row.dj_inputs_checked == 16);
  CHECK(row.dj_all_exact);
  CHECK(row.classical_depth == 4);
  CHECK(row.eq_pairs_checked == 256);
  CHECK(row.eq_all_exact);
  CHECK(row.eq_qubits == 5);
  CHECK(row.eq_bits == 4);
  CHECK(row.fooling_violations == 0);
  CHECK(row.bound_values.fooling_subset_size == 3);
  CHECK(row.bound_values.dfa_size_bound == 2);
  CHECK(row.qcfa_words_checked == 256);
  CHECK(row.qcfa_all_exact);
  CHECK(row.qcfa_qdim == 13);
  CHECK(row.qcfa_cstates == 49);
  CHECK(row.dfa_ref_states == 3090);
  CHECK(row.dfa_lower_bound == 2);
  CHECK(row.all_passed());
}

TEST_CASE("all_passed reflects the exactness flags") {
  ReportRow row;
  row.dj_all_exact = true;
  row.eq_all_exact = true;
  row.fooling_violations = 0;
  row.qcfa_words_checked = -1;  // skipped
  CHECK(row.all_passed());
  row.dj_all_exact = false;
  CHECK_FALSE(row.all_passed());
  row.dj_all_exact = true;
  row.qcfa_words_checked = 10;
  row.qcfa_all_exact = false;
  CHECK_FALSE(row.all_passed());
  row.qcfa_all_exact = true;
  row.fooling_violations = 2;
  CHECK_FALSE(row.all_passed());
}

TEST_CASE("CSV layout: fixed header, one line per row, deterministic") {
  const ReportRow row = build_report_row(4);
  const std::string csv = report_csv({row});
  const std::string header =
      "n,dj_inputs_checked,dj_all_exact,classical_depth,eq_pairs_checked,"
      "eq_all_exact,eq_qubits,eq_bits,fooling_violations,bound_values,"
      "qcfa_words_checked,qcfa_all_exact,qcfa_qdim,qcfa_cstates,"
      "dfa_ref_states,dfa_lower_bound";
  REQUIRE(csv.find(header + "\n") == 0);
  CHECK(csv.find("\ntrue") == std::string::npos);  // booleans sit mid-line
  CHECK(csv.find(",true,") != std::string::npos);

  const std::string again = report_csv({build_report_row(4)});
  CHECK(csv == again);  // byte-identical across rebuilds
}

TEST_CASE("JSON report parses and carries the same fields") {
  const std::vector<ReportRow> rows = {build_report_row(4)};
  const auto doc = nlohmann::json::parse(report_json(rows));
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 1);
  CHECK(doc[0].at("n") == 4);
  CHECK(doc[0].at("dj_all_exact") == true);
  CHECK(doc[0].at("classical_depth") == 4);
  CHECK(doc[0].at("bound_values").at("fooling_subset_size") == 3);
  CHECK(doc[0].at("dfa_ref_states") == 3090);
}

}  // TEST_SUITE
