#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "exactq/bits.hpp"
#include "exactq/commproto.hpp"
#include "exactq/qcfa.hpp"
#include "exactq/queryalg.hpp"
#include "exactq/report.hpp"

namespace {

namespace qcore = exactq::qcore;
namespace queryalg = exactq::queryalg;
namespace commproto = exactq::commproto;
namespace qcfa = exactq::qcfa;
namespace report = exactq::report;

using ojson = nlohmann::ordered_json;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct CommonFlags {
  int n = 0;
  std::string mode = "explore";
  std::uint64_t seed = 0;
  bool allow_nonpromise = false;
  double epsilon_norm = 1e-9;
  double epsilon_unitary = 1e-10;

  qcore::RunOptions options() const {
    qcore::RunOptions o;
    o.mode = mode == "sample" ? qcore::RunMode::Sample : qcore::RunMode::Explore;
    o.seed = seed;
    o.allow_nonpromise = allow_nonpromise;
    o.tol.norm = epsilon_norm;
    o.tol.unitary = epsilon_unitary;
    return o;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_mode = true) {
  cmd->add_option("--n", f.n, "problem size (even, >= 4)")->required();
  if (with_mode) {
    cmd->add_option("--mode", f.mode, "explore (all branches) or sample (one path)")
        ->check(CLI::IsMember({"explore", "sample"}));
    cmd->add_option("--seed", f.seed, "RNG seed for sample mode");
    cmd->add_flag("--allow-nonpromise", f.allow_nonpromise,
                  "run on inputs outside the promise");
  }
  cmd->add_option("--epsilon-norm", f.epsilon_norm, "norm / probability tolerance");
  cmd->add_option("--epsilon-unitary", f.epsilon_unitary, "unitarity tolerance");
}

void emit(const ojson& doc) { std::cout << doc.dump(2) << "\n"; }

ojson failures_json(const std::vector<std::string>& failures) {
  ojson arr = ojson::array();
  for (const std::string& f : failures) arr.push_back(f);
  return arr;
}

ojson ledger_json(const commproto::CostLedger& ledger) {
  ojson steps = ojson::array();
  for (const auto& s : ledger.per_step) {
    steps.push_back({{"label", s.label}, {"unit", s.unit}, {"charge", s.charge}});
  }
  return {{"qubits_total", ledger.qubits_total},
          {"bits_total", ledger.bits_total},
          {"per_step", std::move(steps)}};
}

int cmd_dj_run(const CommonFlags& flags, const std::string& x) {
  const Timer timer;
  const auto inst = queryalg::DjInstance::make(flags.n, x);
  const auto result = queryalg::run_dj_prime(inst, flags.options());

  ojson branches = ojson::array();
  for (const auto& b : result.branches) {
    branches.push_back({{"outcome", b.outcomes}, {"prob", b.prob}, {"answer", b.answer}});
  }
  int answer = -1;
  const bool agreed = result.unanimous(answer);

  ojson doc;
  doc["task"] = "dj run";
  doc["n"] = flags.n;
  doc["inputs"] = {{"x", x}};
  doc["mode"] = flags.mode;
  if (agreed) {
    doc["answer"] = answer;
  } else {
    doc["answer"] = nullptr;
  }
  doc["queries"] = result.query_count;
  doc["branches"] = std::move(branches);
  doc["timings"] = {{"total_ms", timer.ms()}};
  emit(doc);
  return 0;
}

int cmd_dj_verify(const CommonFlags& flags) {
  const Timer timer;
  const auto v = report::verify_dj_exhaustive(flags.n, flags.options());
  ojson doc;
  doc["task"] = "dj verify";
  doc["n"] = flags.n;
  doc["inputs_checked"] = v.inputs_checked;
  doc["all_exact"] = v.all_exact;
  doc["failures"] = failures_json(v.failures);
  doc["timings"] = {{"total_ms", timer.ms()}};
  emit(doc);
  return v.all_exact ? 0 : 1;
}

int cmd_dj_depth(const CommonFlags& flags) {
  const Timer timer;
  const int depth = queryalg::classical_dt_depth(flags.n);
  ojson doc;
  doc["task"] = "dj classical-depth";
  doc["n"] = flags.n;
  doc["classical_depth"] = depth;
  doc["quantum_queries"] = 2;
  doc["timings"] = {{"total_ms", timer.ms()}};
  emit(doc);
  return 0;
}

int cmd_eq_run(const CommonFlags& flags, const std::string& x, const std::string& y) {
  const Timer timer;
  const auto pair = commproto::PromisePair::make(flags.n, x, y);
  const auto result = commproto::run_eq_protocol(pair, flags.options());

  ojson branches = ojson::array();
  for (const auto& b : result.branches) {
    branches.push_back({{"outcome", b.outcomes}, {"prob", b.prob}, {"answer", b.answer}});
  }
  int answer = -1;
  const bool agreed = result.unanimous(answer);

  ojson doc;
  doc["task"] = "eq run";
  doc["n"] = flags.n;
  doc["inputs"] = {{"x", x}, {"y", y}};
  doc["mode"] = flags.mode;
  if (agreed) {
    doc["answer"] = answer;
  } else {
    doc["answer"] = nullptr;
  }
  doc["ledger"] = ledger_json(result.worst_branch().transcript.ledger);
  doc["branches"] = std::move(branches);
  doc["timings"] = {{"total_ms", timer.ms()}};
  emit(doc);
  return 0;
}

int cmd_eq_verify(const CommonFlags& flags) {
  const Timer timer;
  const auto v = report::verify_eq_exhaustive(flags.n, flags.options());
  const bool ok = v.all_exact && v.ledgers_consistent;
  ojson doc;
  doc["task"] = "eq verify";
  doc["n"] = flags.n;
  doc["pairs_checked"] = v.pairs_checked;
  doc["all_exact"] = v.all_exact;
  doc["ledgers_consistent"] = v.ledgers_consistent;
  doc["failures"] = failures_json(v.failures);
  doc["timings"] = {{"total_ms", timer.ms()}};
  emit(doc);
  return ok ? 0 : 1;
}

int cmd_eq_bound(const CommonFlags& flags) {
  const Timer timer;
  const auto bound = commproto::rectangle_bound(flags.n);
  ojson doc;
  doc["task"] = "eq bound";
  doc["n"] = flags.n;
  doc["case"] = bound.fooling_case;
  doc["e_size"] = bound.e_size;
  doc["c1_lower"] = bound.c1_lower;
  doc["d_lower_formula_value"] = bound.d_lower_formula_value;
  doc["fooling_subset_size"] = bound.fooling_subset_size;
  doc["dfa_size_bound"] = bound.dfa_size_bound;
  doc["timings"] = {{"total_ms", timer.ms()}};
  emit(doc);
  return 0;
}

struct WordShape {
  bool well_formed = false;
  std::string x, y;
  int h = 0;
};

WordShape decompose_word(int n, const std::string& w) {
  WordShape shape;
  const std::size_t nn = static_cast<std::size_t>(n);
  if (w.size() != 4 * nn + 4 || w[nn] != '#' || w[2 * nn + 1] != '#' ||
      w[2 * nn + 2] != '#' || w[3 * nn + 3] != '#') {
    return shape;
  }
  shape.x = w.substr(0, nn);
  shape.y = w.substr(nn + 1, nn);
  if (!exactq::bits::is_bitstring(shape.x) || !exactq::bits::is_bitstring(shape.y) ||
      w.substr(2 * nn + 3, nn) != shape.x || w.substr(3 * nn + 4, nn) != shape.y) {
    return shape;
  }
  shape.well_formed = true;
  shape.h = exactq::bits::hamming(shape.x, shape.y);
  return shape;
}

int cmd_qcfa_run(const CommonFlags& flags, const std::string& word_arg,
                 const std::string& x, const std::string& y, bool dump_spec) {
  const Timer timer;
  const auto spec = qcfa::build_a_n(flags.n);
  if (dump_spec) {
    std::cout << qcfa::spec_to_json_string(spec) << "\n";
    return 0;
  }

  std::string word_str = word_arg;
  if (word_str.empty()) {
    if (x.empty() || y.empty()) {
      throw std::invalid_argument("qcfa run: provide --word or both --x and --y");
    }
    exactq::bits::require_bitstring(x, static_cast<std::size_t>(flags.n), "--x");
    exactq::bits::require_bitstring(y, static_cast<std::size_t>(flags.n), "--y");
    word_str = x + "#" + y + "##" + x + "#" + y;
  }
  const qcfa::Word word = qcfa::Word::parse(word_str);
  const WordShape shape = decompose_word(flags.n, word_str);
  if (!shape.well_formed) {
    throw std::invalid_argument("qcfa run: word is not of the form x#y##x#y "
                                "for n = " + std::to_string(flags.n));
  }
  const auto expected = qcfa::a_n_oracle(flags.n, word);
  if (!expected && !flags.allow_nonpromise) {
    throw qcore::promise_violation(
        "qcfa run: H(x,y) = " + std::to_string(shape.h) +
        " is outside the promise (use --allow-nonpromise to run anyway)");
  }

  const auto result = qcfa::run_qcfa(spec, word, flags.options());
  ojson branches = ojson::array();
  for (const auto& b : result.branches) {
    branches.push_back({{"outcome", b.outcomes},
                        {"prob", b.prob},
                        {"answer", b.verdict == "accept" ? 1 : 0},
                        {"verdict", b.verdict}});
  }
  std::string verdict;
  const bool agreed = result.unanimous(verdict);

  ojson doc;
  doc["task"] = "qcfa run";
  doc["n"] = flags.n;
  doc["inputs"] = {{"word", word_str}};
  doc["mode"] = flags.mode;
  doc["verdict"] = agreed ? ojson(verdict) : ojson("mixed");
  doc["branches"] = std::move(branches);
  doc["quantum_dim"] = result.quantum_dim;
  doc["classical_states_used"] = result.classical_states_used;
  doc["timings"] = {{"total_ms", timer.ms()}};
  emit(doc);
  return 0;
}

int cmd_qcfa_verify(const CommonFlags& flags, bool against_dfa) {
  const Timer timer;
  const auto v = report::verify_qcfa_exhaustive(flags.n, against_dfa, flags.options());
  const bool ok = v.all_exact && (!v.dfa_checked || v.dfa_agrees);
  ojson doc;
  doc["task"] = "qcfa verify";
  doc["n"] = flags.n;
  doc["words_checked"] = v.words_checked;
  doc["all_exact"] = v.all_exact;
  doc["against_dfa"] = v.dfa_checked;
  if (v.dfa_checked) doc["dfa_agrees"] = v.dfa_agrees;
  doc["quantum_dim"] = v.quantum_dim;
  doc["classical_states"] = v.classical_states;
  doc["failures"] = failures_json(v.failures);
  doc["timings"] = {{"total_ms", timer.ms()}};
  emit(doc);
  return ok ? 0 : 1;
}

int cmd_report(const std::string& n_list_str, const std::string& out_path,
               std::string format) {
  std::vector<int> n_list;
  std::size_t pos = 0;
  while (pos < n_list_str.size()) {
    const std::size_t comma = n_list_str.find(',', pos);
    const std::string tok = n_list_str.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) {
      std::size_t used = 0;
      int value = 0;
      try {
        value = std::stoi(tok, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("report: bad n-list entry '" + tok + "'");
      }
      if (used != tok.size()) {
        throw std::invalid_argument("report: bad n-list entry '" + tok + "'");
      }
      n_list.push_back(value);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (n_list.empty()) {
    throw std::invalid_argument("report: --n-list must name at least one n");
  }

  if (format.empty()) {
    format = out_path.size() >= 5 &&
                     out_path.compare(out_path.size() - 5, 5, ".json") == 0
                 ? "json"
                 : "csv";
  }

  std::vector<report::ReportRow> rows;
  rows.reserve(n_list.size());
  for (const int n : n_list) rows.push_back(report::build_report_row(n));

  const std::string body =
      format == "json" ? report::report_json(rows) + "\n" : report::report_csv(rows);
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << body;
    if (!out) {
      std::cerr << "report: failed to write " << out_path << "\n";
      return 2;
    }
  }
  for (const auto& row : rows) {
    if (!row.all_passed()) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact quantum query, communication, and automata experiments "
               "for the Hamming weight/distance promise problems"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string x, y, word;
  bool against_dfa = false;
  bool dump_spec = false;
  std::string n_list_str, out_path, format;

  std::function<int()> action;

  auto* dj = app.add_subcommand("dj", "two-query exact algorithm for the weight promise");
  dj->require_subcommand(1);
  auto* dj_run = dj->add_subcommand("run", "run one input and list all branches");
  add_common(dj_run, flags);
  dj_run->add_option("--x", x, "input bitstring of length n")->required();
  dj_run->callback([&] { action = [&] { return cmd_dj_run(flags, x); }; });
  auto* dj_verify = dj->add_subcommand("verify", "check every promise input");
  add_common(dj_verify, flags);
  dj_verify->callback([&] { action = [&] { return cmd_dj_verify(flags); }; });
  auto* dj_depth = dj->add_subcommand("classical-depth",
                                      "exact deterministic query complexity");
  add_common(dj_depth, flags, /*with_mode=*/false);
  dj_depth->callback([&] { action = [&] { return cmd_dj_depth(flags); }; });

  auto* eq = app.add_subcommand("eq", "exact protocol for the distance promise");
  eq->require_subcommand(1);
  auto* eq_run = eq->add_subcommand("run", "run one pair and list all branches");
  add_common(eq_run, flags);
  eq_run->add_option("--x", x, "Alice's bitstring of length n")->required();
  eq_run->add_option("--y", y, "Bob's bitstring of length n")->required();
  eq_run->callback([&] { action = [&] { return cmd_eq_run(flags, x, y); }; });
  auto* eq_verify = eq->add_subcommand("verify", "check every promise pair");
  add_common(eq_verify, flags);
  eq_verify->callback([&] { action = [&] { return cmd_eq_verify(flags); }; });
  auto* eq_bound = eq->add_subcommand("bound", "fooling-set rectangle bound");
  add_common(eq_bound, flags, /*with_mode=*/false);
  eq_bound->callback([&] { action = [&] { return cmd_eq_bound(flags); }; });

  auto* qc = app.add_subcommand("qcfa", "finite automaton with quantum register");
  qc->require_subcommand(1);
  auto* qc_run = qc->add_subcommand("run", "run one word (or x,y pair)");
  add_common(qc_run, flags);
  qc_run->add_option("--word", word, "word over {0,1,#} of the form x#y##x#y");
  qc_run->add_option("--x", x, "first half (used when --word is absent)");
  qc_run->add_option("--y", y, "second half (used when --word is absent)");
  qc_run->add_flag("--dump-spec", dump_spec, "print the machine description instead");
  qc_run->callback(
      [&] { action = [&] { return cmd_qcfa_run(flags, word, x, y, dump_spec); }; });
  auto* qc_verify = qc->add_subcommand("verify", "check every promise word");
  add_common(qc_verify, flags);
  qc_verify->add_flag("--against-dfa", against_dfa,
                      "also cross-check the reference DFA");
  qc_verify->callback(
      [&] { action = [&] { return cmd_qcfa_verify(flags, against_dfa); }; });

  auto* rep = app.add_subcommand("report", "aggregate experiment table");
  rep->add_option("--n-list", n_list_str, "comma-separated n values")->required();
  rep->add_option("--out", out_path, "output file (stdout when absent)");
  rep->add_option("--format", format, "csv or json (default: by extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  rep->callback(
      [&] { action = [&] { return cmd_report(n_list_str, out_path, format); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return action ? action() : 2;
  } catch (const qcore::promise_violation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qcore::cost_guard_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal check failed: " << e.what() << "\n";
    return 1;
  }
}
