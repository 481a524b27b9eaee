#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exactq/qcore.hpp"
#include "exactq/queryalg.hpp"

// One-way finite automata with quantum and classical states (1QCFA): the
// generic interpreter, the concrete machine A(n) deciding the promise
// language
//
//   A_yes(n) = { x#y##x#y : H(x,y) in {0, 1, n-1, n} },
//   A_no(n)  = { x#y##x#y : H(x,y) = n/2 },
//
// and a reference DFA plus a fooling-set size lower bound for the classical
// comparison. Words are given over {0, 1, #}; the engine frames them with the
// end markers itself.

namespace exactq::qcfa {

using qcore::Branch;
using qcore::MeasurementSpec;
using qcore::RunMode;
using qcore::RunOptions;
using qcore::StateVector;
using qcore::Tolerances;
using qcore::UnitaryOp;

inline constexpr char kLeftMarker = '^';   // the paper's cent sign
inline constexpr char kRightMarker = '$';

struct Word {
  std::string symbols;  // over {0, 1, #}; end markers never appear here

  static Word parse(std::string_view s);  // validates the alphabet
  std::string framed() const;             // with both end markers
};

struct ClassicalStateId {
  enum class Tag { Normal, Accept, Reject };

  Tag tag = Tag::Normal;
  int i = 0, j = 0, p = 0;  // meaningful for Tag::Normal only

  static ClassicalStateId normal(int i, int j, int p) {
    return {Tag::Normal, i, j, p};
  }
  static ClassicalStateId accept() { return {Tag::Accept}; }
  static ClassicalStateId reject() { return {Tag::Reject}; }

  bool operator==(const ClassicalStateId&) const = default;
  auto operator<=>(const ClassicalStateId&) const = default;

  std::string str() const;  // "S_{i,j,p}", "accept", "reject"
};

// Transition table over reachable (classical state, symbol) pairs. Operators
// and measurements live in shared pools so that entries can reference them by
// name. Immutable once built; safe to share across threads.
class QcfaSpec {
 public:
  struct Entry {
    std::size_t op_index = 0;       // into operators()
    std::size_t measure_index = 0;  // into measurements()
    std::map<std::string, ClassicalStateId> next;  // by outcome label
  };

  explicit QcfaSpec(int n) : n_(n) {}

  int n() const { return n_; }
  std::size_t quantum_dim() const { return quantum_dim_; }
  std::size_t initial_quantum_index() const { return initial_quantum_index_; }
  const ClassicalStateId& initial_classical() const { return initial_classical_; }

  const std::vector<std::pair<std::string, UnitaryOp>>& operators() const {
    return operators_;
  }
  const std::vector<std::pair<std::string, MeasurementSpec>>& measurements() const {
    return measurements_;
  }
  const std::map<std::pair<ClassicalStateId, char>, Entry>& table() const {
    return table_;
  }

  const Entry* find(const ClassicalStateId& s, char symbol) const;

  // Distinct classical states named anywhere in the table (sources and
  // targets, accept/reject included).
  std::size_t classical_state_count() const;

  // Builder interface.
  void set_quantum(std::size_t dim, std::size_t initial_index);
  void set_initial_classical(const ClassicalStateId& s);
  std::size_t add_operator(std::string name, UnitaryOp op);
  std::size_t add_measurement(std::string name, MeasurementSpec m);
  void define(const ClassicalStateId& s, char symbol, Entry e);

 private:
  int n_;
  std::size_t quantum_dim_ = 0;
  std::size_t initial_quantum_index_ = 0;
  ClassicalStateId initial_classical_;
  std::vector<std::pair<std::string, UnitaryOp>> operators_;
  std::vector<std::pair<std::string, MeasurementSpec>> measurements_;
  std::map<std::pair<ClassicalStateId, char>, Entry> table_;
};

struct QcfaBranch {
  std::vector<std::string> outcomes;  // non-trivial measurement results
  double prob = 0.0;
  std::string verdict;                // "accept" or "reject"
  std::vector<std::string> classical_trace;
};

struct QcfaRunResult {
  int n = 0;
  std::string word;
  std::vector<QcfaBranch> branches;
  std::size_t quantum_dim = 0;
  std::size_t classical_states_used = 0;  // distinct states across branches

  bool unanimous(std::string& verdict_out) const;
};

// accept (true) / reject (false) per the promise; nullopt when the word is
// not of the form x#y##x#y or the distance is outside the promise.
std::optional<bool> a_n_oracle(int n, const Word& word);

// The machine A(n): U1 at the left marker; per-bit phase flips while scanning
// x then y (position tracked in the classical state, reset at separators);
// U2 plus the window measurement at the first # of ##; U3 U_{ij} at the
// second; per-bit ket flips with the i,j skip rules over the repeated x and
// y; U4 plus the |1>-vs-rest measurement at the right marker. The y scan of
// the first half is tagged S_{0,1,p} so that (S_{0,0,n+1}, #) stays a plain
// separator reset.
QcfaSpec build_a_n(int n);

// Executes the per-symbol (unitary, measurement, classical update) semantics.
// Explore mode forks on every outcome with probability above tol.branch;
// accept/reject are absorbing for the remaining symbols. Throws
// std::logic_error naming the pair if a reachable (state, symbol) has no
// transition.
QcfaRunResult run_qcfa(const QcfaSpec& spec, const Word& word,
                       const RunOptions& opts = {});

// JSON description of a spec (dims, pools, transition table) for inspection.
std::string spec_to_json_string(const QcfaSpec& spec, int indent = 2);

// Deterministic recognizer over {0, 1, #} with dense state ids.
struct DfaSpec {
  std::size_t state_count = 0;
  std::size_t start = 0;
  std::vector<std::array<std::size_t, 3>> transitions;  // per state: 0, 1, #
  std::vector<std::uint8_t> accepting;

  static std::size_t symbol_index(char symbol);
  std::size_t next(std::size_t state, char symbol) const;
};

// A correct deterministic recognizer for the promise language: records x in a
// binary trie, then y in a per-x trie, then verifies the repetition x#y
// symbol-by-symbol and accepts at the end iff H(x,y) in {0, 1, n-1, n}.
// Non-promise and malformed words fall into a reject trap. Guarded to n <= 8.
DfaSpec build_reference_dfa(int n);

bool run_dfa(const DfaSpec& dfa, const Word& word);  // true = accept

struct DfaBound {
  int n = 0;
  int bound = 0;  // smallest s with s^3 >= |F|
  std::size_t fooling_subset_size = 0;
  std::string certificate;
};

// Size lower bound for any 1DFA deciding the promise language, via the
// three-cut reduction to the communication problem and the pure fooling
// subset F from commproto::rectangle_bound. Guarded to n <= 12.
DfaBound dfa_size_lower_bound(int n);

}  // namespace exactq::qcfa
