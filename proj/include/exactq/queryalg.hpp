#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "exactq/qcore.hpp"

// The exact quantum query framework and the 2-query algorithm for the
// Hamming-weight promise problem
//
//   DJ'(x) = 1 if W(x) in {0, 1, n-1, n},  0 if W(x) = n/2,
//
// on even n >= 4 (n >= 4 keeps the two classes disjoint), together with a
// brute-force decision-tree oracle for the classical baseline.
//
// The register has D(n) = 1 + n + n(n-1)/2 + (n-2) basis states, listed as
// |0,0>, then |i,0> for 1<=i<=n, then |i,j> for 1<=i<j<=n in lexicographic
// order, then |k> for 1<=k<=n-2.

namespace exactq::queryalg {

using qcore::Complex;
using qcore::MeasurementSpec;
using qcore::RunMode;
using qcore::RunOptions;
using qcore::StateVector;
using qcore::Tolerances;
using qcore::UnitaryOp;

// Bijection between the structured basis labels and [0, D(n)).
class BasisIndexing {
 public:
  explicit BasisIndexing(int n);  // throws unless n even and >= 4

  int n() const { return n_; }
  std::size_t dim() const { return dim_; }

  std::size_t zero() const { return 0; }                 // |0,0>
  std::size_t single(int i) const;                       // |i,0>, 1 <= i <= n
  std::size_t pair(int i, int j) const;                  // |i,j>, 1 <= i < j <= n
  std::size_t ket(int k) const;                          // |k>, 1 <= k <= n-2

  enum class Kind { Zero, Single, Pair, Ket };
  struct Label {
    Kind kind;
    int i = 0;  // Single: i; Pair: i; Ket: k
    int j = 0;  // Pair: j
  };
  Label describe(std::size_t index) const;
  std::string label(std::size_t index) const;  // "|0,0>", "|3,0>", "|1,2>", "|2>"

 private:
  int n_;
  std::size_t dim_;
};

// basis index -> input bit position (0-based into the bitstring), or -1 when
// the basis state corresponds to no input bit.
struct OracleMap {
  std::vector<int> bit_for_index;

  static OracleMap none(std::size_t dim) { return {std::vector<int>(dim, -1)}; }
  void validate(std::size_t input_len) const;
};

struct DjInstance {
  int n = 0;
  std::string x;  // x[0] is bit 1

  static DjInstance make(int n, std::string x);
  int weight() const;
};

// 1 / 0 per the promise classes; nullopt when x is outside the promise.
std::optional<int> dj_prime_oracle(const DjInstance& inst);

// The four input-independent operators of the algorithm, on dim D(n).
// u1: |0,0> -> uniform over |i,0>.
// u2: |i,0> -> (1/sqrt(n))(|0,0> + sum_{j>i}|i,j> - sum_{j<i}|j,i>).
// u3: |1> (first ket state) -> uniform over |k>.
// u4: adjoint of u3.
// Off the specified columns the operators are fixed by complete_unitary.
UnitaryOp build_u1(int n, const Tolerances& tol = {});
UnitaryOp build_u2(int n, const Tolerances& tol = {});
UnitaryOp build_u3(int n, const Tolerances& tol = {});
UnitaryOp build_u4(int n, const Tolerances& tol = {});

// Input-independent machinery for one n: the four operators, the two
// measurement partitions used by the algorithm, and the collapse permutations
// |i,j> -> |1>. Shared by the query, protocol, and automaton layers.
struct OperatorSet {
  BasisIndexing ix;
  UnitaryOp u1, u2, u3, u4;
  MeasurementSpec window_measurement;  // groups |0,0>, each |i,j>, "other"
  MeasurementSpec final_measurement;   // groups |1> and "other"

  explicit OperatorSet(int n);

  const UnitaryOp& pair_to_first_ket(int i, int j) const;
  std::pair<int, int> pair_for_label(const std::string& outcome) const;

 private:
  std::vector<UnitaryOp> prep_;
  std::unordered_map<std::string, std::pair<int, int>> pair_of_;
};

// Process-wide cache of OperatorSet, built once per n (thread-safe).
const OperatorSet& operator_set(int n);

// The phase query: multiplies the amplitude at every basis index mapped to
// bit i by (-1)^{x_i}, leaves unmapped indices alone, and advances the
// caller's query counter by exactly one.
StateVector apply_phase_query(const StateVector& psi, const OracleMap& om,
                              std::string_view x, int& query_counter);

struct QueryBranch {
  std::vector<std::string> outcomes;  // measurement labels along the path
  double prob = 0.0;
  int answer = -1;
};

struct QueryRunResult {
  int n = 0;
  std::string x;
  int query_count = 0;  // 2 on every path
  std::vector<QueryBranch> branches;

  bool unanimous(int& answer_out) const;
};

// Runs the two-query algorithm. Explore mode follows every branch with
// probability above tol.branch; sample mode draws one path. Inputs outside
// the promise throw promise_violation unless opts.allow_nonpromise is set.
QueryRunResult run_dj_prime(const DjInstance& inst, const RunOptions& opts = {});

// Exact deterministic query complexity of DJ' at this n, by memoized minimax
// over partial assignments (adversary argument run to completion). Guarded to
// n <= 8.
int classical_dt_depth(int n);

}  // namespace exactq::queryalg
