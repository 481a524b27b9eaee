#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exactq/qcore.hpp"
#include "exactq/queryalg.hpp"

// Two-party communication layer for the Hamming-distance promise problem
//
//   EQ'(x, y) = 1 if H(x, y) in {0, 1, n-1, n},  0 if H(x, y) = n/2,
//
// on even n >= 4: the exact quantum protocol with its transcript and cost
// ledger, plus the fooling-set machinery behind the linear deterministic
// lower bound.
//
// Party isolation is structural: EqAlice holds only x, EqBob only y, and the
// sole conduit between them is an EqChannel, which records every message.

namespace exactq::commproto {

using qcore::Branch;
using qcore::RunMode;
using qcore::RunOptions;
using qcore::StateVector;
using qcore::Tolerances;

struct PromisePair {
  int n = 0;
  std::string x, y;  // x[0] / y[0] are bits x_1 / y_1

  static PromisePair make(int n, std::string x, std::string y);
  int hd() const;  // Hamming distance H(x, y)
};

// 1 / 0 per the promise classes; nullopt when (x, y) is outside the promise.
std::optional<int> eq_prime_oracle(const PromisePair& p);

struct ProtocolMessage {
  enum class Kind { Quantum, Classical };

  Kind kind = Kind::Quantum;
  std::string direction;    // "Alice->Bob" or "Bob->Alice"
  std::string description;
  // Size of the declared register (quantum) or value space (classical). The
  // charge follows the declaration, not the simulation's representation.
  std::size_t declared_dim = 0;
  int charge = 0;  // qubits for quantum messages, bits for classical ones

  std::optional<StateVector> quantum_payload;
  std::optional<std::pair<int, int>> classical_payload;
};

struct CostLedger {
  struct Step {
    std::string label;
    std::string unit;  // "qubits" or "bits"
    int charge = 0;
  };

  int qubits_total = 0;
  int bits_total = 0;
  std::vector<Step> per_step;

  void add(const std::string& label, const std::string& unit, int charge);
  bool same_totals(const CostLedger& other) const;
  bool same_steps(const CostLedger& other) const;  // per-step units and charges
};

struct Transcript {
  std::vector<ProtocolMessage> messages;
  CostLedger ledger;
};

// Worst-path closed form: ceil(log2 n^2) + ceil(log2 (n-2)) qubits and
// 2 ceil(log2 n) bits.
CostLedger cost_formula(int n);

// Smallest c with 2^c >= v (v >= 1).
int ceil_log2(std::size_t v);

// The single conduit between the parties. send() records the message in the
// transcript and leaves it in flight until the peer receives it.
class EqChannel {
 public:
  void send(ProtocolMessage msg);
  StateVector receive_quantum();
  std::pair<int, int> receive_classical();
  const Transcript& transcript() const { return transcript_; }

 private:
  Transcript transcript_;
  std::optional<ProtocolMessage> in_flight_;
};

// Alice's half of the protocol; sees only x.
class EqAlice {
 public:
  EqAlice(int n, std::string x);

  // Steps 1-3: |0,0>, U1, the phase U_x on the |i,0> block, send the state.
  void send_first_message(EqChannel& ch, const Tolerances& tol = {}) const;
  // Steps 7-9: receive (i,j), delete those positions from x, prepare
  // U_{x'} U3 |1>, send the state.
  void send_second_message(EqChannel& ch, const Tolerances& tol = {}) const;

 private:
  int n_;
  std::string x_;
};

// Bob's half of the protocol; sees only y.
class EqBob {
 public:
  EqBob(int n, std::string y);

  // Steps 4-6: receive, apply U_y then U2, measure. Outcomes are |0,0>,
  // some |i,j>, or the catch-all "other" (impossible on any input).
  std::vector<Branch> measure_first(EqChannel& ch, const Tolerances& tol = {}) const;
  // Step 6, long path: announce the measured (i, j) classically.
  void send_indices(EqChannel& ch, int i, int j) const;
  // Steps 10-12: receive, apply U_{y'} then U4, measure |1> vs "other".
  std::vector<Branch> measure_second(EqChannel& ch, int i, int j,
                                     const Tolerances& tol = {}) const;

 private:
  int n_;
  std::string y_;
};

struct EqBranch {
  std::vector<std::string> outcomes;  // measurement labels along the path
  double prob = 0.0;
  int answer = -1;
  Transcript transcript;  // messages exchanged along this path
};

struct EqRunResult {
  int n = 0;
  std::string x, y;
  std::vector<EqBranch> branches;

  bool unanimous(int& answer_out) const;
  // Branch with the largest qubit+bit charge (the long path when one exists).
  const EqBranch& worst_branch() const;
};

// Runs the protocol. Explore mode follows every measurement outcome with
// probability above tol.branch; sample mode draws one path. Pairs outside the
// promise throw promise_violation unless opts.allow_nonpromise is set.
EqRunResult run_eq_protocol(const PromisePair& p, const RunOptions& opts = {});

struct FoolingReport {
  int n = 0;
  int fooling_case = 0;  // 1: n/2 even; 2: n = 4k+2
  std::vector<std::pair<std::string, std::string>> E;
  std::vector<std::string> violations;
  long long cross_checks_passed = 0;
};

// The fooling set E of 1-inputs.
// Case 1 (n/2 even):     E = {(x,x), (x,~x) : W(x) = n/2},      |E| = 2 C(n, n/2).
// Case 2 (n = 4k+2):     E = {(x,x') : W(x) = n/2, x_n = 1}
//                        with x'_i = 1-x_i for i < n, x'_n = 1,  |E| = C(n-1, n/2-1).
FoolingReport build_fooling_set(int n);

// Exhaustive cross-pair check over E x E: whenever the first components meet
// in exactly the critical intersection (n/4 in Case 1, k+1 in Case 2), the
// cross pair (x, y') must be a 0-input, i.e. H(x, y') = n/2. Guarded to
// n <= 12.
FoolingReport verify_fooling_property(int n);

struct BoundReport {
  int n = 0;
  int fooling_case = 0;
  std::size_t e_size = 0;
  // log2(|E| / 1.99^n) in Case 1; log2(|E| / 1.99^{n-1}) in Case 2.
  double c1_lower = 0.0;
  // log2(2^{n+1} / (n 1.99^n)) in Case 1; log2(2^{n-1} / ((n-1) 1.99^{n-1}))
  // in Case 2. Reported as-is; negative at small n.
  double d_lower_formula_value = 0.0;
  // A pure fooling subset F of E: every unordered pair of elements meets in
  // exactly the critical intersection (exact search for |E| <= 16, greedy in
  // construction order otherwise).
  std::vector<std::pair<std::string, std::string>> fooling_subset;
  std::size_t fooling_subset_size = 0;
  int dfa_size_bound = 0;  // smallest s with s^3 >= |F|
};

BoundReport rectangle_bound(int n);

}  // namespace exactq::commproto
