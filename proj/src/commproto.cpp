#include "exactq/commproto.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "exactq/bits.hpp"

namespace exactq::commproto {

using queryalg::BasisIndexing;
using queryalg::OperatorSet;
using queryalg::operator_set;

namespace {

constexpr const char* kMsg1Label = "quantum message 1 (Alice->Bob)";
constexpr const char* kMsg2Label = "classical message (i,j) (Bob->Alice)";
constexpr const char* kMsg3Label = "quantum message 2 (Alice->Bob)";

void require_even_n(int n) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("n must be even and >= 4, got " + std::to_string(n));
  }
}

// Deletes 1-based positions i and j, keeping order.
std::string drop_positions(std::string_view s, int i, int j) {
  std::string out;
  out.reserve(s.size() - 2);
  for (std::size_t p = 0; p < s.size(); ++p) {
    const int pos = static_cast<int>(p) + 1;
    if (pos == i || pos == j) continue;
    out += s[p];
  }
  return out;
}

std::vector<std::uint8_t> single_flips(const BasisIndexing& ix, std::string_view bits) {
  std::vector<std::uint8_t> flip(ix.dim(), 0);
  for (int i = 1; i <= ix.n(); ++i) {
    flip[ix.single(i)] = bits[static_cast<std::size_t>(i - 1)] == '1';
  }
  return flip;
}

std::vector<std::uint8_t> ket_flips(const BasisIndexing& ix, std::string_view bits) {
  std::vector<std::uint8_t> flip(ix.dim(), 0);
  for (int k = 1; k <= ix.n() - 2; ++k) {
    flip[ix.ket(k)] = bits[static_cast<std::size_t>(k - 1)] == '1';
  }
  return flip;
}

}  // namespace

PromisePair PromisePair::make(int n, std::string x, std::string y) {
  require_even_n(n);
  bits::require_bitstring(x, static_cast<std::size_t>(n), "PromisePair x");
  bits::require_bitstring(y, static_cast<std::size_t>(n), "PromisePair y");
  return PromisePair{n, std::move(x), std::move(y)};
}

int PromisePair::hd() const { return bits::hamming(x, y); }

std::optional<int> eq_prime_oracle(const PromisePair& p) {
  if (p.x.size() != static_cast<std::size_t>(p.n) ||
      p.y.size() != static_cast<std::size_t>(p.n)) {
    throw std::invalid_argument("eq_prime_oracle: length mismatch");
  }
  const int h = p.hd();
  if (h == 0 || h == 1 || h == p.n - 1 || h == p.n) return 1;
  if (h == p.n / 2) return 0;
  return std::nullopt;
}

int ceil_log2(std::size_t v) {
  if (v == 0) throw std::invalid_argument("ceil_log2: v must be >= 1");
  return static_cast<int>(std::bit_width(v - 1));
}

void CostLedger::add(const std::string& label, const std::string& unit, int charge) {
  if (charge < 0) throw std::invalid_argument("CostLedger: negative charge");
  if (unit == "qubits") {
    qubits_total += charge;
  } else if (unit == "bits") {
    bits_total += charge;
  } else {
    throw std::invalid_argument("CostLedger: unit must be 'qubits' or 'bits'");
  }
  per_step.push_back({label, unit, charge});
}

bool CostLedger::same_totals(const CostLedger& other) const {
  return qubits_total == other.qubits_total && bits_total == other.bits_total;
}

bool CostLedger::same_steps(const CostLedger& other) const {
  if (per_step.size() != other.per_step.size()) return false;
  for (std::size_t i = 0; i < per_step.size(); ++i) {
    if (per_step[i].unit != other.per_step[i].unit ||
        per_step[i].charge != other.per_step[i].charge) {
      return false;
    }
  }
  return true;
}

CostLedger cost_formula(int n) {
  require_even_n(n);
  CostLedger ledger;
  ledger.add(kMsg1Label, "qubits", ceil_log2(static_cast<std::size_t>(n) * n));
  ledger.add(kMsg2Label, "bits", 2 * ceil_log2(static_cast<std::size_t>(n)));
  ledger.add(kMsg3Label, "qubits", ceil_log2(static_cast<std::size_t>(n - 2)));
  return ledger;
}

void EqChannel::send(ProtocolMessage msg) {
  if (in_flight_) {
    throw std::logic_error("EqChannel: previous message was never received");
  }
  transcript_.messages.push_back(msg);
  transcript_.ledger.add(msg.description,
                         msg.kind == ProtocolMessage::Kind::Quantum ? "qubits" : "bits",
                         msg.charge);
  in_flight_ = std::move(msg);
}

StateVector EqChannel::receive_quantum() {
  if (!in_flight_ || in_flight_->kind != ProtocolMessage::Kind::Quantum ||
      !in_flight_->quantum_payload) {
    throw std::logic_error("EqChannel: no quantum message in flight");
  }
  StateVector st = std::move(*in_flight_->quantum_payload);
  in_flight_.reset();
  return st;
}

std::pair<int, int> EqChannel::receive_classical() {
  if (!in_flight_ || in_flight_->kind != ProtocolMessage::Kind::Classical ||
      !in_flight_->classical_payload) {
    throw std::logic_error("EqChannel: no classical message in flight");
  }
  const std::pair<int, int> v = *in_flight_->classical_payload;
  in_flight_.reset();
  return v;
}

EqAlice::EqAlice(int n, std::string x) : n_(n), x_(std::move(x)) {
  require_even_n(n_);
  bits::require_bitstring(x_, static_cast<std::size_t>(n_), "EqAlice x");
}

void EqAlice::send_first_message(EqChannel& ch, const Tolerances& tol) const {
  const OperatorSet& ops = operator_set(n_);
  StateVector psi = qcore::basis_state(ops.ix.dim(), ops.ix.zero());
  psi = qcore::apply_unitary(ops.u1, psi, tol);
  psi = qcore::apply_sign_flips(psi, single_flips(ops.ix, x_));

  ProtocolMessage msg;
  msg.kind = ProtocolMessage::Kind::Quantum;
  msg.direction = "Alice->Bob";
  msg.description = kMsg1Label;
  msg.declared_dim = static_cast<std::size_t>(n_) * n_;
  msg.charge = ceil_log2(msg.declared_dim);
  msg.quantum_payload = std::move(psi);
  ch.send(std::move(msg));
}

void EqAlice::send_second_message(EqChannel& ch, const Tolerances& tol) const {
  const auto [i, j] = ch.receive_classical();
  if (i < 1 || i >= j || j > n_) {
    throw std::logic_error("EqAlice: received indices out of range");
  }
  const OperatorSet& ops = operator_set(n_);
  const std::string xp = drop_positions(x_, i, j);
  StateVector psi = qcore::basis_state(ops.ix.dim(), ops.ix.ket(1));
  psi = qcore::apply_unitary(ops.u3, psi, tol);
  psi = qcore::apply_sign_flips(psi, ket_flips(ops.ix, xp));

  ProtocolMessage msg;
  msg.kind = ProtocolMessage::Kind::Quantum;
  msg.direction = "Alice->Bob";
  msg.description = kMsg3Label;
  msg.declared_dim = static_cast<std::size_t>(n_ - 2);
  msg.charge = ceil_log2(msg.declared_dim);
  msg.quantum_payload = std::move(psi);
  ch.send(std::move(msg));
}

EqBob::EqBob(int n, std::string y) : n_(n), y_(std::move(y)) {
  require_even_n(n_);
  bits::require_bitstring(y_, static_cast<std::size_t>(n_), "EqBob y");
}

std::vector<Branch> EqBob::measure_first(EqChannel& ch, const Tolerances& tol) const {
  const OperatorSet& ops = operator_set(n_);
  StateVector psi = ch.receive_quantum();
  if (psi.dim() != ops.ix.dim()) {
    throw std::logic_error("EqBob: received state has the wrong dimension");
  }
  psi = qcore::apply_sign_flips(psi, single_flips(ops.ix, y_));
  psi = qcore::apply_unitary(ops.u2, psi, tol);
  return qcore::measure_branches(psi, ops.window_measurement, tol);
}

void EqBob::send_indices(EqChannel& ch, int i, int j) const {
  if (i < 1 || i >= j || j > n_) {
    throw std::invalid_argument("EqBob: indices out of range");
  }
  ProtocolMessage msg;
  msg.kind = ProtocolMessage::Kind::Classical;
  msg.direction = "Bob->Alice";
  msg.description = kMsg2Label;
  msg.declared_dim = static_cast<std::size_t>(n_) * n_;
  msg.charge = 2 * ceil_log2(static_cast<std::size_t>(n_));
  msg.classical_payload = std::make_pair(i, j);
  ch.send(std::move(msg));
}

std::vector<Branch> EqBob::measure_second(EqChannel& ch, int i, int j,
                                          const Tolerances& tol) const {
  const OperatorSet& ops = operator_set(n_);
  StateVector psi = ch.receive_quantum();
  if (psi.dim() != ops.ix.dim()) {
    throw std::logic_error("EqBob: received state has the wrong dimension");
  }
  const std::string yp = drop_positions(y_, i, j);
  psi = qcore::apply_sign_flips(psi, ket_flips(ops.ix, yp));
  psi = qcore::apply_unitary(ops.u4, psi, tol);
  return qcore::measure_branches(psi, ops.final_measurement, tol);
}

bool EqRunResult::unanimous(int& answer_out) const {
  if (branches.empty()) return false;
  const int a = branches.front().answer;
  for (const EqBranch& b : branches)
    if (b.answer != a) return false;
  answer_out = a;
  return true;
}

const EqBranch& EqRunResult::worst_branch() const {
  if (branches.empty()) throw std::logic_error("worst_branch: no branches");
  const EqBranch* best = &branches.front();
  int best_charge = best->transcript.ledger.qubits_total +
                    best->transcript.ledger.bits_total;
  for (const EqBranch& b : branches) {
    const int c = b.transcript.ledger.qubits_total + b.transcript.ledger.bits_total;
    if (c > best_charge) {
      best = &b;
      best_charge = c;
    }
  }
  return *best;
}

EqRunResult run_eq_protocol(const PromisePair& p, const RunOptions& opts) {
  const auto expected = eq_prime_oracle(p);
  if (!expected && !opts.allow_nonpromise) {
    throw qcore::promise_violation("run_eq_protocol: H(x,y) = " +
                                   std::to_string(p.hd()) +
                                   " is outside the promise for n = " +
                                   std::to_string(p.n));
  }
  const OperatorSet& ops = operator_set(p.n);

  EqRunResult result;
  result.n = p.n;
  result.x = p.x;
  result.y = p.y;

  std::mt19937_64 rng(opts.seed);
  const bool sampling = opts.mode == RunMode::Sample;

  EqAlice alice(p.n, p.x);
  EqBob bob(p.n, p.y);

  EqChannel ch;
  alice.send_first_message(ch, opts.tol);
  std::vector<Branch> level1 = bob.measure_first(ch, opts.tol);
  if (sampling) {
    level1 = {level1[qcore::sample_branch_index(level1, rng)]};
  }

  for (const Branch& b1 : level1) {
    if (b1.outcome == "other") {
      throw std::logic_error("run_eq_protocol: impossible outcome outside the "
                             "|0,0>/|i,j> groups carries probability " +
                             std::to_string(b1.prob));
    }
    if (b1.outcome == "|0,0>") {
      result.branches.push_back({{b1.outcome}, b1.prob, 1, ch.transcript()});
      continue;
    }
    const auto [i, j] = ops.pair_for_label(b1.outcome);
    const bool zi = (p.x[static_cast<std::size_t>(i - 1)] !=
                     p.y[static_cast<std::size_t>(i - 1)]);
    const bool zj = (p.x[static_cast<std::size_t>(j - 1)] !=
                     p.y[static_cast<std::size_t>(j - 1)]);
    if (zi == zj) {
      throw std::logic_error("run_eq_protocol: outcome " + b1.outcome +
                             " observed although x_i + y_i == x_j + y_j (mod 2)");
    }

    EqChannel branch_ch = ch;  // this path's continuation
    bob.send_indices(branch_ch, i, j);
    alice.send_second_message(branch_ch, opts.tol);
    std::vector<Branch> level2 = bob.measure_second(branch_ch, i, j, opts.tol);
    if (sampling) {
      level2 = {level2[qcore::sample_branch_index(level2, rng)]};
    }
    for (const Branch& b2 : level2) {
      result.branches.push_back({{b1.outcome, b2.outcome},
                                 b1.prob * b2.prob,
                                 b2.outcome == "|1>" ? 1 : 0,
                                 branch_ch.transcript()});
    }
  }
  return result;
}

namespace {

int fooling_case_of(int n) { return (n / 2) % 2 == 0 ? 1 : 2; }

int critical_intersection(int n) {
  // Case 1: n/4. Case 2 (n = 4k+2): k+1.
  return fooling_case_of(n) == 1 ? n / 4 : (n - 2) / 4 + 1;
}

}  // namespace

FoolingReport build_fooling_set(int n) {
  require_even_n(n);
  FoolingReport report;
  report.n = n;
  report.fooling_case = fooling_case_of(n);
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  if (report.fooling_case == 1) {
    for (std::uint32_t m = 0; m <= full; ++m) {
      if (std::popcount(m) != n / 2) continue;
      const std::string x = bits::string_from_mask(n, m);
      report.E.emplace_back(x, x);
      report.E.emplace_back(x, bits::string_from_mask(n, m ^ full));
    }
  } else {
    const std::uint32_t top = 1u << (n - 1);
    for (std::uint32_t m = 0; m <= full; ++m) {
      if (std::popcount(m) != n / 2 || !(m & top)) continue;
      const std::uint32_t mp = (~m & (top - 1)) | top;
      report.E.emplace_back(bits::string_from_mask(n, m),
                            bits::string_from_mask(n, mp));
    }
  }
  return report;
}

FoolingReport verify_fooling_property(int n) {
  require_even_n(n);
  if (n > 12) {
    throw qcore::cost_guard_error(
        "verify_fooling_property: exhaustive pair loop is guarded to n <= 12");
  }
  FoolingReport report = build_fooling_set(n);
  const int critical = critical_intersection(n);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;
  masks.reserve(report.E.size());
  for (const auto& [a, b] : report.E) {
    masks.emplace_back(bits::mask_from_string(a), bits::mask_from_string(b));
  }
  for (std::size_t s = 0; s < masks.size(); ++s) {
    for (std::size_t t = 0; t < masks.size(); ++t) {
      if (s == t) continue;
      const std::uint32_t x = masks[s].first;
      const std::uint32_t yp = masks[t].second;
      if (std::popcount(x & masks[t].first) != critical) continue;
      const int h = std::popcount(x ^ yp);
      if (h != n / 2) {
        report.violations.push_back(
            "(" + report.E[s].first + "," + report.E[s].second + ") vs (" +
            report.E[t].first + "," + report.E[t].second +
            "): H(x,y') = " + std::to_string(h) + " != " + std::to_string(n / 2));
      } else {
        ++report.cross_checks_passed;
      }
    }
  }
  return report;
}

BoundReport rectangle_bound(int n) {
  require_even_n(n);
  const FoolingReport fr = build_fooling_set(n);
  BoundReport report;
  report.n = n;
  report.fooling_case = fr.fooling_case;
  report.e_size = fr.E.size();

  const double log2_199 = std::log2(1.99);
  if (report.fooling_case == 1) {
    report.c1_lower = std::log2(static_cast<double>(report.e_size)) - n * log2_199;
    report.d_lower_formula_value =
        (n + 1) - std::log2(static_cast<double>(n)) - n * log2_199;
  } else {
    report.c1_lower =
        std::log2(static_cast<double>(report.e_size)) - (n - 1) * log2_199;
    report.d_lower_formula_value =
        (n - 1) - std::log2(static_cast<double>(n - 1)) - (n - 1) * log2_199;
  }

  const int critical = critical_intersection(n);
  std::vector<std::uint32_t> xm;
  xm.reserve(fr.E.size());
  for (const auto& [a, b] : fr.E) xm.push_back(bits::mask_from_string(a));
  const auto compatible = [&](std::size_t a, std::size_t b) {
    return std::popcount(xm[a] & xm[b]) == critical;
  };

  std::vector<std::size_t> chosen;
  if (fr.E.size() <= 16) {
    // Exact maximum pure subset by subset enumeration.
    const std::size_t m = fr.E.size();
    std::vector<std::uint32_t> adj(m, 0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b && compatible(a, b)) adj[a] |= (1u << b);
    for (std::uint32_t subset = 0; subset < (1u << m); ++subset) {
      if (static_cast<std::size_t>(std::popcount(subset)) <= chosen.size()) continue;
      bool ok = true;
      for (std::size_t a = 0; a < m && ok; ++a) {
        if (!(subset & (1u << a))) continue;
        if ((subset & ~(1u << a)) & ~adj[a]) ok = false;
      }
      if (ok) {
        chosen.clear();
        for (std::size_t a = 0; a < m; ++a)
          if (subset & (1u << a)) chosen.push_back(a);
      }
    }
  } else {
    // Greedy in construction order; deterministic and sound, not maximal.
    for (std::size_t a = 0; a < fr.E.size(); ++a) {
      bool ok = true;
      for (const std::size_t b : chosen) {
        if (!compatible(a, b)) {
          ok = false;
          break;
        }
      }
      if (ok) chosen.push_back(a);
    }
  }
  for (const std::size_t a : chosen) report.fooling_subset.push_back(fr.E[a]);
  report.fooling_subset_size = report.fooling_subset.size();

  int s = 1;
  while (static_cast<std::size_t>(s) * s * s < report.fooling_subset_size) ++s;
  report.dfa_size_bound = s;
  return report;
}

}  // namespace exactq::commproto
