#include "exactq/queryalg.hpp"

#include <bit>
#include <climits>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <unordered_map>

#include "exactq/bits.hpp"

namespace exactq::queryalg {

using qcore::basis_state;
using qcore::Branch;
using qcore::MeasurementSpec;
using qcore::apply_unitary;
using qcore::measure_branches;

namespace {

void require_even_n(int n) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("n must be even and >= 4, got " + std::to_string(n));
  }
}

}  // namespace

BasisIndexing::BasisIndexing(int n) : n_(n) {
  require_even_n(n);
  dim_ = static_cast<std::size_t>(1 + n + n * (n - 1) / 2 + (n - 2));
}

std::size_t BasisIndexing::single(int i) const {
  if (i < 1 || i > n_) throw std::invalid_argument("single: i out of range");
  return static_cast<std::size_t>(i);
}

std::size_t BasisIndexing::pair(int i, int j) const {
  if (i < 1 || i >= j || j > n_) throw std::invalid_argument("pair: need 1 <= i < j <= n");
  // pairs with first index < i, then offset within row i
  const int before = (i - 1) * n_ - (i * (i - 1)) / 2;
  return static_cast<std::size_t>(n_ + 1 + before + (j - i - 1));
}

std::size_t BasisIndexing::ket(int k) const {
  if (k < 1 || k > n_ - 2) throw std::invalid_argument("ket: k out of range");
  return static_cast<std::size_t>(1 + n_ + n_ * (n_ - 1) / 2 + (k - 1));
}

BasisIndexing::Label BasisIndexing::describe(std::size_t index) const {
  if (index >= dim_) throw std::invalid_argument("describe: index out of range");
  if (index == 0) return {Kind::Zero};
  if (index <= static_cast<std::size_t>(n_)) {
    return {Kind::Single, static_cast<int>(index)};
  }
  const std::size_t first_ket = ket(1);
  if (index >= first_ket) {
    return {Kind::Ket, static_cast<int>(index - first_ket) + 1};
  }
  std::size_t off = index - static_cast<std::size_t>(n_) - 1;
  for (int i = 1; i < n_; ++i) {
    const std::size_t row = static_cast<std::size_t>(n_ - i);
    if (off < row) return {Kind::Pair, i, i + 1 + static_cast<int>(off)};
    off -= row;
  }
  throw std::logic_error("describe: unreachable");
}

std::string BasisIndexing::label(std::size_t index) const {
  const Label l = describe(index);
  switch (l.kind) {
    case Kind::Zero:
      return "|0,0>";
    case Kind::Single:
      return "|" + std::to_string(l.i) + ",0>";
    case Kind::Pair:
      return "|" + std::to_string(l.i) + "," + std::to_string(l.j) + ">";
    case Kind::Ket:
      return "|" + std::to_string(l.i) + ">";
  }
  throw std::logic_error("label: unreachable");
}

void OracleMap::validate(std::size_t input_len) const {
  for (int b : bit_for_index) {
    if (b < -1 || b >= static_cast<int>(input_len)) {
      throw std::invalid_argument("OracleMap: bit index " + std::to_string(b) +
                                  " out of range for input length " +
                                  std::to_string(input_len));
    }
  }
}

DjInstance DjInstance::make(int n, std::string x) {
  require_even_n(n);
  bits::require_bitstring(x, static_cast<std::size_t>(n), "DjInstance");
  return DjInstance{n, std::move(x)};
}

int DjInstance::weight() const { return bits::weight(x); }

std::optional<int> dj_prime_oracle(const DjInstance& inst) {
  if (inst.x.size() != static_cast<std::size_t>(inst.n)) {
    throw std::invalid_argument("dj_prime_oracle: length mismatch");
  }
  const int w = inst.weight();
  if (w == 0 || w == 1 || w == inst.n - 1 || w == inst.n) return 1;
  if (w == inst.n / 2) return 0;
  return std::nullopt;
}

UnitaryOp build_u1(int n, const Tolerances& tol) {
  require_even_n(n);
  const BasisIndexing ix(n);
  StateVector img(ix.dim());
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 1; i <= n; ++i) img[ix.single(i)] = a;
  return qcore::complete_unitary(ix.dim(), {{ix.zero(), img}}, tol);
}

UnitaryOp build_u2(int n, const Tolerances& tol) {
  require_even_n(n);
  const BasisIndexing ix(n);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<std::pair<std::size_t, StateVector>> cols;
  cols.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    StateVector img(ix.dim());
    img[ix.zero()] = a;
    for (int j = i + 1; j <= n; ++j) img[ix.pair(i, j)] = a;
    for (int j = 1; j < i; ++j) img[ix.pair(j, i)] = -a;
    cols.emplace_back(ix.single(i), std::move(img));
  }
  return qcore::complete_unitary(ix.dim(), cols, tol);
}

UnitaryOp build_u3(int n, const Tolerances& tol) {
  require_even_n(n);
  const BasisIndexing ix(n);
  StateVector img(ix.dim());
  const double a = 1.0 / std::sqrt(static_cast<double>(n - 2));
  for (int k = 1; k <= n - 2; ++k) img[ix.ket(k)] = a;
  return qcore::complete_unitary(ix.dim(), {{ix.ket(1), img}}, tol);
}

UnitaryOp build_u4(int n, const Tolerances& tol) { return build_u3(n, tol).adjoint(); }

StateVector apply_phase_query(const StateVector& psi, const OracleMap& om,
                              std::string_view x, int& query_counter) {
  if (om.bit_for_index.size() != psi.dim()) {
    throw std::invalid_argument("apply_phase_query: map dimension mismatch");
  }
  om.validate(x.size());
  StateVector out = psi;
  for (std::size_t idx = 0; idx < psi.dim(); ++idx) {
    const int b = om.bit_for_index[idx];
    if (b >= 0 && x[static_cast<std::size_t>(b)] == '1') out[idx] = -out[idx];
  }
  ++query_counter;
  return out;
}

bool QueryRunResult::unanimous(int& answer_out) const {
  if (branches.empty()) return false;
  const int a = branches.front().answer;
  for (const QueryBranch& b : branches)
    if (b.answer != a) return false;
  answer_out = a;
  return true;
}

OperatorSet::OperatorSet(int n)
    : ix(n), u1(build_u1(n)), u2(build_u2(n)), u3(build_u3(n)), u4(build_u4(n)) {
  MeasurementSpec m1;
  m1.groups.push_back({"|0,0>", {ix.zero()}});
  MeasurementSpec::Group other{"other", {}};
  for (int i = 1; i <= n; ++i) other.indices.push_back(ix.single(i));
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const std::string lbl = ix.label(ix.pair(i, j));
      m1.groups.push_back({lbl, {ix.pair(i, j)}});
      pair_of_[lbl] = {i, j};
      prep_.push_back(qcore::complete_unitary(
          ix.dim(), {{ix.pair(i, j), basis_state(ix.dim(), ix.ket(1))}}));
    }
  }
  for (int k = 1; k <= n - 2; ++k) other.indices.push_back(ix.ket(k));
  m1.groups.push_back(std::move(other));
  window_measurement = std::move(m1);

  MeasurementSpec m2;
  m2.groups.push_back({"|1>", {ix.ket(1)}});
  MeasurementSpec::Group rest{"other", {}};
  for (std::size_t idx = 0; idx < ix.dim(); ++idx)
    if (idx != ix.ket(1)) rest.indices.push_back(idx);
  m2.groups.push_back(std::move(rest));
  final_measurement = std::move(m2);
}

const UnitaryOp& OperatorSet::pair_to_first_ket(int i, int j) const {
  if (i < 1 || i >= j || j > ix.n()) {
    throw std::invalid_argument("pair_to_first_ket: need 1 <= i < j <= n");
  }
  const int before = (i - 1) * ix.n() - (i * (i - 1)) / 2;
  return prep_[static_cast<std::size_t>(before + (j - i - 1))];
}

std::pair<int, int> OperatorSet::pair_for_label(const std::string& outcome) const {
  const auto it = pair_of_.find(outcome);
  if (it == pair_of_.end()) {
    throw std::invalid_argument("pair_for_label: " + outcome +
                                " is not an |i,j> outcome");
  }
  return it->second;
}

const OperatorSet& operator_set(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const OperatorSet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<const OperatorSet>(n)).first;
  }
  return *it->second;
}

namespace {

// Deletes bits i and j (1-based) from x, keeping order.
std::string residual_bits(std::string_view x, int i, int j) {
  std::string y;
  y.reserve(x.size() - 2);
  for (std::size_t p = 0; p < x.size(); ++p) {
    const int pos = static_cast<int>(p) + 1;
    if (pos == i || pos == j) continue;
    y += x[p];
  }
  return y;
}

}  // namespace

QueryRunResult run_dj_prime(const DjInstance& inst, const RunOptions& opts) {
  const auto expected = dj_prime_oracle(inst);
  if (!expected && !opts.allow_nonpromise) {
    throw qcore::promise_violation("run_dj_prime: W(x) = " +
                                   std::to_string(inst.weight()) +
                                   " is outside the promise for n = " +
                                   std::to_string(inst.n));
  }
  const OperatorSet& ops = operator_set(inst.n);
  const BasisIndexing& ix = ops.ix;

  QueryRunResult result;
  result.n = inst.n;
  result.x = inst.x;

  std::mt19937_64 rng(opts.seed);
  const bool sampling = opts.mode == RunMode::Sample;

  OracleMap first_query = OracleMap::none(ix.dim());
  for (int i = 1; i <= inst.n; ++i) first_query.bit_for_index[ix.single(i)] = i - 1;

  int ticks = 0;
  StateVector psi = basis_state(ix.dim(), ix.zero());
  psi = apply_unitary(ops.u1, psi, opts.tol);
  psi = apply_phase_query(psi, first_query, inst.x, ticks);
  psi = apply_unitary(ops.u2, psi, opts.tol);

  std::vector<Branch> level1 = measure_branches(psi, ops.window_measurement, opts.tol);
  if (sampling) {
    level1 = {level1[qcore::sample_branch_index(level1, rng)]};
  }

  for (const Branch& b1 : level1) {
    if (b1.outcome == "other") {
      throw std::logic_error("run_dj_prime: impossible outcome outside the "
                             "|0,0>/|i,j> groups carries probability " +
                             std::to_string(b1.prob));
    }
    if (b1.outcome == "|0,0>") {
      // The answer is already determined; the second query slot still runs,
      // with no basis state corresponding to any input bit, so every path
      // charges exactly two queries.
      int t = ticks;
      (void)apply_phase_query(b1.collapsed, OracleMap::none(ix.dim()), inst.x, t);
      result.query_count = t;
      result.branches.push_back({{b1.outcome}, b1.prob, 1});
      continue;
    }
    const auto [i, j] = ops.pair_for_label(b1.outcome);
    if (inst.x[static_cast<std::size_t>(i - 1)] == inst.x[static_cast<std::size_t>(j - 1)]) {
      throw std::logic_error("run_dj_prime: outcome " + b1.outcome +
                             " observed although x_i == x_j");
    }
    const std::string y = residual_bits(inst.x, i, j);
    OracleMap second = OracleMap::none(ix.dim());
    for (int k = 1; k <= inst.n - 2; ++k) second.bit_for_index[ix.ket(k)] = k - 1;

    int t = ticks;
    StateVector phi = apply_unitary(ops.pair_to_first_ket(i, j), b1.collapsed, opts.tol);
    phi = apply_unitary(ops.u3, phi, opts.tol);
    phi = apply_phase_query(phi, second, y, t);
    phi = apply_unitary(ops.u4, phi, opts.tol);
    result.query_count = t;

    std::vector<Branch> level2 =
        measure_branches(phi, ops.final_measurement, opts.tol);
    if (sampling) {
      level2 = {level2[qcore::sample_branch_index(level2, rng)]};
    }
    for (const Branch& b2 : level2) {
      const int answer = b2.outcome == "|1>" ? 1 : 0;
      result.branches.push_back({{b1.outcome, b2.outcome}, b1.prob * b2.prob, answer});
    }
  }
  return result;
}

int classical_dt_depth(int n) {
  require_even_n(n);
  if (n > 8) {
    throw qcore::cost_guard_error(
        "classical_dt_depth: exhaustive minimax is guarded to n <= 8");
  }
  const int full = 1 << n;
  std::vector<std::int8_t> memo(static_cast<std::size_t>(full) * full, -1);

  const std::function<int(int, int)> value = [&](int queried, int ones) -> int {
    std::int8_t& slot = memo[static_cast<std::size_t>(queried) * full + ones];
    if (slot >= 0) return slot;
    const int a = std::popcount(static_cast<unsigned>(queried));
    const int w = std::popcount(static_cast<unsigned>(ones));
    const int r = n - a;
    bool one_consistent = false;
    for (const int t : {0, 1, n - 1, n}) {
      if (t >= w && t <= w + r) {
        one_consistent = true;
        break;
      }
    }
    const bool zero_consistent = (n / 2 >= w && n / 2 <= w + r);
    if (!(one_consistent && zero_consistent)) return slot = 0;
    int best = INT_MAX;
    for (int i = 0; i < n; ++i) {
      const int bit = 1 << i;
      if (queried & bit) continue;
      const int worst =
          std::max(value(queried | bit, ones), value(queried | bit, ones | bit));
      best = std::min(best, 1 + worst);
    }
    return slot = static_cast<std::int8_t>(best);
  };
  return value(0, 0);
}

}  // namespace exactq::queryalg
