#include "exactq/qcfa.hpp"

#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "exactq/bits.hpp"

namespace exactq::qcfa {

using qcore::apply_unitary;
using qcore::basis_state;
using qcore::measure_branches;
using queryalg::BasisIndexing;
using queryalg::OperatorSet;
using queryalg::operator_set;

Word Word::parse(std::string_view s) {
  for (char c : s) {
    if (c != '0' && c != '1' && c != '#') {
      throw std::invalid_argument(std::string("Word: invalid symbol '") + c +
                                  "' (alphabet is 0, 1, #)");
    }
  }
  return Word{std::string(s)};
}

std::string Word::framed() const {
  return std::string(1, kLeftMarker) + symbols + kRightMarker;
}

std::string ClassicalStateId::str() const {
  switch (tag) {
    case Tag::Accept:
      return "accept";
    case Tag::Reject:
      return "reject";
    case Tag::Normal:
      return "S_{" + std::to_string(i) + "," + std::to_string(j) + "," +
             std::to_string(p) + "}";
  }
  throw std::logic_error("ClassicalStateId: unreachable");
}

const QcfaSpec::Entry* QcfaSpec::find(const ClassicalStateId& s, char symbol) const {
  const auto it = table_.find({s, symbol});
  return it == table_.end() ? nullptr : &it->second;
}

std::size_t QcfaSpec::classical_state_count() const {
  std::set<ClassicalStateId> states;
  states.insert(initial_classical_);
  for (const auto& [key, entry] : table_) {
    states.insert(key.first);
    for (const auto& [outcome, target] : entry.next) states.insert(target);
  }
  return states.size();
}

void QcfaSpec::set_quantum(std::size_t dim, std::size_t initial_index) {
  if (initial_index >= dim) {
    throw std::invalid_argument("QcfaSpec: initial index out of range");
  }
  quantum_dim_ = dim;
  initial_quantum_index_ = initial_index;
}

void QcfaSpec::set_initial_classical(const ClassicalStateId& s) {
  initial_classical_ = s;
}

std::size_t QcfaSpec::add_operator(std::string name, UnitaryOp op) {
  if (op.dim() != quantum_dim_) {
    throw std::invalid_argument("QcfaSpec: operator " + name +
                                " has the wrong dimension");
  }
  operators_.emplace_back(std::move(name), std::move(op));
  return operators_.size() - 1;
}

std::size_t QcfaSpec::add_measurement(std::string name, MeasurementSpec m) {
  m.validate(quantum_dim_);
  measurements_.emplace_back(std::move(name), std::move(m));
  return measurements_.size() - 1;
}

void QcfaSpec::define(const ClassicalStateId& s, char symbol, Entry e) {
  if (e.op_index >= operators_.size() || e.measure_index >= measurements_.size()) {
    throw std::invalid_argument("QcfaSpec: entry references a missing pool item");
  }
  const auto [it, inserted] = table_.emplace(std::make_pair(s, symbol), std::move(e));
  if (!inserted) {
    throw std::logic_error("QcfaSpec: duplicate transition for (" + s.str() +
                           ", '" + symbol + "')");
  }
}

bool QcfaRunResult::unanimous(std::string& verdict_out) const {
  if (branches.empty()) return false;
  const std::string& v = branches.front().verdict;
  for (const QcfaBranch& b : branches)
    if (b.verdict != v) return false;
  verdict_out = v;
  return true;
}

std::optional<bool> a_n_oracle(int n, const Word& word) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("a_n_oracle: n must be even and >= 4");
  }
  const std::string& s = word.symbols;
  const std::size_t nn = static_cast<std::size_t>(n);
  if (s.size() != 4 * nn + 4) return std::nullopt;
  if (s[nn] != '#' || s[2 * nn + 1] != '#' || s[2 * nn + 2] != '#' ||
      s[3 * nn + 3] != '#') {
    return std::nullopt;
  }
  const std::string x = s.substr(0, nn);
  const std::string y = s.substr(nn + 1, nn);
  const std::string x2 = s.substr(2 * nn + 3, nn);
  const std::string y2 = s.substr(3 * nn + 4, nn);
  if (!bits::is_bitstring(x) || !bits::is_bitstring(y) ||
      !bits::is_bitstring(x2) || !bits::is_bitstring(y2)) {
    return std::nullopt;
  }
  if (x2 != x || y2 != y) return std::nullopt;
  const int h = bits::hamming(x, y);
  if (h == 0 || h == 1 || h == n - 1 || h == n) return true;
  if (h == n / 2) return false;
  return std::nullopt;
}

namespace {

// Ket index hit by the skip rules at position p of the repeated halves, or 0
// when p is one of the deleted positions i, j.
int skipped_ket(int i, int j, int p) {
  if (p == i || p == j) return 0;
  if (p < i) return p;
  if (p < j) return p - 1;
  return p - 2;
}

}  // namespace

QcfaSpec build_a_n(int n) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("build_a_n: n must be even and >= 4");
  }
  const OperatorSet& ops = operator_set(n);
  const BasisIndexing& ix = ops.ix;
  const std::size_t dim = ix.dim();

  QcfaSpec spec(n);
  spec.set_quantum(dim, ix.zero());
  spec.set_initial_classical(ClassicalStateId::normal(0, 0, 0));

  // Operator pool.
  const std::size_t op_id = spec.add_operator("I", UnitaryOp::identity(dim));
  const std::size_t op_u1 = spec.add_operator("U1", ops.u1);
  const std::size_t op_u2 = spec.add_operator("U2", ops.u2);
  const std::size_t op_u4 = spec.add_operator("U4", ops.u4);
  // U_{p,1}: phase -1 on every first-index-p state |p,0>, |p,j>.
  std::vector<std::size_t> op_phase(static_cast<std::size_t>(n) + 1, 0);
  for (int p = 1; p <= n; ++p) {
    std::vector<std::uint8_t> flip(dim, 0);
    flip[ix.single(p)] = 1;
    for (int j = p + 1; j <= n; ++j) flip[ix.pair(p, j)] = 1;
    op_phase[static_cast<std::size_t>(p)] = spec.add_operator(
        "U_{" + std::to_string(p) + ",1}", UnitaryOp::sign_diagonal(flip));
  }
  // Ket flips used by U_{ijp,1}.
  std::vector<std::size_t> op_ket_flip(static_cast<std::size_t>(n) - 1, 0);
  for (int k = 1; k <= n - 2; ++k) {
    std::vector<std::uint8_t> flip(dim, 0);
    flip[ix.ket(k)] = 1;
    op_ket_flip[static_cast<std::size_t>(k)] = spec.add_operator(
        "flip|" + std::to_string(k) + ">", UnitaryOp::sign_diagonal(flip));
  }
  // U3 U_{ij} composites for the second # of ##.
  std::map<std::pair<int, int>, std::size_t> op_u3_uij;
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      op_u3_uij[{i, j}] = spec.add_operator(
          "U3 U_{" + std::to_string(i) + "," + std::to_string(j) + "}",
          ops.u3 * ops.pair_to_first_ket(i, j));
    }
  }

  // Measurement pool.
  const std::size_t m_none = spec.add_measurement("none", MeasurementSpec::identity());
  const std::size_t m_window = spec.add_measurement("window", ops.window_measurement);
  const std::size_t m_final = spec.add_measurement("final", ops.final_measurement);

  const auto S = [](int i, int j, int p) { return ClassicalStateId::normal(i, j, p); };
  const auto chain = [&](const ClassicalStateId& s, std::size_t op,
                         char symbol, const ClassicalStateId& target) {
    QcfaSpec::Entry e;
    e.op_index = op;
    e.measure_index = m_none;
    e.next["c"] = target;
    spec.define(s, symbol, std::move(e));
  };

  // Step 1: left marker.
  chain(S(0, 0, 0), op_u1, kLeftMarker, S(0, 0, 1));
  // Step 2: scan x, phases on the first index.
  for (int p = 1; p <= n; ++p) {
    chain(S(0, 0, p), op_id, '0', S(0, 0, p + 1));
    chain(S(0, 0, p), op_phase[static_cast<std::size_t>(p)], '1', S(0, 0, p + 1));
  }
  // Step 3: the x|y separator resets the position; the y scan is tagged with
  // second index 1 so this pair stays distinct from the ## trigger below.
  chain(S(0, 0, n + 1), op_id, '#', S(0, 1, 1));
  // Step 4: scan y.
  for (int p = 1; p <= n; ++p) {
    chain(S(0, 1, p), op_id, '0', S(0, 1, p + 1));
    chain(S(0, 1, p), op_phase[static_cast<std::size_t>(p)], '1', S(0, 1, p + 1));
  }
  // Steps 5-6: first # of ##: U2, then the window measurement.
  {
    QcfaSpec::Entry e;
    e.op_index = op_u2;
    e.measure_index = m_window;
    e.next["|0,0>"] = ClassicalStateId::accept();
    for (int i = 1; i < n; ++i)
      for (int j = i + 1; j <= n; ++j)
        e.next[ix.label(ix.pair(i, j))] = S(i, j, 0);
    e.next["other"] = ClassicalStateId::reject();  // unreachable diagnostic trap
    spec.define(S(0, 1, n + 1), '#', std::move(e));
  }
  // Steps 7-11 for every surviving (i, j).
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      chain(S(i, j, 0), op_u3_uij[{i, j}], '#', S(i, j, 1));
      for (int p = 1; p <= n; ++p) {
        const int k = skipped_ket(i, j, p);
        chain(S(i, j, p), op_id, '0', S(i, j, p + 1));
        chain(S(i, j, p), k == 0 ? op_id : op_ket_flip[static_cast<std::size_t>(k)],
              '1', S(i, j, p + 1));
      }
      // Separator between the repeated x and y; both scans share S_{ijp}.
      chain(S(i, j, n + 1), op_id, '#', S(i, j, 1));
      // Step 11-12: right marker: U4, then accept iff |1>.
      QcfaSpec::Entry e;
      e.op_index = op_u4;
      e.measure_index = m_final;
      e.next["|1>"] = ClassicalStateId::accept();
      e.next["other"] = ClassicalStateId::reject();
      spec.define(S(i, j, n + 1), kRightMarker, std::move(e));
    }
  }
  return spec;
}

QcfaRunResult run_qcfa(const QcfaSpec& spec, const Word& word,
                       const RunOptions& opts) {
  const std::string tape = word.framed();

  QcfaRunResult result;
  result.n = spec.n();
  result.word = word.symbols;
  result.quantum_dim = spec.quantum_dim();

  std::mt19937_64 rng(opts.seed);
  const bool sampling = opts.mode == RunMode::Sample;

  struct Path {
    StateVector psi;
    ClassicalStateId s;
    double prob = 1.0;
    std::size_t pos = 0;
    std::vector<std::string> outcomes;
    std::vector<std::string> trace;
  };

  std::set<std::string> touched;
  std::vector<Path> stack;
  {
    Path start;
    start.psi = basis_state(spec.quantum_dim(), spec.initial_quantum_index());
    start.s = spec.initial_classical();
    start.trace.push_back(start.s.str());
    touched.insert(start.s.str());
    stack.push_back(std::move(start));
  }

  while (!stack.empty()) {
    Path path = std::move(stack.back());
    stack.pop_back();
    bool forked = false;

    while (path.pos < tape.size()) {
      const char symbol = tape[path.pos];
      if (path.s.tag != ClassicalStateId::Tag::Normal) {
        ++path.pos;  // absorbing: identity dynamics for the rest of the word
        continue;
      }
      const QcfaSpec::Entry* entry = spec.find(path.s, symbol);
      if (entry == nullptr) {
        throw std::logic_error(std::string("run_qcfa: no transition defined for (") +
                               path.s.str() + ", '" + symbol + "')");
      }
      path.psi = apply_unitary(spec.operators()[entry->op_index].second, path.psi,
                               opts.tol);
      const MeasurementSpec& m = spec.measurements()[entry->measure_index].second;
      std::vector<Branch> branches = measure_branches(path.psi, m, opts.tol);
      if (sampling && branches.size() > 1) {
        branches = {branches[qcore::sample_branch_index(branches, rng)]};
      }

      const auto advance = [&](Path& p, Branch& b) {
        p.psi = std::move(b.collapsed);
        p.prob *= b.prob;
        if (!m.identity_flag) p.outcomes.push_back(b.outcome);
        const auto it = entry->next.find(b.outcome);
        if (it == entry->next.end()) {
          throw std::logic_error("run_qcfa: no classical update for (" +
                                 p.s.str() + ", '" + symbol + "') on outcome " +
                                 b.outcome);
        }
        p.s = it->second;
        p.trace.push_back(p.s.str());
        touched.insert(p.s.str());
        ++p.pos;
      };

      if (branches.size() == 1) {
        advance(path, branches.front());
        continue;
      }
      // Push forks in reverse so exploration visits outcomes in order.
      for (std::size_t b = branches.size(); b-- > 0;) {
        Path fork = path;
        advance(fork, branches[b]);
        stack.push_back(std::move(fork));
      }
      forked = true;
      break;
    }
    if (forked) continue;

    QcfaBranch done;
    done.outcomes = std::move(path.outcomes);
    done.prob = path.prob;
    done.classical_trace = std::move(path.trace);
    switch (path.s.tag) {
      case ClassicalStateId::Tag::Accept:
        done.verdict = "accept";
        break;
      case ClassicalStateId::Tag::Reject:
        done.verdict = "reject";
        break;
      case ClassicalStateId::Tag::Normal:
        throw std::logic_error("run_qcfa: word ended in non-halting state " +
                               path.s.str());
    }
    result.branches.push_back(std::move(done));
  }

  result.classical_states_used = touched.size();
  return result;
}

std::string spec_to_json_string(const QcfaSpec& spec, int indent) {
  nlohmann::ordered_json doc;
  doc["n"] = spec.n();
  doc["quantum_dim"] = spec.quantum_dim();
  doc["initial_quantum_index"] = spec.initial_quantum_index();
  doc["initial_classical"] = spec.initial_classical().str();

  nlohmann::ordered_json op_names = nlohmann::ordered_json::array();
  for (const auto& [name, op] : spec.operators()) {
    op_names.push_back({{"name", name}, {"dim", op.dim()}});
  }
  doc["operators"] = std::move(op_names);

  nlohmann::ordered_json m_names = nlohmann::ordered_json::array();
  for (const auto& [name, m] : spec.measurements()) {
    m_names.push_back({{"name", name}, {"groups", m.identity_flag ? 0 : m.groups.size()}});
  }
  doc["measurements"] = std::move(m_names);

  std::set<std::string> states;
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& [key, entry] : spec.table()) {
    states.insert(key.first.str());
    nlohmann::ordered_json row;
    row["state"] = key.first.str();
    row["symbol"] = std::string(1, key.second);
    row["operator"] = spec.operators()[entry.op_index].first;
    row["measurement"] = spec.measurements()[entry.measure_index].first;
    nlohmann::ordered_json next;
    for (const auto& [outcome, target] : entry.next) {
      next[outcome] = target.str();
      states.insert(target.str());
    }
    row["next"] = std::move(next);
    table.push_back(std::move(row));
  }
  doc["classical_states"] = states;
  doc["classical_state_count"] = spec.classical_state_count();
  doc["transitions"] = std::move(table);
  return doc.dump(indent);
}

}  // namespace exactq::qcfa
