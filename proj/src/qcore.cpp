#include "exactq/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace exactq::qcore {

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const Complex& a : amps_) s += std::norm(a);
  return s;
}

double StateVector::norm() const { return std::sqrt(norm_sq()); }

bool StateVector::is_normalized(double eps_norm) const {
  return std::abs(norm() - 1.0) <= eps_norm;
}

Complex inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("inner: dimension mismatch");
  }
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

UnitaryOp UnitaryOp::identity(std::size_t dim) {
  UnitaryOp u(dim);
  for (std::size_t i = 0; i < dim; ++i) u.at(i, i) = 1.0;
  return u;
}

UnitaryOp UnitaryOp::sign_diagonal(const std::vector<std::uint8_t>& flip) {
  UnitaryOp u(flip.size());
  for (std::size_t i = 0; i < flip.size(); ++i) u.at(i, i) = flip[i] ? -1.0 : 1.0;
  return u;
}

StateVector UnitaryOp::column(std::size_t col) const {
  StateVector v(dim_);
  for (std::size_t r = 0; r < dim_; ++r) v[r] = at(r, col);
  return v;
}

void UnitaryOp::set_column(std::size_t col, const StateVector& v) {
  if (v.dim() != dim_) throw std::invalid_argument("set_column: dimension mismatch");
  for (std::size_t r = 0; r < dim_; ++r) at(r, col) = v[r];
}

UnitaryOp UnitaryOp::adjoint() const {
  UnitaryOp u(dim_);
  for (std::size_t c = 0; c < dim_; ++c)
    for (std::size_t r = 0; r < dim_; ++r) u.at(c, r) = std::conj(at(r, c));
  return u;
}

UnitaryOp operator*(const UnitaryOp& a, const UnitaryOp& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("operator*: dimension mismatch");
  const std::size_t d = a.dim();
  UnitaryOp out(d);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t k = 0; k < d; ++k) {
      const Complex bkc = b.at(k, c);
      if (bkc == Complex{}) continue;
      for (std::size_t r = 0; r < d; ++r) out.at(r, c) += a.at(r, k) * bkc;
    }
  }
  return out;
}

bool UnitaryOp::bitwise_equal(const UnitaryOp& other) const {
  if (dim_ != other.dim_) return false;
  return std::memcmp(entries_.data(), other.entries_.data(),
                     entries_.size() * sizeof(Complex)) == 0;
}

MeasurementSpec MeasurementSpec::identity() {
  MeasurementSpec m;
  m.identity_flag = true;
  return m;
}

MeasurementSpec MeasurementSpec::standard_basis(std::size_t dim) {
  MeasurementSpec m;
  m.groups.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m.groups.push_back({std::to_string(i), {i}});
  }
  return m;
}

void MeasurementSpec::validate(std::size_t dim) const {
  if (identity_flag) return;
  std::vector<std::uint8_t> seen(dim, 0);
  for (const Group& g : groups) {
    for (std::size_t i : g.indices) {
      if (i >= dim) {
        throw std::invalid_argument("MeasurementSpec: index " + std::to_string(i) +
                                    " out of range for dim " + std::to_string(dim));
      }
      if (seen[i]) {
        throw std::invalid_argument("MeasurementSpec: index " + std::to_string(i) +
                                    " appears in two groups");
      }
      seen[i] = 1;
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (!seen[i]) {
      throw std::invalid_argument("MeasurementSpec: index " + std::to_string(i) +
                                  " not covered by any group");
    }
  }
}

StateVector basis_state(std::size_t dim, std::size_t index) {
  if (index >= dim) {
    throw std::invalid_argument("basis_state: index " + std::to_string(index) +
                                " out of range for dim " + std::to_string(dim));
  }
  StateVector v(dim);
  v[index] = 1.0;
  return v;
}

StateVector apply_unitary(const UnitaryOp& u, const StateVector& psi,
                          const Tolerances& tol) {
  if (u.dim() != psi.dim()) {
    throw std::invalid_argument("apply_unitary: dimension mismatch (" +
                                std::to_string(u.dim()) + " vs " +
                                std::to_string(psi.dim()) + ")");
  }
  const std::size_t d = psi.dim();
  StateVector out(d);
  for (std::size_t c = 0; c < d; ++c) {
    const Complex amp = psi[c];
    if (amp == Complex{}) continue;
    for (std::size_t r = 0; r < d; ++r) out[r] += u.at(r, c) * amp;
  }
  if (std::abs(out.norm() - psi.norm()) > tol.norm) {
    throw std::logic_error("apply_unitary: norm not preserved");
  }
  return out;
}

StateVector apply_sign_flips(const StateVector& psi,
                             const std::vector<std::uint8_t>& flip) {
  if (flip.size() != psi.dim()) {
    throw std::invalid_argument("apply_sign_flips: dimension mismatch");
  }
  StateVector out = psi;
  for (std::size_t i = 0; i < flip.size(); ++i) {
    if (flip[i]) out[i] = -out[i];
  }
  return out;
}

namespace {

// Subtracts the projections of v onto every filled column, in ascending
// column-index order. Run twice per candidate for numerical orthogonality.
void project_out(const UnitaryOp& u, const std::vector<std::uint8_t>& filled,
                 StateVector& v) {
  const std::size_t d = u.dim();
  for (std::size_t c = 0; c < d; ++c) {
    if (!filled[c]) continue;
    Complex coef = 0.0;
    for (std::size_t r = 0; r < d; ++r) coef += std::conj(u.at(r, c)) * v[r];
    if (coef == Complex{}) continue;
    for (std::size_t r = 0; r < d; ++r) v[r] -= coef * u.at(r, c);
  }
}

}  // namespace

UnitaryOp complete_unitary(
    std::size_t dim,
    const std::vector<std::pair<std::size_t, StateVector>>& fixed_columns,
    const Tolerances& tol) {
  constexpr double kResidualSkip = 1e-8;

  UnitaryOp u(dim);
  std::vector<std::uint8_t> filled(dim, 0);

  for (const auto& [idx, v] : fixed_columns) {
    if (idx >= dim) {
      throw std::invalid_argument("complete_unitary: column index out of range");
    }
    if (v.dim() != dim) {
      throw std::invalid_argument("complete_unitary: column dimension mismatch");
    }
    if (filled[idx]) {
      throw std::invalid_argument("complete_unitary: duplicate column index " +
                                  std::to_string(idx));
    }
    u.set_column(idx, v);
    filled[idx] = 1;
  }

  // Orthonormality of the fixed set, reported pairwise.
  for (std::size_t a = 0; a < fixed_columns.size(); ++a) {
    for (std::size_t b = a; b < fixed_columns.size(); ++b) {
      const Complex ip = inner(fixed_columns[a].second, fixed_columns[b].second);
      const double expected = (a == b) ? 1.0 : 0.0;
      if (std::abs(ip - expected) > tol.unitary) {
        std::ostringstream msg;
        msg << "complete_unitary: fixed columns " << fixed_columns[a].first
            << " and " << fixed_columns[b].first << " not orthonormal, <a|b> = ("
            << ip.real() << ", " << ip.imag() << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  }

  std::size_t candidate = 0;
  for (std::size_t slot = 0; slot < dim; ++slot) {
    if (filled[slot]) continue;
    bool placed = false;
    while (candidate < dim) {
      StateVector v = basis_state(dim, candidate);
      ++candidate;
      project_out(u, filled, v);
      project_out(u, filled, v);
      const double n = v.norm();
      if (n < kResidualSkip) continue;
      for (std::size_t r = 0; r < dim; ++r) v[r] /= n;
      u.set_column(slot, v);
      filled[slot] = 1;
      placed = true;
      break;
    }
    if (!placed) {
      throw std::logic_error("complete_unitary: ran out of canonical candidates");
    }
  }
  return u;
}

std::vector<Branch> measure_branches(const StateVector& psi,
                                     const MeasurementSpec& m,
                                     const Tolerances& tol) {
  if (m.identity_flag) {
    return {Branch{m.fixed_outcome, 1.0, psi}};
  }
  if (!psi.is_normalized(tol.norm)) {
    throw std::logic_error("measure_branches: state not normalized");
  }
  m.validate(psi.dim());

  std::vector<Branch> out;
  double total = 0.0;
  for (const MeasurementSpec::Group& g : m.groups) {
    double p = 0.0;
    for (std::size_t i : g.indices) p += std::norm(psi[i]);
    total += p;
    if (p <= tol.branch) continue;
    StateVector collapsed(psi.dim());
    const double scale = 1.0 / std::sqrt(p);
    for (std::size_t i : g.indices) collapsed[i] = psi[i] * scale;
    out.push_back(Branch{g.label, p, std::move(collapsed)});
  }
  if (std::abs(total - 1.0) > tol.norm) {
    throw std::logic_error("measure_branches: branch probabilities sum to " +
                           std::to_string(total));
  }
  return out;
}

UnitaryCheck check_unitary(const UnitaryOp& u, double eps) {
  const std::size_t d = u.dim();
  UnitaryCheck rep;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      // entry (r, c) of U'U
      Complex s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += std::conj(u.at(k, r)) * u.at(k, c);
      const double dev = std::abs(s - (r == c ? Complex{1.0} : Complex{}));
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.row = r;
        rep.col = c;
      }
    }
  }
  rep.ok = rep.max_deviation <= eps;
  return rep;
}

std::size_t sample_branch_index(const std::vector<Branch>& branches,
                                std::mt19937_64& rng) {
  if (branches.empty()) {
    throw std::invalid_argument("sample_branch_index: empty branch list");
  }
  double total = 0.0;
  for (const Branch& b : branches) total += b.prob;
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double r = dist(rng) * total;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    r -= branches[i].prob;
    if (r <= 0.0) return i;
  }
  return branches.size() - 1;
}

}  // namespace exactq::qcore
