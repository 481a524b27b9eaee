#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Exact small-dimension quantum mechanics: dense state vectors and unitaries,
// deterministic unitary completion of partially specified maps, and exhaustive
// measurement-branch enumeration. Everything here is a pure function of its
// inputs; values are immutable after construction and safe to share between
// threads.

namespace exactq::qcore {

using Complex = std::complex<double>;

// Numeric tolerances used across the whole project. The defaults are part of
// the verification contract; callers may override them per run.
struct Tolerances {
  double unitary = 1e-10;  // max entrywise |U'U - I|
  double norm = 1e-9;      // state norms and branch-probability sums
  double branch = 1e-12;   // minimum probability of an emitted branch
};

// Thrown when an input violates the promise of a promise problem and the
// caller did not ask for non-promise inputs to be tolerated.
class promise_violation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a brute-force operation is asked to run beyond its cost guard.
class cost_guard_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class RunMode { Explore, Sample };

// Shared options for the run_* entry points. Explore mode follows every
// measurement outcome with probability above Tolerances::branch; sample mode
// draws one outcome per measurement from a seeded generator.
struct RunOptions {
  RunMode mode = RunMode::Explore;
  std::uint64_t seed = 0;
  bool allow_nonpromise = false;
  Tolerances tol{};
};

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim) : amps_(dim) {}

  std::size_t dim() const { return amps_.size(); }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  const std::vector<Complex>& amps() const { return amps_; }

  double norm_sq() const;
  double norm() const;
  bool is_normalized(double eps_norm) const;

 private:
  std::vector<Complex> amps_;
};

// <a|b>, conjugate-linear in the first argument.
Complex inner(const StateVector& a, const StateVector& b);

// Dense complex matrix with the column-as-image convention: column c holds
// the image of basis state c. Stored column-major.
class UnitaryOp {
 public:
  UnitaryOp() = default;
  explicit UnitaryOp(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

  static UnitaryOp identity(std::size_t dim);
  // Diagonal operator with entry -1 at indices where flip[i] != 0, +1 elsewhere.
  static UnitaryOp sign_diagonal(const std::vector<std::uint8_t>& flip);

  std::size_t dim() const { return dim_; }
  Complex& at(std::size_t row, std::size_t col) { return entries_[col * dim_ + row]; }
  const Complex& at(std::size_t row, std::size_t col) const {
    return entries_[col * dim_ + row];
  }
  const std::vector<Complex>& entries() const { return entries_; }

  StateVector column(std::size_t col) const;
  void set_column(std::size_t col, const StateVector& v);

  UnitaryOp adjoint() const;

  friend UnitaryOp operator*(const UnitaryOp& a, const UnitaryOp& b);
  bool bitwise_equal(const UnitaryOp& other) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;  // entries_[col * dim_ + row]
};

// Projective measurement given as a partition of basis indices into labeled
// outcome groups. identity_flag models the no-measurement case: a single
// fixed outcome with probability 1 and no collapse.
struct MeasurementSpec {
  struct Group {
    std::string label;
    std::vector<std::size_t> indices;
  };
  std::vector<Group> groups;
  bool identity_flag = false;
  std::string fixed_outcome = "c";

  static MeasurementSpec identity();
  // One group per basis index, labeled with the decimal index.
  static MeasurementSpec standard_basis(std::size_t dim);
  // Throws std::invalid_argument unless groups are disjoint and cover [0, dim).
  void validate(std::size_t dim) const;
};

struct Branch {
  std::string outcome;
  double prob = 0.0;
  StateVector collapsed;
};

struct UnitaryCheck {
  bool ok = false;
  double max_deviation = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};

// Amplitude 1 at `index`, 0 elsewhere. Throws std::invalid_argument if the
// index is out of range.
StateVector basis_state(std::size_t dim, std::size_t index);

// Matrix-vector product u * psi. Checks the dimension match and that the
// result norm equals the input norm within tol.norm.
StateVector apply_unitary(const UnitaryOp& u, const StateVector& psi,
                          const Tolerances& tol = {});

// Multiplies the amplitude at index i by -1 where flip[i] != 0. O(dim), used
// by the +-1 phase oracles.
StateVector apply_sign_flips(const StateVector& psi,
                             const std::vector<std::uint8_t>& flip);

// Extends the given pairwise-orthonormal columns to a full unitary. The
// completion is deterministic: free column slots are filled in ascending slot
// order by Gram-Schmidt over the canonical basis vectors e_0, e_1, ... taken
// in ascending index order, skipping candidates whose residual norm falls
// below 1e-8. Two projection passes per candidate keep orthogonality well
// under tol.unitary. Throws std::invalid_argument when the fixed columns are
// not orthonormal, naming the offending pair and its inner product.
UnitaryOp complete_unitary(
    std::size_t dim,
    const std::vector<std::pair<std::size_t, StateVector>>& fixed_columns,
    const Tolerances& tol = {});

// One Branch per outcome group with probability above tol.branch; collapsed
// states are renormalized projections. Group probabilities must sum to
// 1 +- tol.norm. With identity_flag set, returns the single fixed outcome.
std::vector<Branch> measure_branches(const StateVector& psi,
                                     const MeasurementSpec& m,
                                     const Tolerances& tol = {});

// True iff max entrywise |U'U - I| <= eps; the report carries the maximum
// deviation and its position.
UnitaryCheck check_unitary(const UnitaryOp& u, double eps);

// Draws a branch index with probability proportional to prob (renormalized
// over the given list). Deterministic given the RNG state.
std::size_t sample_branch_index(const std::vector<Branch>& branches,
                                std::mt19937_64& rng);

}  // namespace exactq::qcore
