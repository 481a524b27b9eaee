#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "exactq/qcore.hpp"

using namespace exactq::qcore;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

StateVector uniform_state(std::size_t dim) {
  StateVector psi(dim);
  const double a = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t i = 0; i < dim; ++i) psi[i] = a;
  return psi;
}

}  // namespace

TEST_SUITE("qcore") {

TEST_CASE("basis_state puts a single unit amplitude") {
  const StateVector e2 = basis_state(5, 2);
  CHECK(e2.dim() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(e2[i] == Complex(i == 2 ? 1.0 : 0.0, 0.0));
  }
  CHECK(e2.is_normalized(1e-12));
  CHECK_THROWS_AS((void)basis_state(5, 5), std::invalid_argument);
}

TEST_CASE("norms and the inner product") {
  StateVector v(2);
  v[0] = Complex(3.0, 0.0);
  v[1] = Complex(0.0, 4.0);
  CHECK(v.norm_sq() == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(v.norm() == doctest::Approx(5.0).epsilon(1e-14));
  CHECK_FALSE(v.is_normalized(1e-9));

  // Conjugate-linear in the first slot: <i e0, e0> = -i.
  StateVector a(2), b(2);
  a[0] = Complex(0.0, 1.0);
  b[0] = Complex(1.0, 0.0);
  const Complex ip = inner(a, b);
  CHECK(ip.real() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ip.imag() == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("identity and sign_diagonal act as expected") {
  const UnitaryOp id = UnitaryOp::identity(4);
  const StateVector psi = uniform_state(4);
  const StateVector same = apply_unitary(id, psi);
  for (std::size_t i = 0; i < 4; ++i) CHECK(same[i] == psi[i]);

  const std::vector<std::uint8_t> flip = {0, 1, 0, 1};
  const UnitaryOp d = UnitaryOp::sign_diagonal(flip);
  const StateVector flipped = apply_unitary(d, psi);
  const StateVector direct = apply_sign_flips(psi, flip);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(flipped[i].real() == doctest::Approx(direct[i].real()).epsilon(1e-14));
    const double want = (i % 2 == 1) ? -psi[i].real() : psi[i].real();
    CHECK(flipped[i].real() == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("apply_unitary rejects dimension mismatches and norm loss") {
  const UnitaryOp id3 = UnitaryOp::identity(3);
  CHECK_THROWS_AS((void)apply_unitary(id3, uniform_state(4)), std::invalid_argument);

  // A mid-run norm drift is a broken invariant, not a bad argument.
  UnitaryOp shrink = UnitaryOp::identity(2);
  shrink.at(0, 0) = Complex(0.5, 0.0);  // not norm preserving
  CHECK_THROWS_AS((void)apply_unitary(shrink, basis_state(2, 0)),
                  std::logic_error);
}

TEST_CASE("complete_unitary reproduces the hand-worked 2x2 example") {
  // Fix column 0 = (1,1)/sqrt(2). Gram-Schmidt over e0, e1 fills column 1
  // with (1,-1)/sqrt(2): e0 survives with residual (1/2, -1/2).
  StateVector c0(2);
  c0[0] = c0[1] = Complex(kInvSqrt2, 0.0);
  const UnitaryOp u = complete_unitary(2, {{0, c0}});
  CHECK(u.at(0, 0).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  CHECK(u.at(1, 0).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  CHECK(u.at(0, 1).real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  CHECK(u.at(1, 1).real() == doctest::Approx(-kInvSqrt2).epsilon(1e-12));
  CHECK(check_unitary(u, 1e-10).ok);
}

TEST_CASE("complete_unitary is bit-for-bit deterministic") {
  StateVector c(7);
  for (std::size_t i = 0; i < 7; ++i) c[i] = Complex(1.0 / std::sqrt(7.0), 0.0);
  StateVector d(7);
  d[0] = Complex(kInvSqrt2, 0.0);
  d[1] = Complex(-kInvSqrt2, 0.0);
  const UnitaryOp a = complete_unitary(7, {{0, c}, {3, d}});
  const UnitaryOp b = complete_unitary(7, {{0, c}, {3, d}});
  CHECK(a.bitwise_equal(b));
  CHECK(check_unitary(a, 1e-10).ok);
}

TEST_CASE("complete_unitary rejects non-orthonormal fixed columns") {
  StateVector c0(3);
  c0[0] = Complex(1.0, 0.0);
  CHECK_THROWS_AS((void)complete_unitary(3, {{0, c0}, {1, c0}}),
                  std::invalid_argument);

  StateVector unnormalized(3);
  unnormalized[0] = Complex(2.0, 0.0);
  CHECK_THROWS_AS((void)complete_unitary(3, {{0, unnormalized}}),
                  std::invalid_argument);
}

TEST_CASE("adjoint, product, and the unitarity check") {
  StateVector c0(2);
  c0[0] = c0[1] = Complex(kInvSqrt2, 0.0);
  const UnitaryOp h = complete_unitary(2, {{0, c0}});
  const UnitaryOp prod = h.adjoint() * h;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t cix = 0; cix < 2; ++cix) {
      const double want = r == cix ? 1.0 : 0.0;
      CHECK(std::abs(prod.at(r, cix) - Complex(want, 0.0)) < 1e-12);
    }
  }

  UnitaryOp off = UnitaryOp::identity(3);
  off.at(0, 1) = Complex(1e-6, 0.0);
  const UnitaryCheck chk = check_unitary(off, 1e-10);
  CHECK_FALSE(chk.ok);
  CHECK(chk.max_deviation > 1e-8);
}

TEST_CASE("measure_branches partitions probability") {
  const StateVector psi = uniform_state(4);

  SUBCASE("standard basis") {
    const auto branches = measure_branches(psi, MeasurementSpec::standard_basis(4));
    REQUIRE(branches.size() == 4);
    double total = 0.0;
    for (const Branch& b : branches) {
      CHECK(b.prob == doctest::Approx(0.25).epsilon(1e-12));
      CHECK(b.collapsed.is_normalized(1e-9));
      total += b.prob;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("two labeled groups") {
    MeasurementSpec m;
    m.groups.push_back({"low", {0, 1}});
    m.groups.push_back({"high", {2, 3}});
    const auto branches = measure_branches(psi, m);
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].outcome == "low");
    CHECK(branches[0].prob == doctest::Approx(0.5).epsilon(1e-12));
    // Collapse renormalizes within the group.
    CHECK(branches[0].collapsed[0].real() ==
          doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(branches[0].collapsed[2].real() == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("identity measurement is a single fixed branch") {
    const auto branches = measure_branches(psi, MeasurementSpec::identity());
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].outcome == "c");
    CHECK(branches[0].prob == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("branches below the probability floor are dropped") {
    StateVector nearly(2);
    nearly[0] = Complex(1.0, 0.0);
    nearly[1] = Complex(1e-7, 0.0);  // prob 1e-14 < branch floor 1e-12
    const double renorm = nearly.norm();
    nearly[0] /= renorm;
    nearly[1] /= renorm;
    const auto branches = measure_branches(nearly, MeasurementSpec::standard_basis(2));
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].outcome == "0");
  }
}

TEST_CASE("measurement validation catches bad partitions") {
  MeasurementSpec overlap;
  overlap.groups.push_back({"a", {0, 1}});
  overlap.groups.push_back({"b", {1, 2}});
  CHECK_THROWS_AS(overlap.validate(3), std::invalid_argument);

  MeasurementSpec gap;
  gap.groups.push_back({"a", {0}});
  CHECK_THROWS_AS(gap.validate(2), std::invalid_argument);

  MeasurementSpec ok;
  ok.groups.push_back({"a", {0}});
  ok.groups.push_back({"b", {1}});
  CHECK_NOTHROW(ok.validate(2));
}

TEST_CASE("sample_branch_index is deterministic per seed") {
  std::vector<Branch> branches(3);
  branches[0] = {"a", 0.25, basis_state(2, 0)};
  branches[1] = {"b", 0.50, basis_state(2, 0)};
  branches[2] = {"c", 0.25, basis_state(2, 1)};

  std::mt19937_64 r1(123), r2(123);
  for (int k = 0; k < 50; ++k) {
    CHECK(sample_branch_index(branches, r1) == sample_branch_index(branches, r2));
  }

  // Every index shows up over enough draws.
  std::mt19937_64 r3(7);
  bool seen[3] = {false, false, false};
  for (int k = 0; k < 200; ++k) seen[sample_branch_index(branches, r3)] = true;
  CHECK(seen[0]);
  CHECK(seen[1]);
  CHECK(seen[2]);

  const std::vector<Branch> empty;
  std::mt19937_64 r4(1);
  CHECK_THROWS_AS((void)sample_branch_index(empty, r4), std::invalid_argument);
}

}  // TEST_SUITE
