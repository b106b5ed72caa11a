#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "piqm/fock.hpp"
#include "piqm/hilbert.hpp"
#include "piqm/individuation.hpp"
#include "piqm/reduction.hpp"
#include "test_util.hpp"

using namespace piqm;
namespace H = piqm::hilbert;
namespace I = piqm::individuation;
namespace R = piqm::reduction;
namespace F = piqm::fock;
using testutil::max_abs_diff;

namespace {

SingleKet basis_ket(int d, int i) {
  Vec v = Vec::Zero(d);
  v(i) = 1.0;
  return v;
}

double fock_distance(const F::FockVector& a, const F::FockVector& b) {
  double sq = 0.0;
  for (std::size_t n = 0; n < a.sectors.size(); ++n)
    sq += (a.sectors[n] - b.sectors[n]).squaredNorm();
  return std::sqrt(sq);
}

// Superposition across sectors with Gaussian weights, normalized overall.
F::FockVector random_fock(int d, int n_max, Statistics stat,
                          std::mt19937_64& rng, bool fill_top = true) {
  std::normal_distribution<double> gauss;
  F::FockVector out = F::vacuum(d, n_max, stat);
  out.sectors[0](0) = cplx(gauss(rng), gauss(rng));
  const int top = fill_top ? n_max : n_max - 1;
  for (int n = 1; n <= top; ++n) {
    if (stat == Statistics::fermion && n > d) continue;
    const JointKet part = H::random_sector_state(d, n, stat, rng);
    out.sectors[n] = cplx(gauss(rng), gauss(rng)) * part.amplitudes;
  }
  const double norm = out.norm();
  for (Vec& s : out.sectors) s /= norm;
  return out;
}

} // namespace

TEST_CASE("creation from the vacuum") {
  const auto vac = F::vacuum(3, 2, Statistics::boson);
  CHECK(vac.norm() == 1.0);
  F::validate_fock(vac);

  const auto one = F::create(basis_ket(3, 0), vac);
  CHECK(std::abs(one.sectors[0](0)) == 0.0);
  CHECK((one.sectors[1] - basis_ket(3, 0)).norm() == 0.0);
  CHECK(one.sectors[2].norm() == 0.0);
  F::validate_fock(one);

  // Repeated boson mode: amplitude sqrt(2) on the doubly occupied product.
  const auto two = F::create(basis_ket(3, 0), one);
  Vec want = Vec::Zero(9);
  want(0) = std::sqrt(2.0);
  CHECK((two.sectors[2] - want).norm() < 1e-14);

  // Pauli exclusion.
  const auto fvac = F::vacuum(3, 2, Statistics::fermion);
  const auto fone = F::create(basis_ket(3, 0), fvac);
  CHECK(F::create(basis_ket(3, 0), fone).norm() < 1e-14);

  // Distinct fermion modes build the two-mode antisymmetric state; the
  // later creation lands in the leading slot.
  const auto pair = F::create(basis_ket(3, 1), fone);
  const JointKet wedge10 = H::wedge(basis_ket(3, 1), basis_ket(3, 0));
  CHECK((pair.sectors[2] - wedge10.amplitudes).norm() < 1e-14);
  CHECK(std::abs(pair.norm() - 1.0) < 1e-14);
}

TEST_CASE("triple boson occupation compounds the weights") {
  auto psi = F::vacuum(2, 3, Statistics::boson);
  for (int k = 0; k < 3; ++k) psi = F::create(basis_ket(2, 0), psi);
  Vec want = Vec::Zero(8);
  want(0) = std::sqrt(6.0); // sqrt(1) sqrt(2) sqrt(3)
  CHECK((psi.sectors[3] - want).norm() < 1e-14);
}

TEST_CASE("annihilation lowers and probes the leading slot") {
  const auto vac = F::vacuum(3, 2, Statistics::boson);
  CHECK(F::annihilate(basis_ket(3, 0), vac).norm() == 0.0);

  const auto one = F::create(basis_ket(3, 0), vac);
  const auto down = F::annihilate(basis_ket(3, 0), one);
  CHECK(std::abs(down.sectors[0](0) - cplx(1.0)) < 1e-14);
  CHECK(down.sectors[1].norm() == 0.0);
  CHECK(F::annihilate(basis_ket(3, 1), one).norm() < 1e-14);
}

TEST_CASE("creation and annihilation are adjoint") {
  std::mt19937_64 rng(5);
  for (Statistics stat : {Statistics::boson, Statistics::fermion}) {
    const auto a = random_fock(3, 3, stat, rng);
    const auto b = random_fock(3, 3, stat, rng, /*fill_top=*/false);
    const SingleKet phi = H::random_single_ket(3, rng);
    const cplx lhs = F::inner(F::annihilate(phi, a), b);
    const cplx rhs = F::inner(a, F::create(phi, b));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("truncation semantics at the top sector") {
  std::mt19937_64 rng(7);
  const auto full = random_fock(2, 2, Statistics::boson, rng);
  CHECK_THROWS_AS(F::create(basis_ket(2, 0), full), error);
  try {
    F::create(basis_ket(2, 0), full);
  } catch (const error& e) {
    CHECK(e.tag() == "truncation_overflow");
    CHECK(e.code() == errc::precondition);
  }
  const auto dropped = F::create(basis_ket(2, 0), full, /*strict=*/false);
  CHECK(dropped.truncated);
  F::validate_fock(dropped); // norm check waived once flagged
}

TEST_CASE("fock vector validation rejects malformed input") {
  auto bad = F::vacuum(2, 2, Statistics::boson);
  bad.sectors[2] = Vec::Zero(3);
  CHECK_THROWS_AS(F::validate_fock(bad), error);

  auto asym = F::vacuum(2, 2, Statistics::fermion);
  asym.sectors[0](0) = 0.0;
  asym.sectors[2] = Vec::Zero(4);
  asym.sectors[2](0) = 1.0; // doubly occupied mode is not antisymmetric
  CHECK_THROWS_AS(F::validate_fock(asym), error);

  auto heavy = F::vacuum(2, 1, Statistics::boson);
  heavy.sectors[0](0) = 2.0;
  CHECK_THROWS_AS(F::validate_fock(heavy), error);
}

TEST_CASE("ladder algebra holds below the truncation boundary") {
  std::mt19937_64 rng(11);
  for (Statistics stat : {Statistics::boson, Statistics::fermion}) {
    // Canonical same-mode and orthogonal-mode relations.
    CHECK(F::check_ccr(basis_ket(3, 0), basis_ket(3, 0), stat, 2) < 1e-12);
    CHECK(F::check_ccr(basis_ket(3, 0), basis_ket(3, 1), stat, 2) < 1e-12);
    for (int trial = 0; trial < 3; ++trial) {
      const SingleKet phi = H::random_single_ket(3, rng);
      const SingleKet chi = H::random_single_ket(3, rng);
      CHECK(F::check_ccr(phi, chi, stat, 3) < 1e-12);
    }
  }
}

TEST_CASE("mode number operator") {
  // Boson doubly occupied product: eigenvalue 2.
  const JointKet doubled{Eigen::kroneckerProduct(basis_ket(2, 0),
                                                 basis_ket(2, 0)),
                         2, 2, Sector::boson};
  const auto psi2 = F::embed_sector(doubled, 2);
  const auto nop = F::mode_number(basis_ket(2, 0), Statistics::boson, 2);
  CHECK(fock_distance(nop.apply(psi2),
                      [&] {
                        auto scaled = psi2;
                        scaled.sectors[2] *= 2.0;
                        return scaled;
                      }()) < 1e-12);

  // Fermion two-mode state: each mode occupied once.
  const auto singlet = F::embed_sector(
      H::symmetrize_product({basis_ket(2, 0), basis_ket(2, 1)},
                            Statistics::fermion),
      2);
  const auto fnop = F::mode_number(basis_ket(2, 0), Statistics::fermion, 2);
  CHECK(fock_distance(fnop.apply(singlet), singlet) < 1e-12);

  // Ladder composite and the slot-sum form act identically on every sector
  // basis state; and applying the ladder maps agrees with the blocks.
  std::mt19937_64 rng(13);
  for (Statistics stat : {Statistics::boson, Statistics::fermion}) {
    const SingleKet phi = H::random_single_ket(3, rng);
    const auto op = F::mode_number(phi, stat, 3);
    const Mat proj = phi * phi.adjoint();
    for (int n = 1; n <= 3; ++n) {
      const Mat sum = R::number_operator(
          I::make_criterion({phi}), n).matrix;
      for (const Vec& b : F::sector_basis(3, n, stat))
        CHECK((op.blocks[n] * b - sum * b).norm() < 1e-12);
    }
    const auto state = random_fock(3, 3, stat, rng);
    const auto via_ladder = F::create(phi, F::annihilate(phi, state));
    CHECK(fock_distance(op.apply(state), via_ladder) < 1e-12);
  }
}

TEST_CASE("aggregate number operator is basis independent") {
  std::mt19937_64 rng(17);
  const Mat u = H::random_unitary(4, rng);
  const SingleKet f1 = u.col(0), f2 = u.col(1);
  const auto crit = I::make_criterion({f1, f2});

  // Two different spanning bases of the same range give the same operator.
  const SingleKet g1 = (f1 + f2) / std::sqrt(2.0);
  const SingleKet g2 = (f1 - f2) / std::sqrt(2.0);
  const auto crit2 = I::make_criterion({g1, g2});
  const auto opa = F::number_alpha_fock(crit, 3);
  const auto opb = F::number_alpha_fock(crit2, 3);
  for (int n = 0; n <= 3; ++n)
    CHECK(max_abs_diff(opa.blocks[n], opb.blocks[n]) < 1e-12);

  // Equals the sum of the two mode number operators on sector states.
  for (Statistics stat : {Statistics::boson, Statistics::fermion}) {
    const auto m1 = F::mode_number(f1, stat, 3);
    const auto m2 = F::mode_number(f2, stat, 3);
    for (int n = 1; n <= 3; ++n)
      for (const Vec& b : F::sector_basis(4, n, stat))
        CHECK((opa.blocks[n] * b - m1.blocks[n] * b - m2.blocks[n] * b)
                  .norm() < 1e-12);
  }

  // Identity criterion counts total particle number.
  const auto total = F::number_alpha_fock(I::identity_criterion(2), 3);
  std::mt19937_64 rng2(19);
  const auto state = random_fock(2, 3, Statistics::boson, rng2);
  const auto counted = total.apply(state);
  for (int n = 0; n <= 3; ++n)
    CHECK((counted.sectors[n] - double(n) * state.sectors[n]).norm() < 1e-12);
}

TEST_CASE("individuated expectation values across sectors") {
  std::mt19937_64 rng(23);
  for (Statistics stat : {Statistics::boson, Statistics::fermion}) {
    // Fixed-N states reproduce the first-quantized machinery.
    for (int trial = 0; trial < 10; ++trial) {
      const JointKet state = H::random_sector_state(4, 2, stat, rng);
      const Mat u = H::random_unitary(4, rng);
      const auto crit = I::make_criterion({u.col(0), u.col(1)});
      const Mat q = H::random_hermitian(4, rng);
      const auto psi = F::embed_sector(state, 3);
      const double fixed = R::expectation_alpha(state, q, crit);
      CHECK(std::abs(F::fock_expectation_alpha(psi, q, crit) - fixed) < 1e-12);
    }

    // Q = identity gives exactly 1.
    const auto mixed = random_fock(3, 3, stat, rng);
    const auto crit3 = I::make_criterion({basis_ket(3, 0), basis_ket(3, 1)});
    CHECK(std::abs(F::fock_expectation_alpha(mixed, Mat::Identity(3, 3),
                                             crit3) - 1.0) < 1e-12);

    // Superposed sectors: the sector-wise direct sum of first-quantized
    // numerators and denominators is an independent oracle.
    const Mat q = H::random_hermitian(3, rng);
    double num = 0.0, den = 0.0;
    for (int n = 1; n <= 3; ++n) {
      const Vec& s = mixed.sectors[n];
      if (s.norm() < 1e-14) continue;
      num += s.dot(R::lift_single(q, crit3, n).matrix * s).real();
      den += s.dot(R::number_operator(crit3, n).matrix * s).real();
    }
    CHECK(std::abs(F::fock_expectation_alpha(mixed, q, crit3) - num / den) <
          1e-12);
  }
}

TEST_CASE("occupancy-weighted average for commuting observables") {
  // With the criterion spanned by Q-eigenstates, the expectation is the
  // occupancy-weighted average of the eigenvalues.
  std::mt19937_64 rng(29);
  const auto psi = random_fock(3, 3, Statistics::boson, rng);
  const SingleKet phi0 = basis_ket(3, 0), phi1 = basis_ket(3, 1);
  const double q0 = 0.7, q1 = -0.4;
  Mat q = Mat::Zero(3, 3);
  q(0, 0) = q0;
  q(1, 1) = q1;
  q(2, 2) = 5.0; // outside the criterion; must not contribute
  const auto crit = I::make_criterion({phi0, phi1});

  const auto n0 = F::mode_number(phi0, Statistics::boson, 3);
  const auto n1 = F::mode_number(phi1, Statistics::boson, 3);
  const double w0 = F::inner(psi, n0.apply(psi)).real();
  const double w1 = F::inner(psi, n1.apply(psi)).real();
  const double want = (w0 * q0 + w1 * q1) / (w0 + w1);
  CHECK(std::abs(F::fock_expectation_alpha(psi, q, crit) - want) < 1e-12);
}

TEST_CASE("reduced states from occupancies") {
  // One-particle state inside the criterion: the pure mode state.
  std::mt19937_64 rng(31);
  const SingleKet phi = H::random_single_ket(3, rng);
  auto one = F::vacuum(3, 2, Statistics::boson);
  one = F::create(phi, one);
  const auto crit = I::identity_criterion(3);
  const DensityOp rho = F::fock_reduced_state_alpha(one, crit);
  CHECK(max_abs_diff(rho.matrix, phi * phi.adjoint()) < 1e-12);

  for (Statistics stat : {Statistics::boson, Statistics::fermion}) {
    // Fixed-N cross-module agreement, general criteria.
    for (int trial = 0; trial < 10; ++trial) {
      const JointKet state = H::random_sector_state(4, 2, stat, rng);
      const Mat u = H::random_unitary(4, rng);
      const auto c = I::make_criterion({u.col(0), u.col(1), u.col(2)});
      const auto report = R::reduced_state_alpha(state, c);
      const DensityOp got =
          F::fock_reduced_state_alpha(F::embed_sector(state, 3), c);
      CHECK(max_abs_diff(got.matrix, report.rho_alpha.matrix) < 1e-12);
    }

    // Identity criterion on a fixed-N state: the average state.
    const JointKet state = H::random_sector_state(3, 2, stat, rng);
    const DensityOp avg = H::average_state(state);
    const DensityOp got = F::fock_reduced_state_alpha(
        F::embed_sector(state, 2), I::identity_criterion(3));
    CHECK(max_abs_diff(got.matrix, avg.matrix) < 1e-12);

    // Mixed-sector states: positive, unit trace, supported in the range,
    // and consistent with the expectation functional.
    const auto psi = random_fock(3, 3, stat, rng);
    const auto crit2 = I::make_criterion({basis_ket(3, 0), basis_ket(3, 1)});
    const DensityOp mixed = F::fock_reduced_state_alpha(psi, crit2);
    validate_density(mixed, 1e-10);
    CHECK(std::abs(mixed.matrix(2, 2)) < 1e-14);
    for (int trial = 0; trial < 4; ++trial) {
      const Mat q = H::random_hermitian(3, rng);
      CHECK(std::abs((mixed.matrix * q).trace().real() -
                     F::fock_expectation_alpha(psi, q, crit2)) < 1e-12);
    }
  }

  // Unoccupied criterion: no conditional state.
  const auto empty_crit = I::make_criterion({basis_ket(3, 2)});
  const auto occupied0 =
      F::create(basis_ket(3, 0), F::vacuum(3, 2, Statistics::boson));
  try {
    F::fock_reduced_state_alpha(occupied0, empty_crit);
    FAIL("expected zero_n_alpha");
  } catch (const error& e) {
    CHECK(e.tag() == "zero_n_alpha");
    CHECK(e.code() == errc::precondition);
  }
}
