#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "piqm/hilbert.hpp"
#include "piqm/individuation.hpp"
#include "piqm/reduction.hpp"
#include "test_util.hpp"

using namespace piqm;
namespace H = piqm::hilbert;
namespace I = piqm::individuation;
namespace R = piqm::reduction;
using testutil::max_abs_diff;

namespace {

SingleKet basis_ket(int d, int i) {
  Vec v = Vec::Zero(d);
  v(i) = 1.0;
  return v;
}

// Random orthonormal k-tuple: leading columns of a Haar unitary.
std::vector<SingleKet> orthonormal_tuple(int d, int k, std::mt19937_64& rng) {
  const Mat u = H::random_unitary(d, rng);
  std::vector<SingleKet> out;
  for (int i = 0; i < k; ++i) out.push_back(u.col(i));
  return out;
}

// Hermitian Q with prescribed eigenvectors/eigenvalues on `vecs` and random
// action on the orthogonal complement.
Mat eigen_op(const std::vector<SingleKet>& vecs,
             const std::vector<double>& vals, int d, std::mt19937_64& rng) {
  Mat q = Mat::Zero(d, d);
  Mat inside = Mat::Zero(d, d);
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    q += vals[i] * (vecs[i] * vecs[i].adjoint());
    inside += vecs[i] * vecs[i].adjoint();
  }
  const Mat perp = Mat::Identity(d, d) - inside;
  q += perp * H::random_hermitian(d, rng) * perp;
  return q;
}

// Basis-adapted fermion pair state z1 e0^e1 + z2 e2^e3 in C^4.
JointKet rank2_pair_state(double z1, double z2) {
  const JointKet w01 = H::wedge(basis_ket(4, 0), basis_ket(4, 1));
  const JointKet w23 = H::wedge(basis_ket(4, 2), basis_ket(4, 3));
  Vec amp = z1 * w01.amplitudes + z2 * w23.amplitudes;
  amp.normalize();
  return JointKet{amp, 4, 2, Sector::fermion};
}

// Spatial (x) spin basis L-up, L-down, R-up, R-down; the left-right fermion
// pair state with opposite spins used throughout the two-site discussions.
JointKet real_bell() {
  const JointKet a = H::wedge(basis_ket(4, 0), basis_ket(4, 3));
  const JointKet b = H::wedge(basis_ket(4, 1), basis_ket(4, 2));
  Vec amp = (a.amplitudes - b.amplitudes) / std::sqrt(2.0);
  return JointKet{amp, 4, 2, Sector::fermion};
}

} // namespace

TEST_CASE("number operator on two qubits has the frozen matrix") {
  const auto e0 = I::make_criterion({basis_ket(2, 0)}, "ground");
  const auto n_op = R::number_operator(e0, 2);
  Mat want = Mat::Zero(4, 4);
  want(0, 0) = 2.0;
  want(1, 1) = want(2, 2) = 1.0;
  CHECK(max_abs_diff(n_op.matrix, want) == 0.0);

  // Doubly occupied ground state counts 2; the singlet counts 1.
  Vec both = Vec::Zero(4);
  both(0) = 1.0;
  CHECK((n_op.matrix * both - 2.0 * both).norm() < 1e-15);
  const JointKet singlet = H::symmetrize_product(
      {basis_ket(2, 0), basis_ket(2, 1)}, Statistics::fermion);
  CHECK((n_op.matrix * singlet.amplitudes - singlet.amplitudes).norm() <
        1e-12);

  // Identity criterion counts every constituent.
  const auto full = R::number_operator(I::identity_criterion(2), 3);
  CHECK(max_abs_diff(full.matrix, 3.0 * Mat::Identity(8, 8)) < 1e-12);

  // Rank-0 projector (not constructible through make_criterion) lifts to 0.
  const I::Criterion none{Mat::Zero(2, 2), {}, "none"};
  CHECK(R::number_operator(none, 2).matrix.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(R::number_operator(e0, 0), error);
}

TEST_CASE("lift of the identity is the number operator") {
  std::mt19937_64 rng(5);
  const auto tuple = orthonormal_tuple(3, 2, rng);
  const auto crit = I::make_criterion(tuple);
  const Mat id = Mat::Identity(3, 3);
  CHECK(max_abs_diff(R::lift_single(id, crit, 2).matrix,
                     R::number_operator(crit, 2).matrix) < 1e-12);

  // Operators already compressed into the criterion range lift to the plain
  // symmetric sum.
  const Mat q = H::random_hermitian(3, rng);
  const Mat inside = crit.projector * q * crit.projector;
  const Mat lifted = R::lift_single(inside, crit, 2).matrix;
  Mat plain = Eigen::kroneckerProduct(inside, id).eval();
  plain += Eigen::kroneckerProduct(id, inside).eval();
  CHECK(max_abs_diff(lifted, plain) < 1e-12);
  CHECK(H::is_permutation_invariant(R::lift_single(q, crit, 2)));
}

TEST_CASE("lift is not an operator homomorphism") {
  std::mt19937_64 rng(7);
  const auto crit = I::make_criterion(orthonormal_tuple(4, 2, rng));
  const Mat& e = crit.projector;
  const Mat perp = Mat::Identity(4, 4) - e;
  // A and B commute with E by construction.
  const Mat ma = H::random_hermitian(4, rng);
  const Mat mb = H::random_hermitian(4, rng);
  const Mat a = e * ma * e + perp * ma * perp;
  const Mat b = e * mb * e + perp * mb * perp;
  CHECK((a * e - e * a).cwiseAbs().maxCoeff() < 1e-12);

  const Mat lift_ab = R::lift_single(a * b, crit, 2).matrix;
  const Mat prod = R::lift_single(a, crit, 2).matrix *
                   R::lift_single(b, crit, 2).matrix;
  CHECK(max_abs_diff(lift_ab, prod) > 1e-6); // generically unequal

  // Yet expectation values agree on every n_alpha = 1 eigenstate.
  const Mat u = H::random_unitary(4, rng);
  // One factor inside the range, one outside: an eigenvalue-1 configuration.
  const SingleKet inside = crit.span[0];
  SingleKet outside = perp * u.col(0);
  outside.normalize();
  for (auto stat : {Statistics::fermion, Statistics::boson}) {
    const JointKet psi = H::symmetrize_product({inside, outside}, stat);
    REQUIRE(R::is_ubiquitous_unique(psi, crit));
    const cplx got = psi.amplitudes.dot(prod * psi.amplitudes);
    const cplx want = psi.amplitudes.dot(lift_ab * psi.amplitudes);
    CHECK(std::abs(got - want) < 1e-10);
  }
}

TEST_CASE("expectation: one constituent answers to the criterion") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const auto tuple = orthonormal_tuple(4, 2, rng);
    const SingleKet alpha = tuple[0], beta = tuple[1];
    const auto crit = I::make_criterion({alpha});
    const double q = std::uniform_real_distribution<>(-3.0, 3.0)(rng);
    const Mat op = eigen_op({alpha}, {q}, 4, rng);
    for (auto stat : {Statistics::fermion, Statistics::boson}) {
      const JointKet psi = H::symmetrize_product({alpha, beta}, stat);
      CHECK(std::abs(R::expectation_alpha(psi, op, crit) - q) < 1e-10);
      // The individuated system is in a Q-eigenstate.
      CHECK(std::abs(R::expectation_alpha(psi, Mat(op * op), crit) - q * q) <
            1e-10);
    }
  }
}

TEST_CASE("expectation: amplitude-weighted average across terms") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = orthonormal_tuple(5, 4, rng);
    const SingleKet a1 = t[0], a2 = t[1], b1 = t[2], b2 = t[3];
    const auto crit = I::make_criterion({a1, a2});
    const double q1 = 1.25, q2 = -0.75;
    const Mat op = eigen_op({a1, a2}, {q1, q2}, 5, rng);
    const cplx c1 = cplx(0.6, 0.3), c2 = cplx(0.2, std::sqrt(0.51));
    for (auto stat : {Statistics::fermion, Statistics::boson}) {
      const JointKet t1 = H::symmetrize_product({a1, b1}, stat);
      const JointKet t2 = H::symmetrize_product({a2, b2}, stat);
      const JointKet psi{c1 * t1.amplitudes + c2 * t2.amplitudes, 5, 2,
                         to_sector(stat)};
      const double want = std::norm(c1) * q1 + std::norm(c2) * q2;
      CHECK(std::abs(R::expectation_alpha(psi, op, crit) - want) < 1e-10);
    }
  }
}

TEST_CASE("expectation: two constituents sharing one eigenstate") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = orthonormal_tuple(3, 1, rng);
    const auto crit = I::make_criterion({t[0]});
    const double q = -2.5;
    const Mat op = eigen_op({t[0]}, {q}, 3, rng);
    const JointKet psi = H::symmetrize_product({t[0], t[0]},
                                               Statistics::boson);
    CHECK(std::abs(R::expectation_alpha(psi, op, crit) - q) < 1e-10);
    // Both constituents answer to the criterion.
    const auto report = R::reduced_state_alpha(psi, crit);
    CHECK(report.n_alpha_expectation == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(report.multi_system_average);
    CHECK_FALSE(report.ubiquitous_unique);
  }
}

TEST_CASE("expectation: frequency average inside one term") {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = orthonormal_tuple(4, 2, rng);
    const auto crit = I::make_criterion({t[0], t[1]});
    const double q1 = 0.5, q2 = 4.5;
    const Mat op = eigen_op({t[0], t[1]}, {q1, q2}, 4, rng);
    for (auto stat : {Statistics::fermion, Statistics::boson}) {
      const JointKet psi = H::symmetrize_product({t[0], t[1]}, stat);
      CHECK(std::abs(R::expectation_alpha(psi, op, crit) -
                     0.5 * (q1 + q2)) < 1e-10);
    }
  }
}

TEST_CASE("expectation: joint amplitude and frequency weighting") {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = orthonormal_tuple(5, 5, rng);
    const SingleKet a1 = t[0], a2 = t[1], a3 = t[2], b1 = t[3], b2 = t[4];
    const auto crit = I::make_criterion({a1, a2, a3});
    const double q1 = 1.0, q2 = -2.0, q3 = 0.5;
    const Mat op = eigen_op({a1, a2, a3}, {q1, q2, q3}, 5, rng);
    const cplx c1 = cplx(0.5, -0.5), c2 = cplx(0.1, 0.7);
    for (auto stat : {Statistics::fermion, Statistics::boson}) {
      const JointKet t1 = H::symmetrize_product({a1, a2, b1}, stat);
      const JointKet t2 = H::symmetrize_product({a3, b1, b2}, stat);
      Vec amp = c1 * t1.amplitudes + c2 * t2.amplitudes;
      amp.normalize(); // the two terms are orthogonal
      const JointKet psi{amp, 5, 3, to_sector(stat)};
      const double w1 = std::norm(c1), w2 = std::norm(c2);
      const double want = (w1 * (q1 + q2) + w2 * q3) / (2.0 * w1 + w2);
      CHECK(std::abs(R::expectation_alpha(psi, op, crit) - want) < 1e-10);
      // Equal amplitudes give every captured eigenstate equal weight.
      Vec eq = t1.amplitudes + t2.amplitudes;
      eq.normalize();
      const JointKet psi_eq{eq, 5, 3, to_sector(stat)};
      CHECK(std::abs(R::expectation_alpha(psi_eq, op, crit) -
                     (q1 + q2 + q3) / 3.0) < 1e-10);
    }
  }
}

TEST_CASE("expectation fails when no constituent answers") {
  const auto crit = I::make_criterion({basis_ket(3, 0)});
  const JointKet psi = H::symmetrize_product(
      {basis_ket(3, 1), basis_ket(3, 2)}, Statistics::fermion);
  try {
    R::expectation_alpha(psi, Mat::Identity(3, 3), crit);
    FAIL("expected zero_n_alpha");
  } catch (const error& e) {
    CHECK(e.tag() == "zero_n_alpha");
    CHECK(e.code() == errc::precondition);
  }
}

TEST_CASE("reduced state of a rank-1 criterion is the criterion state") {
  std::mt19937_64 rng(211);
  const auto t = orthonormal_tuple(3, 2, rng);
  const auto crit = I::make_criterion({t[0]});
  const JointKet psi = H::symmetrize_product({t[0], t[1]},
                                             Statistics::fermion);
  const auto report = R::reduced_state_alpha(psi, crit);
  CHECK(max_abs_diff(report.rho_alpha.matrix,
                     t[0] * t[0].adjoint()) < 1e-12);
  CHECK(report.criterion_dim == 1);
  CHECK(report.ubiquitous_unique);
  CHECK_FALSE(report.multi_system_average);
  validate_density(report.rho_alpha);
}

TEST_CASE("identity criterion recovers the partial-trace state") {
  std::mt19937_64 rng(223);
  for (int d = 2; d <= 4; ++d)
    for (int n = 2; n <= 3; ++n)
      for (auto stat : {Statistics::fermion, Statistics::boson}) {
        if (stat == Statistics::fermion && d < n) continue;
        for (int trial = 0; trial < 5; ++trial) {
          const JointKet psi = H::random_sector_state(d, n, stat, rng);
          const auto report =
              R::reduced_state_alpha(psi, I::identity_criterion(d));
          const Mat oracle =
              testutil::partial_trace_oracle(psi.amplitudes, d, n, 0);
          CHECK(max_abs_diff(report.rho_alpha.matrix, oracle) < 1e-12);
          CHECK(report.n_alpha_expectation ==
                doctest::Approx(double(n)).epsilon(1e-12));
        }
      }
}

TEST_CASE("left-site reduced state of the two-site spin pair") {
  const JointKet psi = real_bell();
  const auto left =
      I::make_criterion({basis_ket(4, 0), basis_ket(4, 1)}, "left");
  const auto report = R::reduced_state_alpha(psi, left);
  // |L><L| (x) spin-1/2 maximal mixture.
  Mat want = Mat::Zero(4, 4);
  want(0, 0) = want(1, 1) = 0.5;
  CHECK(max_abs_diff(report.rho_alpha.matrix, want) < 1e-12);
  CHECK(report.ubiquitous_unique);
  CHECK(report.criterion_dim == 2);

  const auto right =
      I::make_criterion({basis_ket(4, 2), basis_ket(4, 3)}, "right");
  const auto report_r = R::reduced_state_alpha(psi, right);
  Mat want_r = Mat::Zero(4, 4);
  want_r(2, 2) = want_r(3, 3) = 0.5;
  CHECK(max_abs_diff(report_r.rho_alpha.matrix, want_r) < 1e-12);
}

TEST_CASE("reduced state satisfies the trace identity for all Q") {
  std::mt19937_64 rng(227);
  for (int trial = 0; trial < 10; ++trial) {
    const auto stat = trial % 2 ? Statistics::boson : Statistics::fermion;
    const JointKet psi = H::random_sector_state(4, 2, stat, rng);
    const auto crit = I::make_criterion(orthonormal_tuple(4, 2, rng));
    R::ReducedStateReport report;
    try {
      report = R::reduced_state_alpha(psi, crit);
    } catch (const error&) {
      continue; // zero support is legitimate for random criteria
    }
    validate_density(report.rho_alpha);
    // Supported inside the criterion range.
    CHECK(max_abs_diff(crit.projector * report.rho_alpha.matrix *
                           crit.projector,
                       report.rho_alpha.matrix) < 1e-10);
    for (int k = 0; k < 4; ++k) {
      const Mat q = H::random_hermitian(4, rng);
      const double via_rho =
          (report.rho_alpha.matrix * q).trace().real();
      CHECK(std::abs(via_rho - R::expectation_alpha(psi, q, crit)) < 1e-10);
    }

    // Density-operator overload agrees with the ket overload.
    const auto report2 =
        R::reduced_state_alpha(pure_density(psi.amplitudes), 4, 2, crit);
    CHECK(max_abs_diff(report.rho_alpha.matrix, report2.rho_alpha.matrix) <
          1e-12);
    CHECK(report2.n_alpha_expectation ==
          doctest::Approx(report.n_alpha_expectation).epsilon(1e-10));
  }
}

TEST_CASE("ubiquitous-unique detection") {
  using R::is_ubiquitous_unique;
  const auto e0 = I::make_criterion({basis_ket(2, 0)});
  const JointKet singlet = H::symmetrize_product(
      {basis_ket(2, 0), basis_ket(2, 1)}, Statistics::fermion);
  CHECK(is_ubiquitous_unique(singlet, e0));
  CHECK(is_ubiquitous_unique(pure_density(singlet.amplitudes), 2, 2, e0));

  const JointKet doubled = H::symmetrize_product(
      {basis_ket(2, 0), basis_ket(2, 0)}, Statistics::boson);
  CHECK_FALSE(is_ubiquitous_unique(doubled, e0));
  CHECK_FALSE(is_ubiquitous_unique(pure_density(doubled.amplitudes), 2, 2, e0));

  // Pair state with one criterion vector from each wedge.
  const JointKet pair = rank2_pair_state(0.8, 0.6);
  const auto odd = I::make_criterion({basis_ket(4, 0), basis_ket(4, 2)});
  CHECK(is_ubiquitous_unique(pair, odd));
  // The complementary criterion is equally ubiquitous and unique.
  const auto even = I::make_criterion({basis_ket(4, 1), basis_ket(4, 3)});
  CHECK(is_ubiquitous_unique(pair, even));
  // A criterion capturing a whole wedge is not: n has eigenvalues 0 and 2.
  const auto lopsided = I::make_criterion({basis_ket(4, 0), basis_ket(4, 1)});
  CHECK_FALSE(is_ubiquitous_unique(pair, lopsided));
}

TEST_CASE("eigenvalue-1 shortcut for the reduced state") {
  std::mt19937_64 rng(229);
  const JointKet pair = rank2_pair_state(std::sqrt(0.3), std::sqrt(0.7));
  const auto odd = I::make_criterion({basis_ket(4, 0), basis_ket(4, 2)});
  REQUIRE(R::is_ubiquitous_unique(pair, odd));
  const auto report = R::reduced_state_alpha(pair, odd);
  const DensityOp rho_bar = H::average_state(pair);
  const Mat direct = 2.0 * odd.projector * rho_bar.matrix * odd.projector;
  CHECK(max_abs_diff(report.rho_alpha.matrix, direct) < 1e-12);
  CHECK(report.ubiquitous_unique);
}

TEST_CASE("block-diagonal assembly of captured states") {
  // Singlet: the two reduced states are the criterion states themselves.
  const JointKet singlet = H::symmetrize_product(
      {basis_ket(2, 0), basis_ket(2, 1)}, Statistics::fermion);
  const auto block = I::make_block(
      {I::make_criterion({basis_ket(2, 0)}, "up"),
       I::make_criterion({basis_ket(2, 1)}, "down")},
      Statistics::fermion);
  const auto parts = R::block_diagonal_assembly(singlet, block);
  REQUIRE(parts.size() == 2);
  CHECK(max_abs_diff(parts[0].matrix,
                     basis_ket(2, 0) * basis_ket(2, 0).adjoint()) < 1e-12);
  CHECK(max_abs_diff(parts[1].matrix,
                     basis_ket(2, 1) * basis_ket(2, 1).adjoint()) < 1e-12);

  // Two-site spin pair: left and right site states, each maximally mixed
  // in spin.
  const JointKet bell = real_bell();
  const auto site_block = I::make_block(
      {I::make_criterion({basis_ket(4, 0), basis_ket(4, 1)}, "left"),
       I::make_criterion({basis_ket(4, 2), basis_ket(4, 3)}, "right")},
      Statistics::fermion);
  const auto site_parts = R::block_diagonal_assembly(bell, site_block);
  REQUIRE(site_parts.size() == 2);
  Mat want_l = Mat::Zero(4, 4);
  want_l(0, 0) = want_l(1, 1) = 0.5;
  Mat want_r = Mat::Zero(4, 4);
  want_r(2, 2) = want_r(3, 3) = 0.5;
  CHECK(max_abs_diff(site_parts[0].matrix, want_l) < 1e-12);
  CHECK(max_abs_diff(site_parts[1].matrix, want_r) < 1e-12);

  // A state outside the block is rejected.
  const JointKet doubled = H::symmetrize_product(
      {basis_ket(2, 0), basis_ket(2, 0)}, Statistics::boson);
  try {
    R::block_diagonal_assembly(doubled, block);
    FAIL("expected not_in_block");
  } catch (const error& e) {
    CHECK(e.tag() == "not_in_block");
  }
}

TEST_CASE("anticorrelation witness values") {
  Mat sx = Mat::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 1.0;
  Mat sz = Mat::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;

  const JointKet doubled = H::symmetrize_product(
      {basis_ket(2, 0), basis_ket(2, 0)}, Statistics::boson);
  CHECK(std::abs(R::anticorrelation_witness(doubled, sx) - 0.5) < 1e-12);
  // Shared eigenstates are never discerned.
  CHECK(std::abs(R::anticorrelation_witness(doubled, sz)) < 1e-12);

  const JointKet singlet = H::symmetrize_product(
      {basis_ket(2, 0), basis_ket(2, 1)}, Statistics::fermion);
  CHECK(std::abs(R::anticorrelation_witness(singlet, sz) - 1.0) < 1e-12);
  CHECK(std::abs(R::anticorrelation_witness(
            pure_density(singlet.amplitudes), 2, sz) - 1.0) < 1e-12);

  const JointKet three = H::symmetrize_product(
      {basis_ket(3, 0), basis_ket(3, 1), basis_ket(3, 2)},
      Statistics::fermion);
  CHECK_THROWS_AS(R::anticorrelation_witness(three, Mat::Identity(3, 3)),
                  error);
}
