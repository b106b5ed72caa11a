#include "piqm/entanglement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "piqm/hilbert.hpp"
#include "piqm/reduction.hpp"

namespace piqm::entanglement {

namespace {

constexpr double kClusterTol = 1e-8;

void require_two_particles(const JointKet& state) {
  if (state.n != 2)
    throw error(errc::precondition, "bad_particle_count",
                "canonical decompositions are defined for two particles");
}

// Orthonormal completion of the (orthonormal) columns of `modes` to C^d.
std::vector<SingleKet> kernel_completion(const std::vector<SingleKet>& modes,
                                         int d) {
  Mat m(d, std::max<std::size_t>(modes.size(), 1));
  m.setZero();
  for (std::size_t i = 0; i < modes.size(); ++i) m.col(i) = modes[i];
  Eigen::HouseholderQR<Mat> qr(m);
  const Mat q = qr.householderQ();
  std::vector<SingleKet> out;
  for (int c = static_cast<int>(modes.size()); c < d; ++c)
    out.push_back(q.col(c));
  return out;
}

} // namespace

Mat coefficient_matrix(const JointKet& state) {
  require_two_particles(state);
  const int d = state.d;
  Mat c(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) c(i, j) = state.amplitudes(i * d + j);
  return c;
}

SlaterDecomposition slater_decompose_fermion(const JointKet& state,
                                             double rank_tol) {
  Mat c = coefficient_matrix(state);
  if ((c + c.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw error(errc::precondition, "sector_mismatch",
                "coefficient matrix is not antisymmetric");
  c = 0.5 * (c - c.transpose().eval()); // exact antisymmetry for the pairing
  const int d = state.d;

  // Right singular vectors diagonalize C^dag C; singular values carry a far
  // smaller noise floor than eigenvalues of the squared matrix, so the rank
  // cutoff is reliable at rank_tol.
  Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues(); // descending
  const double keep = rank_tol * sv(0);

  SlaterDecomposition dec;
  dec.statistics = Statistics::fermion;

  int lo = 0;
  while (lo < d && sv(lo) > keep) {
    // Cluster of singular values degenerate within tolerance.
    int hi = lo;
    while (hi + 1 < d && sv(lo) - sv(hi + 1) <= kClusterTol) ++hi;
    const int m = hi - lo + 1;
    const Mat qc = svd.matrixV().middleCols(lo, m);
    const Mat b = qc.transpose() * c * qc; // antisymmetric, B^dag B = s^2 I

    // Conjugation pairing: u and conj(Bu)/|Bu| span an invariant plane.
    Mat rest = Mat::Identity(m, m);
    int k = m;
    while (k > 0) {
      if (k == 1)
        throw error(errc::precondition, "pairing_failure",
                    "odd cluster dimension: cannot pair canonical modes");
      const Vec u = rest.col(0);
      const Vec bu = b * u;
      const double sigma = bu.norm();
      if (sigma <= keep)
        throw error(errc::precondition, "pairing_failure",
                    "cluster vector annihilated by the coefficient matrix");
      const Vec w = bu.conjugate() / sigma;
      dec.modes.push_back((qc * w).conjugate());
      dec.modes.push_back((qc * u).conjugate());
      dec.coefficients.push_back(std::sqrt(2.0) * sigma);

      Mat projected = rest.rightCols(k - 1);
      projected -= u * (u.adjoint() * projected);
      projected -= w * (w.adjoint() * projected);
      Eigen::ColPivHouseholderQR<Mat> qr(projected);
      k -= 2;
      rest = Mat(qr.householderQ()).leftCols(k);
    }
    lo = hi + 1;
  }

  dec.rank = static_cast<int>(dec.coefficients.size());
  const JointKet rebuilt = reconstruct_state(dec, d);
  if ((rebuilt.amplitudes - state.amplitudes).norm() > 1e-6)
    throw error(errc::precondition, "pairing_failure",
                "canonical form does not reconstruct the state");
  return dec;
}

SlaterDecomposition takagi_decompose_boson(const JointKet& state,
                                           double rank_tol) {
  Mat c = coefficient_matrix(state);
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw error(errc::precondition, "sector_mismatch",
                "coefficient matrix is not symmetric");
  c = 0.5 * (c + c.transpose().eval());
  const int d = state.d;

  // Real symmetric embedding: eigenvectors [x; y] with eigenvalue s > 0
  // give modes u = x + iy with C conj(u) = s u.
  Eigen::MatrixXd m(2 * d, 2 * d);
  m.topLeftCorner(d, d) = c.real();
  m.topRightCorner(d, d) = c.imag();
  m.bottomLeftCorner(d, d) = c.imag();
  m.bottomRightCorner(d, d) = -c.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);

  SlaterDecomposition dec;
  dec.statistics = Statistics::boson;
  const double sigma_max = std::abs(es.eigenvalues()(2 * d - 1));
  for (int i = 2 * d - 1; i >= 0; --i) {
    const double sigma = es.eigenvalues()(i);
    if (sigma <= rank_tol * sigma_max) break; // negative branch is a mirror
    const Eigen::VectorXd xy = es.eigenvectors().col(i);
    const Vec u = xy.head(d) + cplx(0.0, 1.0) * xy.tail(d);
    if ((c * u.conjugate() - sigma * u).norm() > 1e-8)
      throw error(errc::precondition, "pairing_failure",
                  "Takagi mode fails its defining relation");
    dec.modes.push_back(u);
    dec.coefficients.push_back(sigma);
  }

  dec.rank = static_cast<int>(dec.coefficients.size());
  const JointKet rebuilt = reconstruct_state(dec, d);
  if ((rebuilt.amplitudes - state.amplitudes).norm() > 1e-6)
    throw error(errc::precondition, "pairing_failure",
                "Takagi form does not reconstruct the state");
  return dec;
}

JointKet reconstruct_state(const SlaterDecomposition& dec, int d) {
  Vec amp = Vec::Zero(std::int64_t(d) * d);
  if (dec.statistics == Statistics::fermion) {
    for (int k = 0; k < dec.rank; ++k) {
      const SingleKet& a = dec.modes[2 * k];
      const SingleKet& b = dec.modes[2 * k + 1];
      const Vec wedge =
          (Eigen::kroneckerProduct(a, b) - Eigen::kroneckerProduct(b, a)) /
          std::sqrt(2.0);
      amp += dec.coefficients[k] * wedge;
    }
    return JointKet{std::move(amp), d, 2, Sector::fermion};
  }
  for (int k = 0; k < dec.rank; ++k) {
    const SingleKet& u = dec.modes[k];
    amp += dec.coefficients[k] * Eigen::kroneckerProduct(u, u).eval();
  }
  return JointKet{std::move(amp), d, 2, Sector::boson};
}

namespace {

SlaterDecomposition decompose(const JointKet& state, double rank_tol) {
  if (state.sector == Sector::fermion)
    return slater_decompose_fermion(state, rank_tol);
  if (state.sector == Sector::boson)
    return takagi_decompose_boson(state, rank_tol);
  throw error(errc::precondition, "sector_required",
              "state carries no boson/fermion sector tag");
}

bool equal_coefficient_pair(const SlaterDecomposition& dec, double tol) {
  const double root_half = 1.0 / std::sqrt(2.0);
  return dec.rank == 2 &&
         std::abs(std::abs(dec.coefficients[0]) - root_half) < tol &&
         std::abs(std::abs(dec.coefficients[1]) - root_half) < tol;
}

// Bosons lie in an individuation block iff the Takagi values match up in
// equal pairs: each pair (z, z) rewrites as z(phi theta^T + theta phi^T)
// with orthonormal phi, theta = (chi_1 -+ i chi_2)/sqrt(2).
bool boson_coefficients_paired(const SlaterDecomposition& dec, double tol) {
  if (dec.rank % 2 != 0) return false;
  for (int k = 0; k + 1 < dec.rank; k += 2)
    if (std::abs(std::abs(dec.coefficients[k]) -
                 std::abs(dec.coefficients[k + 1])) > tol)
      return false;
  return true;
}

} // namespace

bool gmw_entangled(const JointKet& state, double tol) {
  const SlaterDecomposition dec = decompose(state, defaults::tol_rank);
  if (dec.statistics == Statistics::fermion) return dec.rank > 1;
  if (dec.rank == 1) return false;
  return !equal_coefficient_pair(dec, tol);
}

std::vector<individuation::Criterion>
complete_property_projectors(const JointKet& state, double tol) {
  const SlaterDecomposition dec = decompose(state, defaults::tol_rank);
  std::vector<SingleKet> candidates;
  if (dec.statistics == Statistics::fermion) {
    if (dec.rank == 1) candidates = {dec.modes[0], dec.modes[1]};
  } else if (dec.rank == 1) {
    candidates = {dec.modes[0]};
  } else if (equal_coefficient_pair(dec, tol)) {
    // Recover the orthogonal factors of the symmetrized product; the Takagi
    // modes themselves only ever carry half the state.
    const Vec phi = (dec.modes[0] + cplx(0.0, 1.0) * dec.modes[1]) /
                    std::sqrt(2.0);
    const Vec theta = (dec.modes[0] - cplx(0.0, 1.0) * dec.modes[1]) /
                      std::sqrt(2.0);
    candidates = {phi, theta};
  }

  const int d = state.d;
  const Mat id = Mat::Identity(d, d);
  std::vector<individuation::Criterion> out;
  for (const auto& v : candidates) {
    const Mat e = v * v.adjoint();
    const Mat two_sided = Eigen::kroneckerProduct(e, id).eval() +
                          Eigen::kroneckerProduct(id, e).eval() -
                          Eigen::kroneckerProduct(e, e).eval();
    const double weight =
        state.amplitudes.dot(two_sided * state.amplitudes).real();
    if (std::abs(weight - 1.0) < tol)
      out.push_back(individuation::make_criterion({v}));
  }
  return out;
}

namespace {

individuation::BlockSpec pairing_block(const SlaterDecomposition& dec, int d,
                                       unsigned swaps) {
  std::vector<SingleKet> first, second;
  for (int k = 0; k < dec.rank; ++k) {
    const bool swap = k > 0 && ((swaps >> (k - 1)) & 1u);
    first.push_back(dec.modes[2 * k + (swap ? 1 : 0)]);
    second.push_back(dec.modes[2 * k + (swap ? 0 : 1)]);
  }
  // Distribute the unused directions so both criteria reach rank >= 2
  // whenever the dimension allows; support is unaffected.
  const auto kernel = kernel_completion(dec.modes, d);
  for (std::size_t j = 0; j < kernel.size(); ++j)
    (j % 2 == 0 ? first : second).push_back(kernel[j]);
  return individuation::make_block(
      {individuation::make_criterion(std::move(first), "odd-modes"),
       individuation::make_criterion(std::move(second), "even-modes")},
      Statistics::fermion);
}

} // namespace

individuation::BlockSpec canonical_block(const JointKet& state,
                                         double rank_tol) {
  if (state.sector != Sector::fermion)
    throw error(errc::precondition, "sector_required",
                "canonical pairing blocks are defined for fermion states");
  return pairing_block(slater_decompose_fermion(state, rank_tol), state.d, 0);
}

std::vector<individuation::BlockSpec>
enumerate_block_choices(const JointKet& state, double rank_tol) {
  if (state.sector != Sector::fermion)
    throw error(errc::precondition, "sector_required",
                "canonical pairing blocks are defined for fermion states");
  const SlaterDecomposition dec = slater_decompose_fermion(state, rank_tol);
  std::vector<individuation::BlockSpec> out;
  const unsigned count = 1u << (dec.rank - 1);
  out.reserve(count);
  for (unsigned s = 0; s < count; ++s)
    out.push_back(pairing_block(dec, state.d, s));
  return out;
}

double gmw_measure(const JointKet& state, double tol) {
  if (state.sector == Sector::boson) {
    const SlaterDecomposition dec = takagi_decompose_boson(state);
    if (!boson_coefficients_paired(dec, tol))
      throw error(errc::unsupported, "no_individuation_block",
                  "boson state lies in no individuation block; its "
                  "entanglement measure is undefined");
  } else if (state.sector != Sector::fermion) {
    throw error(errc::precondition, "sector_required",
                "state carries no boson/fermion sector tag");
  }
  return hilbert::von_neumann_entropy(hilbert::average_state(state)) - 1.0;
}

JointOperator individuated_spin_operator(const Eigen::Vector3d& axis,
                                         int which,
                                         const individuation::BlockSpec& block) {
  if (which < 0 || which >= static_cast<int>(block.criteria.size()))
    throw error(errc::precondition, "bad_criterion_index",
                "no such criterion in the block");
  const individuation::Criterion& crit = block.criteria[which];
  if (crit.dim() != 2)
    throw error(errc::precondition, "bad_pseudo_spin",
                "criterion range is not two-dimensional; no pseudo-spin");
  const double norm = axis.norm();
  if (norm < 1e-14)
    throw error(errc::precondition, "bad_axis", "zero measurement axis");
  const Eigen::Vector3d n = axis / norm;

  Eigen::Matrix2cd pauli;
  pauli << cplx(n.z(), 0.0), cplx(n.x(), -n.y()), cplx(n.x(), n.y()),
      cplx(-n.z(), 0.0);
  const int d = crit.d();
  Mat s = Mat::Zero(d, d);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      s += pauli(i, j) * (crit.span[i] * crit.span[j].adjoint());
  return reduction::lift_single(s, crit, block.n());
}

Eigen::Matrix3d correlation_matrix(const JointKet& state,
                                   const individuation::BlockSpec& block) {
  std::array<Eigen::Vector3d, 3> axes = {Eigen::Vector3d::UnitX(),
                                         Eigen::Vector3d::UnitY(),
                                         Eigen::Vector3d::UnitZ()};
  std::array<Mat, 3> left, right;
  for (int i = 0; i < 3; ++i) {
    left[i] = individuated_spin_operator(axes[i], 0, block).matrix;
    right[i] = individuated_spin_operator(axes[i], 1, block).matrix;
  }
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j) =
          state.amplitudes.dot(left[i] * (right[j] * state.amplitudes)).real();
  return t;
}

ChshReport chsh_value(const JointKet& state, const ChshSettings& settings,
                      const individuation::BlockSpec& block, double tol) {
  const auto corr = [&](const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    const Mat a = individuated_spin_operator(u, 0, block).matrix;
    const Mat b = individuated_spin_operator(v, 1, block).matrix;
    return state.amplitudes.dot(a * (b * state.amplitudes)).real();
  };
  ChshReport report;
  report.settings = settings;
  report.value = std::abs(corr(settings.u1, settings.v1) +
                          corr(settings.u1, settings.v2) +
                          corr(settings.u2, settings.v1) -
                          corr(settings.u2, settings.v2));
  report.violated = report.value > 2.0 + tol;
  return report;
}

ChshReport chsh_optimize(const JointKet& state,
                         const individuation::BlockSpec& block, int restarts,
                         std::uint64_t seed) {
  const Eigen::Matrix3d t = correlation_matrix(state, block);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const auto random_unit = [&]() {
    Eigen::Vector3d v;
    do {
      v << gauss(rng), gauss(rng), gauss(rng);
    } while (v.norm() < 1e-6);
    return Eigen::Vector3d(v / v.norm());
  };
  const auto safe_unit = [](const Eigen::Vector3d& v,
                            const Eigen::Vector3d& keep) {
    return v.norm() > 1e-14 ? Eigen::Vector3d(v / v.norm()) : keep;
  };

  ChshReport best;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    ChshSettings s{random_unit(), random_unit(), random_unit(), random_unit()};
    double value = 0.0;
    for (int it = 0; it < 500; ++it) {
      s.u1 = safe_unit(t * (s.v1 + s.v2), s.u1);
      s.u2 = safe_unit(t * (s.v1 - s.v2), s.u2);
      s.v1 = safe_unit(t.transpose() * (s.u1 + s.u2), s.v1);
      s.v2 = safe_unit(t.transpose() * (s.u1 - s.u2), s.v2);
      const double next = s.u1.dot(t * (s.v1 + s.v2)) +
                          s.u2.dot(t * (s.v1 - s.v2));
      if (std::abs(next - value) < 1e-13) {
        value = next;
        break;
      }
      value = next;
    }
    if (value > best.value) {
      best.value = value;
      best.settings = s;
    }
  }
  best.violated = best.value > 2.0 + 1e-9;
  return best;
}

} // namespace piqm::entanglement
