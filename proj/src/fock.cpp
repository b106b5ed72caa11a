#include "piqm/fock.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "piqm/hilbert.hpp"
#include "piqm/reduction.hpp"

namespace piqm::fock {

namespace {

std::int64_t sector_dim(int d, int n) {
  return checked_pow(d, n, defaults::dim_cap);
}

void require_shape(const FockVector& psi) {
  if (psi.d < 1 || psi.n_max < 0 ||
      psi.sectors.size() != static_cast<std::size_t>(psi.n_max) + 1)
    throw error(errc::precondition, "bad_fock_shape",
                "sector list does not match d and N_max");
  for (int n = 0; n <= psi.n_max; ++n)
    if (psi.sectors[n].size() != sector_dim(psi.d, n))
      throw error(errc::precondition, "bad_fock_shape",
                  "sector dimension is not d^N");
}

void require_mode(const SingleKet& phi, const FockVector& psi) {
  require_shape(psi);
  if (phi.size() != psi.d)
    throw error(errc::precondition, "dimension_mismatch",
                "mode dimension does not match the Fock space");
}

FockVector zero_like(const FockVector& psi) {
  FockVector out;
  out.d = psi.d;
  out.n_max = psi.n_max;
  out.statistics = psi.statistics;
  out.truncated = psi.truncated;
  out.sectors.resize(psi.n_max + 1);
  for (int n = 0; n <= psi.n_max; ++n)
    out.sectors[n] = Vec::Zero(psi.sectors[n].size());
  return out;
}

} // namespace

double FockVector::norm() const {
  double sq = 0.0;
  for (const Vec& s : sectors) sq += s.squaredNorm();
  return std::sqrt(sq);
}

FockVector FockOperator::apply(const FockVector& psi) const {
  if (psi.d != d || psi.n_max != n_max)
    throw error(errc::precondition, "dimension_mismatch",
                "operator and state live on different Fock spaces");
  FockVector out = zero_like(psi);
  for (int n = 0; n <= n_max; ++n) out.sectors[n] = blocks[n] * psi.sectors[n];
  return out;
}

FockVector vacuum(int d, int n_max, Statistics stat) {
  if (d < 1 || n_max < 0)
    throw error(errc::precondition, "bad_fock_shape",
                "need d >= 1 and N_max >= 0");
  sector_dim(d, n_max); // capacity guard
  FockVector out;
  out.d = d;
  out.n_max = n_max;
  out.statistics = stat;
  out.sectors.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out.sectors[n] = Vec::Zero(sector_dim(d, n));
  out.sectors[0](0) = 1.0;
  return out;
}

FockVector embed_sector(const JointKet& state, int n_max) {
  if (state.sector == Sector::full)
    throw error(errc::precondition, "sector_required",
                "fixed-N component must carry a boson or fermion tag");
  if (state.n > n_max)
    throw error(errc::precondition, "sector_exceeds_truncation",
                "component particle number exceeds N_max");
  FockVector out = vacuum(
      state.d, n_max,
      state.sector == Sector::boson ? Statistics::boson : Statistics::fermion);
  out.sectors[0](0) = 0.0;
  out.sectors[state.n] = state.amplitudes;
  return out;
}

void validate_fock(const FockVector& psi, double tol) {
  require_shape(psi);
  for (int n = 2; n <= psi.n_max; ++n) {
    if (psi.sectors[n].isZero(0)) continue;
    const Mat s = hilbert::symmetrizer(psi.d, n, psi.statistics).matrix;
    if ((s * psi.sectors[n] - psi.sectors[n]).norm() > tol)
      throw error(errc::precondition, "sector_asymmetry",
                  "sector leaves the (anti)symmetric subspace");
  }
  if (!psi.truncated && std::abs(psi.norm() - 1.0) > tol)
    throw error(errc::precondition, "unnormalized",
                "total Fock norm differs from 1");
}

cplx inner(const FockVector& a, const FockVector& b) {
  require_shape(a);
  require_shape(b);
  if (a.d != b.d || a.n_max != b.n_max || a.statistics != b.statistics)
    throw error(errc::precondition, "dimension_mismatch",
                "Fock vectors live on different spaces");
  cplx sum = 0.0;
  for (int n = 0; n <= a.n_max; ++n) sum += a.sectors[n].dot(b.sectors[n]);
  return sum;
}

std::vector<Vec> sector_basis(int d, int n, Statistics stat) {
  if (n == 0) return {Vec::Ones(1)};
  if (n == 1) {
    std::vector<Vec> out;
    for (int i = 0; i < d; ++i) {
      Vec e = Vec::Zero(d);
      e(i) = 1.0;
      out.push_back(e);
    }
    return out;
  }
  const Mat s = hilbert::symmetrizer(d, n, stat).matrix;
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  std::vector<Vec> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) out.push_back(es.eigenvectors().col(i));
  return out;
}

FockVector create(const SingleKet& phi, const FockVector& psi, bool strict) {
  require_mode(phi, psi);
  FockVector out = zero_like(psi);
  if (psi.sectors[psi.n_max].norm() > 1e-14) {
    if (strict)
      throw error(errc::precondition, "truncation_overflow",
                  "creation would push amplitude past N_max");
    out.truncated = true;
  }
  for (int n = 1; n <= psi.n_max; ++n) {
    if (psi.sectors[n - 1].isZero(0)) continue;
    Vec raw = Eigen::kroneckerProduct(phi, psi.sectors[n - 1]);
    if (n > 1) {
      const Mat s = hilbert::symmetrizer(psi.d, n, psi.statistics).matrix;
      raw = s * raw;
    }
    out.sectors[n] = std::sqrt(double(n)) * raw;
  }
  return out;
}

FockVector annihilate(const SingleKet& phi, const FockVector& psi) {
  require_mode(phi, psi);
  FockVector out = zero_like(psi);
  for (int n = 0; n < psi.n_max; ++n) {
    const std::int64_t tail = sector_dim(psi.d, n);
    Vec acc = Vec::Zero(tail);
    for (int i = 0; i < psi.d; ++i)
      acc += std::conj(phi(i)) * psi.sectors[n + 1].segment(i * tail, tail);
    out.sectors[n] = std::sqrt(double(n + 1)) * acc;
  }
  return out;
}

double check_ccr(const SingleKet& phi, const SingleKet& chi, Statistics stat,
                 int n_max) {
  if (n_max < 2)
    throw error(errc::precondition, "bad_fock_shape",
                "need N_max >= 2 to probe the ladder algebra");
  if (phi.size() != chi.size())
    throw error(errc::precondition, "dimension_mismatch",
                "modes live on different single-system spaces");
  const int d = static_cast<int>(phi.size());
  // Bosons: commutators. Fermions: anticommutators.
  const double s = (stat == Statistics::fermion) ? 1.0 : -1.0;
  const cplx overlap = phi.dot(chi);

  double worst = 0.0;
  for (int n = 0; n + 1 <= n_max; ++n)
    for (const Vec& b : sector_basis(d, n, stat)) {
      FockVector base = vacuum(d, n_max, stat);
      base.sectors[0](0) = 0.0;
      base.sectors[n] = b;

      FockVector r1 = annihilate(phi, create(chi, base));
      const FockVector down = annihilate(phi, base);
      const FockVector updown = create(chi, down);
      for (int k = 0; k <= n_max; ++k)
        r1.sectors[k] += s * updown.sectors[k] - overlap * base.sectors[k];
      worst = std::max(worst, r1.norm());

      FockVector r2 = annihilate(phi, annihilate(chi, base));
      const FockVector swapped = annihilate(chi, annihilate(phi, base));
      for (int k = 0; k <= n_max; ++k) r2.sectors[k] += s * swapped.sectors[k];
      worst = std::max(worst, r2.norm());
    }
  return worst;
}

FockOperator mode_number(const SingleKet& phi, Statistics stat, int n_max) {
  const int d = static_cast<int>(phi.size());
  if (d < 1)
    throw error(errc::precondition, "dimension_mismatch", "empty mode vector");
  sector_dim(d, n_max);
  FockOperator op;
  op.d = d;
  op.n_max = n_max;
  op.blocks.resize(n_max + 1);
  op.blocks[0] = Mat::Zero(1, 1);
  const Mat proj = phi * phi.adjoint();
  for (int n = 1; n <= n_max; ++n) {
    // a^dag(phi) a(phi) on sector N: contract the lead slot with phi, then
    // prepend phi and resymmetrize; the sqrt(N) factors compound to N.
    const std::int64_t tail = sector_dim(d, n - 1);
    Mat raw = double(n) *
              Eigen::kroneckerProduct(proj, Mat::Identity(tail, tail)).eval();
    if (n > 1) raw = hilbert::symmetrizer(d, n, stat).matrix * raw;
    op.blocks[n] = raw;
  }
  return op;
}

FockOperator number_alpha_fock(const individuation::Criterion& criterion,
                               int n_max) {
  const int d = criterion.d();
  sector_dim(d, n_max);
  FockOperator op;
  op.d = d;
  op.n_max = n_max;
  op.blocks.resize(n_max + 1);
  op.blocks[0] = Mat::Zero(1, 1);
  for (int n = 1; n <= n_max; ++n)
    op.blocks[n] = reduction::number_operator(criterion, n).matrix;
  return op;
}

namespace {

// Gram matrix G(i, j) = <a^dag(phi_i) a(phi_j)> over the criterion's span.
Mat occupancy_gram(const FockVector& psi,
                   const individuation::Criterion& criterion) {
  require_shape(psi);
  if (criterion.d() != psi.d)
    throw error(errc::precondition, "dimension_mismatch",
                "criterion dimension does not match the Fock space");
  const int m = criterion.dim();
  std::vector<FockVector> lowered;
  lowered.reserve(m);
  for (int i = 0; i < m; ++i)
    lowered.push_back(annihilate(criterion.span[i], psi));
  Mat g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = inner(lowered[i], lowered[j]);
  return g;
}

} // namespace

double fock_expectation_alpha(const FockVector& psi, const Mat& q,
                              const individuation::Criterion& criterion,
                              double cutoff) {
  if (q.rows() != psi.d || q.cols() != psi.d)
    throw error(errc::precondition, "dimension_mismatch",
                "operator is not a single-system matrix");
  const Mat g = occupancy_gram(psi, criterion);
  const double den = g.real().trace();
  if (den <= cutoff)
    throw error(errc::precondition, "zero_n_alpha",
                "criterion occupancy vanishes; no conditional expectation");
  cplx num = 0.0;
  const int m = criterion.dim();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      num += g(i, j) * (criterion.span[i].adjoint() * q * criterion.span[j])(0);
  return num.real() / den;
}

DensityOp fock_reduced_state_alpha(const FockVector& psi,
                                   const individuation::Criterion& criterion,
                                   double cutoff) {
  const Mat g = occupancy_gram(psi, criterion);
  const double den = g.real().trace();
  if (den <= cutoff)
    throw error(errc::precondition, "zero_n_alpha",
                "criterion occupancy vanishes; no reduced state");
  const int m = criterion.dim();
  Mat span(psi.d, m);
  for (int i = 0; i < m; ++i) span.col(i) = criterion.span[i];
  // <phi_i| rho |phi_j> = G(j, i) / den, i.e. the transposed Gram matrix.
  Mat rho = span * (g.transpose() / den) * span.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return DensityOp{rho};
}

} // namespace piqm::fock
