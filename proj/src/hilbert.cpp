#include "piqm/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace piqm::hilbert {

namespace {

Vec kron_vec(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

} // namespace

std::vector<int> decode_index(std::int64_t idx, int d, int n) {
  std::vector<int> digits(n);
  for (int k = n - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(idx % d);
    idx /= d;
  }
  return digits;
}

std::int64_t encode_index(const std::vector<int>& digits, int d) {
  std::int64_t idx = 0;
  for (int v : digits) idx = idx * d + v;
  return idx;
}

JointOperator permutation_operator(const Permutation& perm, int d,
                                   std::int64_t cap) {
  perm.validate();
  const int n = perm.size();
  const std::int64_t dim = checked_pow(d, n, cap);
  Mat P = Mat::Zero(dim, dim);
  std::vector<int> moved(n);
  for (std::int64_t col = 0; col < dim; ++col) {
    const std::vector<int> digits = decode_index(col, d, n);
    for (int i = 0; i < n; ++i) moved[perm.target[i]] = digits[i];
    P(encode_index(moved, d), col) = 1.0;
  }
  return JointOperator{std::move(P), d, n};
}

JointOperator symmetrizer(int d, int n, Statistics stat, std::int64_t cap) {
  const std::int64_t dim = checked_pow(d, n, cap);
  Mat S = Mat::Zero(dim, dim);
  Permutation p = Permutation::identity(n);
  const double norm = factorial(n);
  do {
    const double w =
        (stat == Statistics::fermion) ? static_cast<double>(p.sign()) : 1.0;
    S += (w / norm) * permutation_operator(p, d, cap).matrix;
  } while (std::next_permutation(p.target.begin(), p.target.end()));
  return JointOperator{std::move(S), d, n};
}

JointKet symmetrize_product(const std::vector<SingleKet>& factors,
                            Statistics stat) {
  if (factors.size() < 2)
    throw error(errc::precondition, "too_few_factors",
                "need at least two factors to (anti)symmetrize");
  const int n = static_cast<int>(factors.size());
  const int d = static_cast<int>(factors[0].size());
  for (const auto& f : factors)
    if (f.size() != d)
      throw error(errc::precondition, "dimension_mismatch",
                  "factors have unequal single-system dimensions");
  Vec prod = factors[0];
  for (int k = 1; k < n; ++k) prod = kron_vec(prod, factors[k]);
  Vec out = symmetrizer(d, n, stat).matrix * prod;
  const double nrm = out.norm();
  if (nrm < 1e-12)
    throw error(errc::precondition, "zero_vector",
                "(anti)symmetrization annihilated the product state");
  out /= nrm;
  return JointKet{std::move(out), d, n, to_sector(stat)};
}

JointKet wedge(const SingleKet& phi, const SingleKet& chi) {
  if (phi.size() != chi.size())
    throw error(errc::precondition, "dimension_mismatch",
                "wedge factors have unequal dimensions");
  const int d = static_cast<int>(phi.size());
  Vec out = (kron_vec(phi, chi) - kron_vec(chi, phi)) / std::sqrt(2.0);
  const double nrm = out.norm();
  if (nrm < 1e-12)
    throw error(errc::precondition, "zero_vector",
                "wedge of proportional vectors vanishes");
  out /= nrm;
  return JointKet{std::move(out), d, 2, Sector::fermion};
}

bool is_permutation_invariant(const JointOperator& Q, double tol) {
  if (Q.matrix.rows() != Q.matrix.cols())
    throw error(errc::precondition, "bad_operator", "matrix is not square");
  for (int k = 0; k + 1 < Q.n; ++k) {
    const Mat P =
        permutation_operator(Permutation::transposition(Q.n, k, k + 1), Q.d)
            .matrix;
    if ((P * Q.matrix * P.adjoint() - Q.matrix).cwiseAbs().maxCoeff() > tol)
      return false;
  }
  return true;
}

Mat partial_trace_keep(const Mat& rho, int d, int n, int keep) {
  const std::int64_t right = checked_pow(d, n - 1 - keep);
  const std::int64_t left = checked_pow(d, keep);
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cplx acc = 0.0;
      for (std::int64_t a = 0; a < left; ++a)
        for (std::int64_t b = 0; b < right; ++b)
          acc += rho((a * d + i) * right + b, (a * d + j) * right + b);
      out(i, j) = acc;
    }
  return out;
}

namespace {

DensityOp average_state_impl(const Mat& rho, int d, int n, double tol) {
  Mat first = partial_trace_keep(rho, d, n, 0);
  Mat acc = first;
  for (int k = 1; k < n; ++k) {
    Mat other = partial_trace_keep(rho, d, n, k);
    if ((other - first).cwiseAbs().maxCoeff() > tol)
      throw error(errc::precondition, "non_permutation_invariant",
                  "per-factor partial traces disagree; state is not "
                  "permutation invariant");
    acc += other;
  }
  return DensityOp{acc / static_cast<double>(n)};
}

} // namespace

DensityOp average_state(const JointKet& state, double tol) {
  return average_state_impl(state.amplitudes * state.amplitudes.adjoint(),
                            state.d, state.n, tol);
}

DensityOp average_state(const DensityOp& rho, int d, int n, double tol) {
  return average_state_impl(rho.matrix, d, n, tol);
}

double von_neumann_entropy(const DensityOp& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > 1e-15) s -= lam * std::log2(lam);
  }
  return s;
}

JointKet random_sector_state(int d, int n, Statistics stat,
                             std::mt19937_64& rng) {
  if (stat == Statistics::fermion && d < n)
    throw error(errc::unsupported, "empty_sector",
                "fermion sector is empty for d < N");
  const std::int64_t dim = checked_pow(d, n);
  const Mat S = symmetrizer(d, n, stat).matrix;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vec raw(dim);
    for (std::int64_t i = 0; i < dim; ++i) raw(i) = cplx(gauss(rng), gauss(rng));
    Vec proj = S * raw;
    const double nrm = proj.norm();
    if (nrm > 1e-8)
      return JointKet{proj / nrm, d, n, to_sector(stat)};
  }
  throw error(errc::unsupported, "empty_sector",
              "sector projection annihilated every sample");
}

SingleKet random_single_ket(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  return v / v.norm();
}

Mat random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix phases so the distribution is Haar, not QR-convention dependent.
  for (int j = 0; j < d; ++j) {
    const cplx rjj = r(j, j);
    q.col(j) *= (std::abs(rjj) > 0.0) ? rjj / std::abs(rjj) : cplx(1.0);
  }
  return q;
}

Mat random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
  return 0.5 * (a + a.adjoint());
}

} // namespace piqm::hilbert
