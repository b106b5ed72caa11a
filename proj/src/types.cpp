#include "piqm/types.hpp"

#include <algorithm>

namespace piqm {

std::int64_t checked_pow(int d, int n, std::int64_t cap) {
  if (d < 1 || n < 0)
    throw error(errc::precondition, "bad_dimension",
                "need d >= 1 and n >= 0, got d=" + std::to_string(d) +
                    " n=" + std::to_string(n));
  std::int64_t out = 1;
  for (int k = 0; k < n; ++k) {
    if (out > cap / d)
      throw error(errc::resource, "dimension_cap",
                  "d^n exceeds the configured cap of " + std::to_string(cap));
    out *= d;
  }
  if (out > cap)
    throw error(errc::resource, "dimension_cap",
                "d^n exceeds the configured cap of " + std::to_string(cap));
  return out;
}

Permutation Permutation::identity(int n) {
  Permutation p;
  p.target.resize(n);
  std::iota(p.target.begin(), p.target.end(), 0);
  return p;
}

Permutation Permutation::transposition(int n, int i, int j) {
  Permutation p = identity(n);
  std::swap(p.target[i], p.target[j]);
  return p;
}

Permutation Permutation::from_one_based(const std::vector<int>& mapping) {
  Permutation p;
  p.target.reserve(mapping.size());
  for (int v : mapping) p.target.push_back(v - 1);
  p.validate();
  return p;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.target.resize(target.size());
  for (int i = 0; i < size(); ++i) p.target[target[i]] = i;
  return p;
}

Permutation Permutation::compose_after(const Permutation& other) const {
  Permutation p;
  p.target.resize(target.size());
  for (int i = 0; i < size(); ++i) p.target[i] = target[other.target[i]];
  return p;
}

int Permutation::sign() const {
  int inversions = 0;
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      if (target[i] > target[j]) ++inversions;
  return (inversions % 2 == 0) ? 1 : -1;
}

void Permutation::validate() const {
  std::vector<char> seen(target.size(), 0);
  for (int v : target) {
    if (v < 0 || v >= size() || seen[v])
      throw error(errc::precondition, "bad_permutation",
                  "mapping is not a bijection on {1..N}");
    seen[v] = 1;
  }
}

void validate_density(const DensityOp& rho, double tol) {
  const Mat& m = rho.matrix;
  if (m.rows() != m.cols())
    throw error(errc::precondition, "bad_density", "matrix is not square");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw error(errc::precondition, "bad_density", "matrix is not Hermitian");
  if (std::abs(m.trace() - cplx(1.0)) > tol)
    throw error(errc::precondition, "bad_density", "trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw error(errc::precondition, "bad_density",
                "matrix has a negative eigenvalue");
}

DensityOp pure_density(const Vec& psi) {
  return DensityOp{psi * psi.adjoint()};
}

} // namespace piqm
