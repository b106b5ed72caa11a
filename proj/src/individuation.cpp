#include "piqm/individuation.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "piqm/hilbert.hpp"

namespace piqm::individuation {

namespace {

double operator_norm(const Mat& m) {
  return m.jacobiSvd().singularValues().maxCoeff();
}

Mat kron_chain(const std::vector<const Mat*>& factors) {
  Mat acc = *factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k)
    acc = Eigen::kroneckerProduct(acc, *factors[k]).eval();
  return acc;
}

} // namespace

Criterion make_criterion(std::vector<SingleKet> span, std::string label,
                         double tol) {
  if (span.empty())
    throw error(errc::precondition, "empty_criterion",
                "criterion needs at least one spanning vector");
  const int d = static_cast<int>(span[0].size());
  for (const auto& v : span)
    if (static_cast<int>(v.size()) != d)
      throw error(errc::precondition, "dimension_mismatch",
                  "criterion span vectors have unequal dimensions");
  for (std::size_t i = 0; i < span.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const cplx g = span[i].dot(span[j]);
      const cplx want = (i == j) ? cplx(1.0) : cplx(0.0);
      if (std::abs(g - want) > tol)
        throw error(errc::precondition, "non_orthonormal_span",
                    "criterion span is not orthonormal within tolerance");
    }
  Mat proj = Mat::Zero(d, d);
  for (const auto& v : span) proj += v * v.adjoint();
  return Criterion{std::move(proj), std::move(span), std::move(label)};
}

Criterion identity_criterion(int d, std::string label) {
  std::vector<SingleKet> span;
  span.reserve(d);
  for (int i = 0; i < d; ++i) {
    Vec v = Vec::Zero(d);
    v(i) = 1.0;
    span.push_back(std::move(v));
  }
  return Criterion{Mat::Identity(d, d), std::move(span), std::move(label)};
}

Criterion criterion_from_projector(const Mat& projector, std::string label,
                                   double tol) {
  if (projector.rows() != projector.cols())
    throw error(errc::precondition, "bad_projector", "matrix is not square");
  if ((projector - projector.adjoint()).cwiseAbs().maxCoeff() > tol ||
      (projector * projector - projector).cwiseAbs().maxCoeff() > tol)
    throw error(errc::precondition, "bad_projector",
                "matrix is not a Hermitian idempotent within tolerance");
  Eigen::SelfAdjointEigenSolver<Mat> es(projector);
  std::vector<SingleKet> span;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) span.push_back(es.eigenvectors().col(i));
  if (span.empty())
    throw error(errc::precondition, "empty_criterion",
                "projector has rank zero");
  return Criterion{projector, std::move(span), std::move(label)};
}

BlockSpec make_block(const std::vector<Criterion>& criteria, Statistics stat,
                     double tol) {
  if (criteria.size() < 2)
    throw error(errc::precondition, "too_few_criteria",
                "an individuation block needs at least two criteria");
  const int n = static_cast<int>(criteria.size());
  const int d = criteria[0].d();
  for (const auto& c : criteria)
    if (c.d() != d)
      throw error(errc::precondition, "dimension_mismatch",
                  "criteria act on unequal single-system spaces");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (operator_norm(criteria[i].projector * criteria[j].projector) > tol)
        throw error(errc::precondition, "overlapping_criteria",
                    "criteria are not pairwise orthogonal; neither system "
                    "would be individuated by the other's criterion");

  const std::int64_t dim = checked_pow(d, n);
  Mat block = Mat::Zero(dim, dim);
  std::vector<int> assign(n);
  std::iota(assign.begin(), assign.end(), 0);
  do {
    std::vector<const Mat*> factors(n);
    for (int slot = 0; slot < n; ++slot)
      factors[slot] = &criteria[assign[slot]].projector;
    block += kron_chain(factors);
  } while (std::next_permutation(assign.begin(), assign.end()));

  return BlockSpec{criteria, JointOperator{std::move(block), d, n}, stat};
}

Mat intertwiner(const BlockSpec& block) {
  const int n = block.n();
  const int d = block.d();
  std::int64_t prod_dim = 1;
  for (const auto& c : block.criteria) prod_dim *= c.dim();
  const std::int64_t joint_dim = checked_pow(d, n);

  const Mat sym = hilbert::symmetrizer(d, n, block.statistics).matrix;
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  const double scale = std::sqrt(fact);

  Mat u(joint_dim, prod_dim);
  std::vector<int> combo(n, 0);
  for (std::int64_t col = 0; col < prod_dim; ++col) {
    Vec prod = block.criteria[0].span[combo[0]];
    for (int k = 1; k < n; ++k)
      prod = Eigen::kroneckerProduct(prod, block.criteria[k].span[combo[k]])
                 .eval();
    u.col(col) = scale * (sym * prod);
    for (int k = n - 1; k >= 0; --k) { // lexicographic advance
      if (++combo[k] < block.criteria[k].dim()) break;
      combo[k] = 0;
    }
  }
  return u;
}

JointOperator lift_product_operator(const std::vector<Mat>& ops,
                                    const BlockSpec& block) {
  const int n = block.n();
  if (static_cast<int>(ops.size()) != n)
    throw error(errc::precondition, "arity_mismatch",
                "need one single-system operator per criterion");
  std::vector<Mat> compressed(n);
  for (int i = 0; i < n; ++i)
    compressed[i] =
        block.criteria[i].projector * ops[i] * block.criteria[i].projector;

  const std::int64_t dim = checked_pow(block.d(), n);
  Mat lift = Mat::Zero(dim, dim);
  std::vector<int> assign(n);
  std::iota(assign.begin(), assign.end(), 0);
  do {
    std::vector<const Mat*> factors(n);
    for (int slot = 0; slot < n; ++slot) factors[slot] = &compressed[assign[slot]];
    lift += kron_chain(factors);
  } while (std::next_permutation(assign.begin(), assign.end()));
  return JointOperator{std::move(lift), block.d(), n};
}

double block_support(const JointKet& state, const BlockSpec& block) {
  const cplx v =
      state.amplitudes.dot(block.block_projector.matrix * state.amplitudes);
  return std::clamp(v.real(), 0.0, 1.0);
}

double block_support(const DensityOp& rho, const BlockSpec& block) {
  const cplx v = (block.block_projector.matrix * rho.matrix).trace();
  return std::clamp(v.real(), 0.0, 1.0);
}

double russellian_expectation(const DensityOp& rho, const JointOperator& Q,
                              const BlockSpec& block, double tol) {
  const Mat& e = block.block_projector.matrix;
  const Mat commutator = Q.matrix * e - e * Q.matrix;
  const double scale = std::max(1.0, Q.matrix.cwiseAbs().maxCoeff());
  if (commutator.cwiseAbs().maxCoeff() > tol * scale)
    throw error(errc::precondition, "non_commuting",
                "operator does not commute with the block projector");
  return (e * rho.matrix * e * Q.matrix).trace().real();
}

DensityOp strawsonian_conditionalize(const DensityOp& rho,
                                     const BlockSpec& block, double cutoff) {
  const Mat& e = block.block_projector.matrix;
  const double support = (e * rho.matrix).trace().real();
  if (support <= cutoff)
    throw error(errc::precondition, "zero_support",
                "state has no support in the individuation block");
  return DensityOp{e * rho.matrix * e / support};
}

BlockDecomposition block_decomposition(const std::vector<Criterion>& family,
                                       Statistics stat, double tol) {
  if (family.empty())
    throw error(errc::precondition, "incomplete_family", "empty family");
  const int d = family[0].d();
  Mat sum = Mat::Zero(d, d);
  for (const auto& c : family) sum += c.projector;
  if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
    throw error(errc::precondition, "incomplete_family",
                "criteria do not sum to the identity");

  BlockDecomposition out;
  const int m = static_cast<int>(family.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      out.blocks.push_back(make_block({family[i], family[j]}, stat));

  const Mat sym = hilbert::symmetrizer(d, 2, stat).matrix;
  for (int i = 0; i < m; ++i) {
    const Mat diag =
        Eigen::kroneckerProduct(family[i].projector, family[i].projector);
    Mat part = (sym * diag * sym).eval();
    const int rank = static_cast<int>(std::lround(part.trace().real()));
    if (rank > 0)
      out.residuals.push_back(
          ResidualPart{i, JointOperator{std::move(part), d, 2}, rank});
  }
  return out;
}

} // namespace piqm::individuation
