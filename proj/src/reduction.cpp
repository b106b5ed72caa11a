#include "piqm/reduction.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "piqm/hilbert.hpp"

namespace piqm::reduction {

namespace {

// 1^(x)left (x) M (x) 1^(x)right on the d-ladder.
Mat embed_at(const Mat& m, int d, int n, int slot, std::int64_t cap) {
  const std::int64_t left = checked_pow(d, slot, cap);
  const std::int64_t right = checked_pow(d, n - 1 - slot, cap);
  checked_pow(d, n, cap);
  Mat acc = Mat::Identity(left, left);
  acc = Eigen::kroneckerProduct(acc, m).eval();
  acc = Eigen::kroneckerProduct(acc, Mat::Identity(right, right)).eval();
  return acc;
}

Mat lift_sum(const Mat& m, int d, int n, std::int64_t cap) {
  const std::int64_t dim = checked_pow(d, n, cap);
  Mat out = Mat::Zero(dim, dim);
  for (int slot = 0; slot < n; ++slot) out += embed_at(m, d, n, slot, cap);
  return out;
}

double real_expectation(const JointKet& state, const Mat& op) {
  return state.amplitudes.dot(op * state.amplitudes).real();
}

double real_expectation(const DensityOp& rho, const Mat& op) {
  return (rho.matrix * op).trace().real();
}

} // namespace

JointOperator number_operator(const Criterion& E, int N, std::int64_t cap) {
  if (N < 1)
    throw error(errc::precondition, "bad_particle_count", "need N >= 1");
  return JointOperator{lift_sum(E.projector, E.d(), N, cap), E.d(), N};
}

JointOperator lift_single(const Mat& Q, const Criterion& E, int N,
                          std::int64_t cap) {
  const Mat eqe = E.projector * Q * E.projector;
  return JointOperator{lift_sum(eqe, E.d(), N, cap), E.d(), N};
}

namespace {

template <typename StateT>
double expectation_alpha_impl(const StateT& state, int d, int n, const Mat& Q,
                              const Criterion& E, double cutoff) {
  const double n_alpha =
      real_expectation(state, number_operator(E, n).matrix);
  if (n_alpha <= cutoff)
    throw error(errc::precondition, "zero_n_alpha",
                "no individuated system: <n_alpha> is zero within cutoff");
  return real_expectation(state, lift_single(Q, E, n).matrix) / n_alpha;
}

template <typename StateT>
ReducedStateReport reduced_state_alpha_impl(const StateT& state,
                                            const DensityOp& rho_bar, int n,
                                            const Criterion& E, double cutoff,
                                            double uu_tol) {
  const double weight = (E.projector * rho_bar.matrix).trace().real();
  // <n_alpha> = N tr(rho_bar E); the cutoff applies to the former.
  const double n_alpha = n * weight;
  if (n_alpha <= cutoff)
    throw error(errc::precondition, "zero_n_alpha",
                "no individuated system: <n_alpha> is zero within cutoff");
  ReducedStateReport report;
  report.rho_alpha =
      DensityOp{E.projector * rho_bar.matrix * E.projector / weight};
  report.n_alpha_expectation = n_alpha;
  report.criterion_dim = E.dim();

  const Mat n_op = number_operator(E, n).matrix;
  const double en = real_expectation(state, n_op);
  const double en2 = real_expectation(state, Mat(n_op * n_op));
  report.ubiquitous_unique =
      std::abs(en - 1.0) < uu_tol && std::abs(en2 - 1.0) < uu_tol;
  // <n(n-1)> > 0 iff some weight sits on eigenvalues >= 2.
  report.multi_system_average = (en2 - en) > 1e-8;
  return report;
}

} // namespace

double expectation_alpha(const JointKet& state, const Mat& Q,
                         const Criterion& E, double cutoff) {
  return expectation_alpha_impl(state, state.d, state.n, Q, E, cutoff);
}

double expectation_alpha(const DensityOp& rho, int d, int n, const Mat& Q,
                         const Criterion& E, double cutoff) {
  return expectation_alpha_impl(rho, d, n, Q, E, cutoff);
}

ReducedStateReport reduced_state_alpha(const JointKet& state,
                                       const Criterion& E, double cutoff) {
  return reduced_state_alpha_impl(state, hilbert::average_state(state),
                                  state.n, E, cutoff, 1e-8);
}

ReducedStateReport reduced_state_alpha(const DensityOp& rho, int d, int n,
                                       const Criterion& E, double cutoff) {
  return reduced_state_alpha_impl(rho, hilbert::average_state(rho, d, n), n, E,
                                  cutoff, 1e-8);
}

bool is_ubiquitous_unique(const JointKet& state, const Criterion& E,
                          double tol) {
  const Mat n_op = number_operator(E, state.n).matrix;
  return (n_op * state.amplitudes - state.amplitudes).norm() < tol;
}

bool is_ubiquitous_unique(const DensityOp& rho, int d, int n,
                          const Criterion& E, double tol) {
  const Mat n_op = number_operator(E, n).matrix;
  const double en = real_expectation(rho, n_op);
  const double en2 = real_expectation(rho, Mat(n_op * n_op));
  // <n> = <n^2> = 1 confines the state to the eigenvalue-1 subspace.
  return std::abs(en - 1.0) < tol && std::abs(en2 - 1.0) < tol;
}

std::vector<DensityOp> block_diagonal_assembly(const JointKet& state,
                                               const BlockSpec& block,
                                               double tol) {
  const double support = individuation::block_support(state, block);
  if (std::abs(support - 1.0) > tol)
    throw error(errc::precondition, "not_in_block",
                "state is not captured by the individuation block");
  const int n = state.n;
  const DensityOp rho_bar = hilbert::average_state(state);

  std::vector<DensityOp> parts;
  for (const auto& crit : block.criteria) {
    if (!is_ubiquitous_unique(state, crit, tol))
      throw error(errc::precondition, "not_ubiquitous_unique",
                  "criterion '" + crit.label +
                      "' is not ubiquitous and unique in this state");
    auto report = reduced_state_alpha(state, crit);
    // Eigenvalue-1 shortcut: rho_alpha = N E rho_bar E.
    const Mat direct =
        double(n) * crit.projector * rho_bar.matrix * crit.projector;
    if ((report.rho_alpha.matrix - direct).cwiseAbs().maxCoeff() > 1e-10)
      throw error(errc::precondition, "assembly_mismatch",
                  "reduced state differs from N E rho_bar E");
    parts.push_back(std::move(report.rho_alpha));
  }

  // N rho_bar must be exactly block diagonal with these parts: no weight
  // outside the criteria ranges and no cross terms.
  Mat assembled = Mat::Zero(state.d, state.d);
  for (std::size_t i = 0; i < parts.size(); ++i)
    assembled += parts[i].matrix / double(n);
  if ((assembled - rho_bar.matrix).cwiseAbs().maxCoeff() > 1e-8)
    throw error(errc::precondition, "assembly_mismatch",
                "average state is not block diagonal along the criteria");
  return parts;
}

namespace {

Mat witness_op(int d, const Mat& A) {
  const Mat id = Mat::Identity(d, d);
  const Mat diff = Eigen::kroneckerProduct(A, id).eval() -
                   Eigen::kroneckerProduct(id, A).eval();
  return 0.25 * diff * diff;
}

} // namespace

double anticorrelation_witness(const JointKet& state, const Mat& A) {
  if (state.n != 2)
    throw error(errc::precondition, "bad_particle_count",
                "witness is defined for two-particle states");
  return real_expectation(state, witness_op(state.d, A));
}

double anticorrelation_witness(const DensityOp& rho, int d, const Mat& A) {
  return real_expectation(rho, witness_op(d, A));
}

} // namespace piqm::reduction
