#pragma once

// Number operators n_alpha, single-system lifts pi_alpha, qualitatively
// individuated expectation values and reduced density operators.

#include "piqm/individuation.hpp"
#include "piqm/types.hpp"

namespace piqm::reduction {

using individuation::BlockSpec;
using individuation::Criterion;

struct ReducedStateReport {
  DensityOp rho_alpha;
  double n_alpha_expectation = 0.0;
  bool ubiquitous_unique = false;
  int criterion_dim = 0;
  // True when n_alpha has weight on eigenvalues > 1, i.e. rho_alpha averages
  // over several systems answering to the same criterion.
  bool multi_system_average = false;
};

// n_alpha = sum_k 1^(k-1) (x) E (x) 1^(N-k); integer spectrum 0..N.
JointOperator number_operator(const Criterion& E, int N,
                              std::int64_t cap = defaults::dim_cap);

// pi_alpha(Q) = sum_k 1^(k-1) (x) EQE (x) 1^(N-k); pi_alpha(1) = n_alpha.
JointOperator lift_single(const Mat& Q, const Criterion& E, int N,
                          std::int64_t cap = defaults::dim_cap);

// <Q>_alpha = <pi_alpha(Q)> / <n_alpha>; errors when no system answers to
// the criterion (<n_alpha> below cutoff).
double expectation_alpha(const JointKet& state, const Mat& Q,
                         const Criterion& E,
                         double cutoff = defaults::n_alpha_cutoff);
double expectation_alpha(const DensityOp& rho, int d, int n, const Mat& Q,
                         const Criterion& E,
                         double cutoff = defaults::n_alpha_cutoff);

// rho_alpha = E rho_bar E / tr(rho_bar E); the Lueders form on the average
// state. Satisfies tr(rho_alpha Q) = expectation_alpha for every Q.
ReducedStateReport reduced_state_alpha(const JointKet& state,
                                       const Criterion& E,
                                       double cutoff = defaults::n_alpha_cutoff);
ReducedStateReport reduced_state_alpha(const DensityOp& rho, int d, int n,
                                       const Criterion& E,
                                       double cutoff = defaults::n_alpha_cutoff);

// True iff the state is an n_alpha eigenstate with eigenvalue 1: exactly one
// constituent answers to E in every term.
bool is_ubiquitous_unique(const JointKet& state, const Criterion& E,
                          double tol = 1e-8);
bool is_ubiquitous_unique(const DensityOp& rho, int d, int n,
                          const Criterion& E, double tol = 1e-8);

// For a state captured by the block with every criterion ubiquitous and
// unique: returns [rho_alpha, rho_beta, ...] and verifies that N rho_bar is
// block diagonal with exactly these blocks.
std::vector<DensityOp> block_diagonal_assembly(const JointKet& state,
                                               const BlockSpec& block,
                                               double tol = 1e-8);

// (1/4) Tr[rho (A (x) 1 - 1 (x) A)^2]; a diagnostic only, not a relation
// between physical systems.
double anticorrelation_witness(const JointKet& state, const Mat& A);
double anticorrelation_witness(const DensityOp& rho, int d, const Mat& A);

} // namespace piqm::reduction
