#pragma once

// Core joint-space machinery: permutation action on tensor factors, sector
// projectors, sector states, average (single-system) states and entropy.

#include <random>

#include "piqm/types.hpp"

namespace piqm::hilbert {

// Unitary representation of a slot permutation on (C^d)^{(x)n}.
// Convention: the factor sitting in slot i moves to slot perm.target[i].
JointOperator permutation_operator(const Permutation& perm, int d,
                                   std::int64_t cap = defaults::dim_cap);

// S_+- = (1/n!) sum_pi (+-1)^{#(pi)} P(pi); Hermitian idempotent projector
// onto the boson/fermion sector.
JointOperator symmetrizer(int d, int n, Statistics stat,
                          std::int64_t cap = defaults::dim_cap);

// Normalized (anti)symmetrization of factor_1 (x) ... (x) factor_n.
// Fermions with linearly dependent factors annihilate and raise an error;
// boson repeated factors are fine (renormalized).
JointKet symmetrize_product(const std::vector<SingleKet>& factors,
                            Statistics stat);

// (phi (x) chi - chi (x) phi)/sqrt(2), renormalized for non-orthogonal
// factors; errors when phi and chi are proportional.
JointKet wedge(const SingleKet& phi, const SingleKet& chi);

// True iff Q commutes with every adjacent transposition (they generate S_n).
bool is_permutation_invariant(const JointOperator& Q,
                              double tol = defaults::tol_proj);

// rho_bar: the partial trace over all but one factor. All factor positions
// agree on sector states; disagreement beyond tol is an error.
DensityOp average_state(const JointKet& state, double tol = 1e-10);
DensityOp average_state(const DensityOp& rho, int d, int n, double tol = 1e-10);

// Partial trace of a d^n x d^n density matrix keeping only slot `keep`.
Mat partial_trace_keep(const Mat& rho, int d, int n, int keep);

// -sum lambda_i log2 lambda_i in bits; 0 log 0 := 0.
double von_neumann_entropy(const DensityOp& rho);

// Haar-uniform pure state on the requested sector: Gaussian amplitudes,
// sector projection, normalization.
JointKet random_sector_state(int d, int n, Statistics stat,
                             std::mt19937_64& rng);

SingleKet random_single_ket(int d, std::mt19937_64& rng);
Mat random_unitary(int d, std::mt19937_64& rng);
Mat random_hermitian(int d, std::mt19937_64& rng);

// Tuple <-> flat index helpers for the lexicographic basis convention.
std::vector<int> decode_index(std::int64_t idx, int d, int n);
std::int64_t encode_index(const std::vector<int>& digits, int d);

} // namespace piqm::hilbert
