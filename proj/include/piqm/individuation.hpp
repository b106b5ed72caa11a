#pragma once

// Qualitative individuation: criteria (single-system projectors), individuation
// blocks (symmetrized products of pairwise-orthogonal criteria), intertwiners
// onto product spaces, and the two conditionalization schemes.

#include <string>

#include "piqm/types.hpp"

namespace piqm::individuation {

struct Criterion {
  Mat projector;               // d x d, Hermitian idempotent
  std::vector<SingleKet> span; // orthonormal basis of the range; order matters
                               // wherever a pseudo-spin basis is needed
  std::string label;

  int dim() const { return static_cast<int>(span.size()); }
  int d() const { return static_cast<int>(projector.rows()); }
};

// Builds the projector from an orthonormal spanning set; validates
// orthonormality within tol.
Criterion make_criterion(std::vector<SingleKet> span, std::string label = "",
                         double tol = 1e-8);

Criterion identity_criterion(int d, std::string label = "identity");

// Recovers a spanning set by diagonalizing; validates idempotency.
Criterion criterion_from_projector(const Mat& projector, std::string label = "",
                                   double tol = defaults::tol_proj);

struct BlockSpec {
  std::vector<Criterion> criteria; // length N, pairwise orthogonal
  JointOperator block_projector;
  Statistics statistics = Statistics::fermion;

  int d() const { return block_projector.d; }
  int n() const { return block_projector.n; }
};

// Block projector: sum over all assignments of the criteria to tensor slots.
// Criteria must be pairwise orthogonal (operator norm of E_i E_j below tol).
BlockSpec make_block(const std::vector<Criterion>& criteria, Statistics stat,
                     double tol = defaults::tol_proj);

// The isometry U_+- from E_1[H] (x) ... (x) E_N[H] into the joint sector;
// for N=2 this is (1 +- P(12))/sqrt(2) restricted to the product range.
// Columns follow the lexicographic order of the criteria span bases.
Mat intertwiner(const BlockSpec& block);

// Symmetrized lift of per-system operators: for N=2,
// E_a A E_a (x) E_b B E_b + E_b B E_b (x) E_a A E_a. Agrees with conjugation
// by the intertwiner on the sector and passes is_permutation_invariant.
JointOperator lift_product_operator(const std::vector<Mat>& ops,
                                    const BlockSpec& block);

// Tr(rho E-block), clamped into [0, 1].
double block_support(const JointKet& state, const BlockSpec& block);
double block_support(const DensityOp& rho, const BlockSpec& block);

// Tr(E rho E Q) for Q commuting with the block projector; zero-support states
// give 0 for every Q. Non-commuting Q is rejected.
double russellian_expectation(const DensityOp& rho, const JointOperator& Q,
                              const BlockSpec& block,
                              double tol = defaults::tol_proj);

// Lueders conditionalization E rho E / Tr(rho E); errors on zero support.
DensityOp strawsonian_conditionalize(const DensityOp& rho,
                                     const BlockSpec& block,
                                     double cutoff = defaults::n_alpha_cutoff);

// S_+-(H_i (x) H_i): the doubly-occupied remainder for criterion i. Empty
// parts (fermion rank-1 criteria) are omitted from decompositions.
struct ResidualPart {
  int criterion_index = 0;
  JointOperator projector;
  int dim = 0;
};

struct BlockDecomposition {
  std::vector<BlockSpec> blocks;        // one per unordered criterion pair
  std::vector<ResidualPart> residuals;  // nonzero diagonal parts
};

// Decomposes the 2-particle sector along a complete orthogonal family.
BlockDecomposition block_decomposition(const std::vector<Criterion>& family,
                                       Statistics stat, double tol = 1e-8);

} // namespace piqm::individuation
