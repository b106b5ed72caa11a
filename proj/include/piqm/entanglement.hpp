#pragma once

// Canonical two-particle decompositions (paired antisymmetric form for
// fermions, Takagi form for bosons), entanglement detection for identical
// particles, the entropy measure, and CHSH evaluation/optimization inside
// individuation blocks.

#include <cstdint>
#include <vector>

#include "piqm/individuation.hpp"
#include "piqm/types.hpp"

namespace piqm::entanglement {

struct SlaterDecomposition {
  Statistics statistics = Statistics::fermion;
  // Fermions: state = sum_i z_i * wedge(modes[2i], modes[2i+1]).
  // Bosons:   state = sum_i z_i * modes[i] (x) modes[i].
  // z_i are real >= 0 by phase convention, sorted descending; sum |z_i|^2 = 1.
  std::vector<cplx> coefficients;
  std::vector<SingleKet> modes; // orthonormal; 2*rank (fermion) or rank (boson)
  int rank = 0;
};

struct ChshSettings {
  // Unit measurement axes; x-axis defaults keep the struct value-initialized.
  Eigen::Vector3d u1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d u2 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d v1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d v2 = Eigen::Vector3d::UnitX();
};

struct ChshReport {
  double value = 0.0;
  ChshSettings settings{};
  bool violated = false; // value > 2 + tolerance
};

// C with state = sum_ij C(i, j) |i> (x) |j>; antisymmetric for fermion
// sector states, symmetric for boson sector states.
Mat coefficient_matrix(const JointKet& state);

// Paired canonical form of a 2-fermion state via the spectral decomposition
// of C^dagger C, with re-pairing inside degenerate clusters. Pairs with
// |z| <= rank_tol * max|z| are dropped from the report.
SlaterDecomposition slater_decompose_fermion(const JointKet& state,
                                             double rank_tol = defaults::tol_rank);

// Takagi form of a 2-boson state via the real symmetric embedding
// [[Re C, Im C], [Im C, -Re C]]; coefficients are the Takagi values.
SlaterDecomposition takagi_decompose_boson(const JointKet& state,
                                           double rank_tol = defaults::tol_rank);

// Rebuilds the joint state from a decomposition.
JointKet reconstruct_state(const SlaterDecomposition& dec, int d);

// Fermions: entangled iff rank > 1. Bosons: not entangled iff rank 1
// (doubly occupied product) or rank 2 with both coefficients 1/sqrt(2)
// (symmetrization of two orthogonal factors); anything else is entangled.
bool gmw_entangled(const JointKet& state, double tol = defaults::tol_rank);

// Rank-1 criteria E whose two-sided block E(x)1 + 1(x)E - E(x)E carries the
// whole state; representatives from the canonical decomposition (for rank-1
// fermion states a continuum exists). Empty iff entangled.
std::vector<individuation::Criterion>
complete_property_projectors(const JointKet& state, double tol = 1e-8);

// The individuation block built from the canonical pairing: criterion 1
// collects the odd modes, criterion 2 the even modes; leftover kernel
// directions are distributed alternately. Captures every 2-fermion state.
individuation::BlockSpec canonical_block(const JointKet& state,
                                         double rank_tol = defaults::tol_rank);

// All 2^(rank-1) mode pairings that capture the state (the swap freedom in
// every pair beyond the first); element 0 is canonical_block.
std::vector<individuation::BlockSpec>
enumerate_block_choices(const JointKet& state,
                        double rank_tol = defaults::tol_rank);

// S(rho_bar) - 1 in bits. Bosons outside every individuation block (Takagi
// values do not pair up) get an unsupported-state error.
double gmw_measure(const JointKet& state, double tol = 1e-8);

// Pseudo-spin sigma(axis) of the system individuated by block criterion
// `which`: the criterion's ordered 2-dimensional span acts as the spin basis.
JointOperator individuated_spin_operator(const Eigen::Vector3d& axis,
                                         int which,
                                         const individuation::BlockSpec& block);

// T(i, j) = <sigma_i(first) sigma_j(second)> over the x, y, z axes.
Eigen::Matrix3d correlation_matrix(const JointKet& state,
                                   const individuation::BlockSpec& block);

// |E(u1,v1) + E(u1,v2) + E(u2,v1) - E(u2,v2)| with E the individuated
// spin-correlation expectation values.
ChshReport chsh_value(const JointKet& state, const ChshSettings& settings,
                      const individuation::BlockSpec& block,
                      double tol = 1e-9);

// Alternating closed-form ascent on the correlation matrix with seeded
// multi-start; deterministic for a fixed seed.
ChshReport chsh_optimize(const JointKet& state,
                         const individuation::BlockSpec& block,
                         int restarts = 16, std::uint64_t seed = 0);

} // namespace piqm::entanglement
