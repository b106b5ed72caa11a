#pragma once

// Truncated Fock space over C^d: a direct sum of (anti)symmetric N-particle
// sectors up to N_max, with ladder operators, mode/aggregate number
// operators, and individuated expectation values and reduced states that
// mesh with the fixed-N machinery sector by sector.

#include <vector>

#include "piqm/individuation.hpp"
#include "piqm/types.hpp"

namespace piqm::fock {

// sectors[N] holds the N-particle component as a full d^N ambient vector
// (the N = 0 sector is a single amplitude). Sectors carry their own weight;
// the total norm is 1 unless `truncated` flags dropped amplitude.
struct FockVector {
  std::vector<Vec> sectors;
  int d = 0;
  int n_max = 0;
  Statistics statistics = Statistics::boson;
  bool truncated = false;

  double norm() const;
};

// Particle-number-conserving operator: one ambient block per sector.
struct FockOperator {
  std::vector<Mat> blocks;
  int d = 0;
  int n_max = 0;

  FockVector apply(const FockVector& psi) const;
};

FockVector vacuum(int d, int n_max, Statistics stat);

// Places a fixed-N sector state into an otherwise empty Fock vector.
FockVector embed_sector(const JointKet& state, int n_max);

// Checks sector shapes, per-sector (anti)symmetry, and total norm (the norm
// check is waived when `truncated` is set).
void validate_fock(const FockVector& psi, double tol = 1e-8);

cplx inner(const FockVector& a, const FockVector& b);

// Orthonormal basis of the N-particle sector, as ambient d^N vectors.
std::vector<Vec> sector_basis(int d, int n, Statistics stat);

// a^dag(phi): prepend phi, (anti)symmetrize, scale by sqrt(N). Amplitude in
// the top sector cannot ascend: strict mode raises, lenient mode drops it
// and marks the result truncated.
FockVector create(const SingleKet& phi, const FockVector& psi,
                  bool strict = true);

// a(phi): contract conj(phi) with the leading tensor slot, scale by
// sqrt(N+1). Adjoint of create; never truncates.
FockVector annihilate(const SingleKet& phi, const FockVector& psi);

// Max norm deviation of [a(phi), a^dag(chi)] -+ <phi|chi> 1 and
// [a(phi), a(chi)] (commutators for bosons, anticommutators for fermions)
// over all sector basis states below the truncation boundary.
double check_ccr(const SingleKet& phi, const SingleKet& chi, Statistics stat,
                 int n_max);

// N-hat(phi) = a^dag(phi) a(phi), assembled sector by sector from the
// ladder maps themselves.
FockOperator mode_number(const SingleKet& phi, Statistics stat, int n_max);

// Aggregate number operator for a criterion: the direct sum of the fixed-N
// number operators. Basis-independent; equals the sum of N-hat over any
// orthonormal basis of the criterion's range.
FockOperator number_alpha_fock(const individuation::Criterion& criterion,
                               int n_max);

// <Q>_alpha = sum_ij <a^dag(phi_i) a(phi_j)> <phi_i|Q|phi_j> normalized by
// the aggregate occupancy sum_i <a^dag(phi_i) a(phi_i)>.
double fock_expectation_alpha(const FockVector& psi, const Mat& q,
                              const individuation::Criterion& criterion,
                              double cutoff = defaults::n_alpha_cutoff);

// rho_alpha with matrix elements <phi_i|rho_alpha|phi_j> =
// <a^dag(phi_j) a(phi_i)> / sum_k <a^dag(phi_k) a(phi_k)>; positive,
// unit trace, supported in the criterion's range, and satisfying
// tr(rho_alpha Q) = <Q>_alpha.
DensityOp fock_reduced_state_alpha(const FockVector& psi,
                                   const individuation::Criterion& criterion,
                                   double cutoff = defaults::n_alpha_cutoff);

} // namespace piqm::fock
