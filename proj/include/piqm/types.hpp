#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace piqm {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Single-system kets are plain dense vectors of length d.
using SingleKet = Vec;

enum class Statistics { boson, fermion };

// Joint vectors either live in a definite (anti)symmetric sector or carry no
// symmetry constraint ("full", used for intermediate products and tests).
enum class Sector { boson, fermion, full };

constexpr Sector to_sector(Statistics s) {
  return s == Statistics::boson ? Sector::boson : Sector::fermion;
}

constexpr const char* to_string(Statistics s) {
  return s == Statistics::boson ? "boson" : "fermion";
}

// Error categories; the numeric values double as CLI exit codes (see README).
enum class errc {
  parse = 2,        // schema violation, malformed document, bad normalization
  precondition = 3, // zero support, zero <n_alpha>, non-commuting operator, ...
  unsupported = 4,  // state outside the scope of an operation
  resource = 5,     // dimension cap exceeded
};

class error : public std::runtime_error {
public:
  error(errc code, std::string tag, const std::string& what)
      : std::runtime_error(what), code_(code), tag_(std::move(tag)) {}
  errc code() const noexcept { return code_; }
  // Stable machine-readable name, e.g. "zero_support", "dimension_cap".
  const std::string& tag() const noexcept { return tag_; }

private:
  errc code_;
  std::string tag_;
};

namespace defaults {
inline constexpr double tol_proj = 1e-10;  // projector / unitarity checks
inline constexpr double tol_rank = 1e-8;   // relative rank threshold
inline constexpr double tol_entry = 1e-12; // entrywise comparisons
inline constexpr double n_alpha_cutoff = 1e-12;
inline constexpr std::int64_t dim_cap = std::int64_t(1) << 20;
} // namespace defaults

// d^n with overflow and cap checking.
std::int64_t checked_pow(int d, int n, std::int64_t cap = defaults::dim_cap);

// Permutation of tensor slots {0..n-1}; target[i] is where slot i is sent.
struct Permutation {
  std::vector<int> target;

  int size() const { return static_cast<int>(target.size()); }
  static Permutation identity(int n);
  static Permutation transposition(int n, int i, int j);
  // Accepts the 1-based convention pi(i) = mapping[i-1].
  static Permutation from_one_based(const std::vector<int>& mapping);

  Permutation inverse() const;
  // (*this) after other: result.target[i] = target[other.target[i]].
  Permutation compose_after(const Permutation& other) const;
  // +1 for even, -1 for odd permutations.
  int sign() const;
  void validate() const; // throws unless target is a bijection
};

struct JointKet {
  Vec amplitudes; // length d^n, lexicographic, leftmost factor most significant
  int d = 0;
  int n = 0;
  Sector sector = Sector::full;
};

struct JointOperator {
  Mat matrix; // d^n x d^n
  int d = 0;
  int n = 0;
};

struct DensityOp {
  Mat matrix; // Hermitian, PSD, unit trace where constructed as a state
};

// Hermiticity/positivity/trace validation; throws errc::precondition.
void validate_density(const DensityOp& rho, double tol = 1e-8);

DensityOp pure_density(const Vec& psi);

} // namespace piqm
