#pragma once

// Real-space and Bloch-space Hamiltonians of the two-leg Hofstadter ladder
// in the single-excitation sector. Energies are measured from the bare
// site frequency (rotating frame), hbar = 1 and the lattice constant is 1.

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace ladderqed {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

enum class Boundary { periodic, open };
enum class Leg { A, B };

const char* to_string(Boundary b) noexcept;
const char* to_string(Leg leg) noexcept;

/// Waveguide constants. The defaults are the operating point used
/// throughout: t = 2, t' = 1, phi = pi/3.
struct LadderParams {
  double t = 2.0;        ///< hopping along each leg
  double t_prime = 1.0;  ///< rung hopping
  double phi = std::numbers::pi / 3.0;  ///< Peierls phase per hop; flux 2*phi
  int N = 1000;          ///< number of rungs
  Boundary boundary = Boundary::open;
  double kappa = 0.0;    ///< per-site photon loss rate

  /// t' / (2t).
  double eta() const noexcept { return t_prime / (2.0 * t); }
  double flux() const noexcept { return 2.0 * phi; }

  /// Throws ParameterError when any invariant is broken.
  void validate() const;
};

struct Site {
  int x = 0;
  Leg leg = Leg::A;

  friend bool operator==(const Site&, const Site&) = default;
};

/// Leg-major layout: A sites occupy [0, N), B sites occupy [N, 2N).
std::size_t site_index(Site site, int N);
Site site_at(std::size_t index, int N);

struct MatrixEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  Complex value;
};

/// Coordinate-list Hamiltonian with the Hermitian hopping part and the
/// anti-Hermitian loss part stored separately. Entries are kept sorted by
/// (row, col) and unique, so identical inputs give bit-identical matrices.
class LatticeHamiltonian {
 public:
  LatticeHamiltonian() = default;
  LatticeHamiltonian(std::size_t dimension, std::vector<MatrixEntry> hermitian,
                     std::vector<MatrixEntry> loss);

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<MatrixEntry>& hermitian_part() const noexcept { return hermitian_; }
  const std::vector<MatrixEntry>& loss_part() const noexcept { return loss_; }

  /// Sum of both parts at (row, col); zero when no entry is stored.
  Complex entry(std::size_t row, std::size_t col) const;
  Complex hermitian_entry(std::size_t row, std::size_t col) const;
  Complex loss_entry(std::size_t row, std::size_t col) const;

  /// max |H0 - H0^dagger| over the stored Hermitian part (loss excluded).
  double hermiticity_defect() const;
  /// Max absolute row sum of the full matrix.
  double infinity_norm() const;

  Eigen::MatrixXcd to_dense(bool include_loss = true) const;
  SparseMatrix to_sparse(bool include_loss = true) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<MatrixEntry> hermitian_;
  std::vector<MatrixEntry> loss_;
};

/// Merges duplicate (row, col) entries and sorts. Exposed for assembly code.
std::vector<MatrixEntry> canonicalize(std::vector<MatrixEntry> entries);

LatticeHamiltonian build_lattice(const LadderParams& params);

/// -2t [g(k) I + f(k) sigma_z + eta sigma_x] with g = cos(phi) cos(k),
/// f = sin(phi) sin(k). Basis order (a_k, b_k).
Eigen::Matrix2cd bloch_hamiltonian(const LadderParams& params, double k);

}  // namespace ladderqed
