#include "ladderqed/ladder_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ladderqed/errors.hpp"

namespace ladderqed {

const char* to_string(Boundary b) noexcept {
  return b == Boundary::periodic ? "periodic" : "open";
}

const char* to_string(Leg leg) noexcept { return leg == Leg::A ? "A" : "B"; }

void LadderParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(t) || !finite(t_prime) || !finite(phi) || !finite(kappa))
    throw ParameterError("ladder parameters must be finite");
  if (N < 2) throw ParameterError("N must be >= 2, got " + std::to_string(N));
  if (!(t > 0.0)) throw ParameterError("t must be > 0");
  if (t_prime < 0.0) throw ParameterError("t_prime must be >= 0");
  if (kappa < 0.0) throw ParameterError("kappa must be >= 0");
  if (!(phi > -std::numbers::pi && phi <= std::numbers::pi))
    throw ParameterError("phi must lie in (-pi, pi]");
}

std::size_t site_index(Site site, int N) {
  if (N < 1 || site.x < 0 || site.x >= N)
    throw IndexError("site x=" + std::to_string(site.x) + " out of range for N=" +
                     std::to_string(N));
  const auto x = static_cast<std::size_t>(site.x);
  return site.leg == Leg::A ? x : static_cast<std::size_t>(N) + x;
}

Site site_at(std::size_t index, int N) {
  const auto n = static_cast<std::size_t>(N);
  if (N < 1 || index >= 2 * n)
    throw IndexError("flat index " + std::to_string(index) + " out of range for N=" +
                     std::to_string(N));
  if (index < n) return {static_cast<int>(index), Leg::A};
  return {static_cast<int>(index - n), Leg::B};
}

std::vector<MatrixEntry> canonicalize(std::vector<MatrixEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<MatrixEntry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.empty() && out.back().row == e.row && out.back().col == e.col)
      out.back().value += e.value;
    else
      out.push_back(e);
  }
  return out;
}

LatticeHamiltonian::LatticeHamiltonian(std::size_t dimension,
                                       std::vector<MatrixEntry> hermitian,
                                       std::vector<MatrixEntry> loss)
    : dimension_(dimension),
      hermitian_(canonicalize(std::move(hermitian))),
      loss_(canonicalize(std::move(loss))) {
  for (const auto* part : {&hermitian_, &loss_})
    for (const auto& e : *part)
      if (e.row >= dimension_ || e.col >= dimension_)
        throw IndexError("matrix entry outside dimension " + std::to_string(dimension_));
}

namespace {

Complex lookup(const std::vector<MatrixEntry>& entries, std::size_t row, std::size_t col) {
  auto it = std::lower_bound(entries.begin(), entries.end(), std::pair{row, col},
                             [](const MatrixEntry& e, const std::pair<std::size_t, std::size_t>& key) {
                               return e.row != key.first ? e.row < key.first : e.col < key.second;
                             });
  if (it != entries.end() && it->row == row && it->col == col) return it->value;
  return {};
}

}  // namespace

Complex LatticeHamiltonian::entry(std::size_t row, std::size_t col) const {
  return hermitian_entry(row, col) + loss_entry(row, col);
}

Complex LatticeHamiltonian::hermitian_entry(std::size_t row, std::size_t col) const {
  return lookup(hermitian_, row, col);
}

Complex LatticeHamiltonian::loss_entry(std::size_t row, std::size_t col) const {
  return lookup(loss_, row, col);
}

double LatticeHamiltonian::hermiticity_defect() const {
  double worst = 0.0;
  for (const auto& e : hermitian_)
    worst = std::max(worst, std::abs(e.value - std::conj(hermitian_entry(e.col, e.row))));
  return worst;
}

double LatticeHamiltonian::infinity_norm() const {
  std::vector<double> rows(dimension_, 0.0);
  for (const auto& e : hermitian_) rows[e.row] += std::abs(e.value);
  for (const auto& e : loss_) rows[e.row] += std::abs(e.value);
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

Eigen::MatrixXcd LatticeHamiltonian::to_dense(bool include_loss) const {
  const auto n = static_cast<Eigen::Index>(dimension_);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& e : hermitian_)
    m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value;
  if (include_loss)
    for (const auto& e : loss_)
      m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value;
  return m;
}

SparseMatrix LatticeHamiltonian::to_sparse(bool include_loss) const {
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(hermitian_.size() + loss_.size());
  for (const auto& e : hermitian_)
    triplets.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  if (include_loss)
    for (const auto& e : loss_)
      triplets.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  const auto n = static_cast<Eigen::Index>(dimension_);
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

LatticeHamiltonian build_lattice(const LadderParams& params) {
  params.validate();
  const int N = params.N;
  const Complex hop_a = -params.t * std::polar(1.0, params.phi);
  const Complex hop_b = -params.t * std::polar(1.0, -params.phi);

  std::vector<MatrixEntry> hermitian;
  hermitian.reserve(static_cast<std::size_t>(6 * N));
  auto add_pair = [&](std::size_t to, std::size_t from, Complex v) {
    hermitian.push_back({to, from, v});
    hermitian.push_back({from, to, std::conj(v)});
  };

  for (int x = 0; x < N; ++x) {
    const std::size_t a = site_index({x, Leg::A}, N);
    const std::size_t b = site_index({x, Leg::B}, N);
    if (params.t_prime != 0.0) add_pair(a, b, Complex{-params.t_prime, 0.0});
  }
  const int bonds = params.boundary == Boundary::periodic ? N : N - 1;
  for (int x = 0; x < bonds; ++x) {
    const int next = (x + 1) % N;
    // -t e^{+i phi} a_{x+1}^dag a_x, -t e^{-i phi} b_{x+1}^dag b_x
    add_pair(site_index({next, Leg::A}, N), site_index({x, Leg::A}, N), hop_a);
    add_pair(site_index({next, Leg::B}, N), site_index({x, Leg::B}, N), hop_b);
  }

  std::vector<MatrixEntry> loss;
  if (params.kappa > 0.0) {
    loss.reserve(static_cast<std::size_t>(2 * N));
    const Complex damping{0.0, -0.5 * params.kappa};
    for (std::size_t i = 0; i < static_cast<std::size_t>(2 * N); ++i)
      loss.push_back({i, i, damping});
  }
  return LatticeHamiltonian(static_cast<std::size_t>(2 * N), std::move(hermitian),
                            std::move(loss));
}

Eigen::Matrix2cd bloch_hamiltonian(const LadderParams& params, double k) {
  params.validate();
  const double g = std::cos(params.phi) * std::cos(k);
  const double f = std::sin(params.phi) * std::sin(k);
  const double eta = params.eta();
  Eigen::Matrix2cd h;
  h << g + f, eta, eta, g - f;
  return -2.0 * params.t * h;
}

}  // namespace ladderqed
