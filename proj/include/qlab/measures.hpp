#pragma once

// Entropic quantities, one-way quantum discord, entanglement of formation
// and the correlation-matrix rank witness.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qlab/linalg.hpp"
#include "qlab/optimize.hpp"
#include "qlab/states.hpp"

namespace qlab {

/// -x log2 x with 0 log 0 = 0.
inline double neg_xlog2x(double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; }

/// Shannon entropy (bits) of a spectrum. Values in [-1e-10, 0) count as 0.
inline double spectrum_entropy(std::span<const double> spectrum) {
  double s = 0.0;
  for (double v : spectrum) {
    if (v < -tol::psd_clip) {
      std::ostringstream os;
      os << "entropy: eigenvalue " << v << " below clip tolerance";
      throw InvariantViolation(os.str());
    }
    s += neg_xlog2x(v);
  }
  return s;
}

inline double entropy_of(const ComplexMatrix& m) {
  const auto vals = eigenvalues_hermitian(m);
  return spectrum_entropy(vals);
}

inline double von_neumann_entropy(const DensityMatrix& rho) { return entropy_of(rho.matrix()); }

inline double mutual_information(const DensityMatrix& rho) {
  if (!rho.is_bipartite()) throw std::invalid_argument("mutual_information: state not bipartite");
  return entropy_of(rho.reduced_a()) + entropy_of(rho.reduced_b()) - entropy_of(rho.matrix());
}

/// tr(rho O)
inline Complex expectation(const ComplexMatrix& rho, const ComplexMatrix& observable) {
  return (rho * observable).trace();
}

// ---------------------------------------------------------------------------
// Discord

/// Rank-1 projective qubit measurement along the Bloch direction (theta, phi).
struct MeasurementBasis {
  double theta = 0.0;
  double phi = 0.0;

  std::array<double, 3> direction() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  }

  /// Pi_{+/-} = (1 +/- n.sigma)/2
  std::array<ComplexMatrix, 2> projectors() const {
    const auto n = direction();
    const ComplexMatrix ns = pauli::x() * n[0] + pauli::y() * n[1] + pauli::z() * n[2];
    return {(pauli::identity() + ns) * 0.5, (pauli::identity() - ns) * 0.5};
  }

  /// Same measurement with theta in [0, pi] and phi in [0, 2 pi).
  MeasurementBasis canonical() const {
    const auto n = direction();
    MeasurementBasis b;
    b.theta = std::acos(std::clamp(n[2], -1.0, 1.0));
    b.phi = std::atan2(n[1], n[0]);
    if (b.phi < 0) b.phi += 2.0 * std::numbers::pi;
    if (b.phi >= 2.0 * std::numbers::pi) b.phi = 0.0;
    return b;
  }
};

enum class MeasuredSide { a, b };

struct DiscordSettings {
  std::size_t grid = 64;
  double simplex_tolerance = 1e-8;
  std::size_t max_evaluations = 500;
  MeasuredSide side = MeasuredSide::a;
};

struct DiscordResult {
  double discord = 0.0;
  double mutual_information = 0.0;
  double classical_correlations = 0.0;
  MeasurementBasis optimal_basis;
};

/// Average post-measurement entropy of B, sum_i p_i S(rho_B|i), for
/// projective measurements on a qubit A.
class ConditionalEntropy {
 public:
  explicit ConditionalEntropy(const ComplexMatrix& rho, std::size_t dim_b) : db_(dim_b) {
    if (rho.rows() != 2 * dim_b) {
      throw std::invalid_argument("ConditionalEntropy: measured side must be a qubit");
    }
    // Blocks R_ab = <a|rho|b> on B; tr_A[(sigma_k x 1) rho] for k = 0, x, y, z.
    auto block = [&](std::size_t a, std::size_t b) {
      ComplexMatrix r(db_, db_);
      for (std::size_t i = 0; i < db_; ++i)
        for (std::size_t j = 0; j < db_; ++j) r(i, j) = rho(a * db_ + i, b * db_ + j);
      return r;
    };
    const auto r00 = block(0, 0);
    const auto r01 = block(0, 1);
    const auto r10 = block(1, 0);
    const auto r11 = block(1, 1);
    const Complex i_unit(0.0, 1.0);
    m_[0] = r00 + r11;
    m_[1] = r01 + r10;
    m_[2] = (r01 - r10) * i_unit;
    m_[3] = r00 - r11;
    if (db_ == 2) {
      for (std::size_t k = 0; k < 4; ++k)
        q_[k] = {m_[k](0, 0).real(), m_[k](1, 1).real(), m_[k](0, 1).real(), m_[k](0, 1).imag()};
    }
  }

  double operator()(double theta, double phi) const {
    return along(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                 std::cos(theta));
  }

  /// Same quantity for the unit Bloch direction (nx, ny, nz).
  double along(double nx, double ny, double nz) const {
    if (db_ == 2) return qubit_case(nx, ny, nz);
    double total = 0.0;
    for (double sign : {1.0, -1.0}) {
      ComplexMatrix c(db_, db_);
      for (std::size_t k = 0; k < db_ * db_; ++k) {
        c.entries()[k] = 0.5 * (m_[0].entries()[k] +
                                sign * (nx * m_[1].entries()[k] + ny * m_[2].entries()[k] +
                                        nz * m_[3].entries()[k]));
      }
      for (std::size_t i = 0; i < db_; ++i) {
        c(i, i) = c(i, i).real();
        for (std::size_t j = i + 1; j < db_; ++j) c(j, i) = std::conj(c(i, j));
      }
      const auto vals = eigenvalues_hermitian(c);
      double p = 0.0;
      for (double v : vals) {
        total += neg_xlog2x(v);
        p += v;
      }
      total -= neg_xlog2x(p);
    }
    return total;
  }

 private:
  // For a qubit B each unnormalized conditional state is
  // [[a, b], [b*, d]] = (M0 +/- n.M)/2; with weight w = a + d and Bloch
  // radius x = sqrt((a - d)^2 + 4|b|^2)/w its contribution is w h((1 + x)/2).
  double qubit_case(double nx, double ny, double nz) const {
    const double a1 = nx * q_[1].a + ny * q_[2].a + nz * q_[3].a;
    const double d1 = nx * q_[1].d + ny * q_[2].d + nz * q_[3].d;
    const double br1 = nx * q_[1].br + ny * q_[2].br + nz * q_[3].br;
    const double bi1 = nx * q_[1].bi + ny * q_[2].bi + nz * q_[3].bi;
    double total = 0.0;
    for (double sign : {1.0, -1.0}) {
      const double a = 0.5 * (q_[0].a + sign * a1);
      const double d = 0.5 * (q_[0].d + sign * d1);
      const double br = 0.5 * (q_[0].br + sign * br1);
      const double bi = 0.5 * (q_[0].bi + sign * bi1);
      const double w = a + d;
      if (w <= 0.0) continue;
      const double x = std::min(1.0, std::sqrt((a - d) * (a - d) + 4.0 * (br * br + bi * bi)) / w);
      total += w * (neg_xlog2x(0.5 * (1.0 + x)) + neg_xlog2x(0.5 * (1.0 - x)));
    }
    return total;
  }

  struct QubitBlock {
    double a, d, br, bi;
  };

  std::size_t db_;
  std::array<ComplexMatrix, 4> m_;
  std::array<QubitBlock, 4> q_{};
};

/// One-way discord with projective measurements on A (or B by request):
/// I(rho) - max_Pi I(Pi[rho]). Exhaustive (theta, phi) grid followed by a
/// simplex refinement from the best grid point.
inline DiscordResult discord(const DensityMatrix& input, const DiscordSettings& settings = {}) {
  if (settings.grid < 16) throw std::invalid_argument("discord: grid must be at least 16");
  const DensityMatrix rho =
      settings.side == MeasuredSide::b ? swap_subsystems(input) : input.as_bipartite();
  if (rho.dim_a() != 2) {
    throw std::invalid_argument("discord: measured subsystem must be a qubit");
  }
  const std::size_t db = rho.dim_b();
  const double s_a = entropy_of(rho.reduced_a());
  const double s_b = entropy_of(rho.reduced_b());
  const double s_ab = entropy_of(rho.matrix());
  const ConditionalEntropy cond(rho.matrix(), db);

  // Antipodal directions give the same measurement, so phi in [0, pi) covers
  // the whole sphere.
  const std::size_t g = settings.grid;
  std::vector<double> cos_phi(g), sin_phi(g);
  for (std::size_t j = 0; j < g; ++j) {
    const double phi = std::numbers::pi * static_cast<double>(j) / static_cast<double>(g);
    cos_phi[j] = std::cos(phi);
    sin_phi[j] = std::sin(phi);
  }
  double best = std::numeric_limits<double>::infinity();
  MeasurementBasis best_basis;
  for (std::size_t i = 0; i < g; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(g - 1);
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    const std::size_t nphi = (i == 0 || i + 1 == g) ? 1 : g;
    for (std::size_t j = 0; j < nphi; ++j) {
      const double v = cond.along(st * cos_phi[j], st * sin_phi[j], ct);
      if (v < best) {
        best = v;
        best_basis = {theta, std::numbers::pi * static_cast<double>(j) / static_cast<double>(g)};
      }
    }
  }

  NelderMeadOptions nm;
  nm.initial_step = std::numbers::pi / static_cast<double>(g);
  nm.diameter_tolerance = settings.simplex_tolerance;
  nm.max_evaluations = settings.max_evaluations;
  const auto refined = nelder_mead([&](const RealVector& x) { return cond(x[0], x[1]); },
                                   RealVector{best_basis.theta, best_basis.phi}, nm);
  if (refined.value < best) {
    best = refined.value;
    best_basis = {refined.x[0], refined.x[1]};
  }

  DiscordResult r;
  r.mutual_information = s_a + s_b - s_ab;
  r.classical_correlations = s_b - best;
  r.discord = s_a - s_ab + best;
  if (r.discord < 0.0) {
    if (r.discord < -1e-9) {
      std::ostringstream os;
      os << "discord: negative value " << r.discord;
      throw InvariantViolation(os.str());
    }
    r.discord = 0.0;
    r.classical_correlations = r.mutual_information;
  }
  r.optimal_basis = best_basis.canonical();
  return r;
}

/// Zero discord on both sides; only two-qubit states are supported.
inline bool is_classically_correlated(const DensityMatrix& rho, double tolerance = 1e-6) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2) {
    throw std::invalid_argument("is_classically_correlated: two-qubit state required");
  }
  DiscordSettings s;
  if (discord(rho, s).discord > tolerance) return false;
  s.side = MeasuredSide::b;
  return discord(rho, s).discord <= tolerance;
}

// ---------------------------------------------------------------------------
// Entanglement of formation (Wootters)

inline double binary_entropy(double p) { return neg_xlog2x(p) + neg_xlog2x(1.0 - p); }

inline double concurrence(const DensityMatrix& rho) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2) {
    throw std::invalid_argument("concurrence: two-qubit state required");
  }
  const auto& m = rho.matrix();
  const ComplexMatrix yy = kron(pauli::y(), pauli::y());
  const ComplexMatrix tilde = yy * m.conjugate() * yy;
  // sqrt(rho) tilde sqrt(rho) is Hermitian and isospectral with rho tilde.
  const auto es = eig_hermitian(m);
  ComplexMatrix root(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < 4; ++k)
        s += es.vectors(i, k) * std::sqrt(std::max(0.0, es.values[k])) * std::conj(es.vectors(j, k));
      root(i, j) = s;
    }
  ComplexMatrix r = root * tilde * root;
  for (std::size_t i = 0; i < 4; ++i) {
    r(i, i) = r(i, i).real();
    for (std::size_t j = i + 1; j < 4; ++j) {
      const Complex avg = 0.5 * (r(i, j) + std::conj(r(j, i)));
      r(i, j) = avg;
      r(j, i) = std::conj(avg);
    }
  }
  auto lambda = eigenvalues_hermitian(r);
  for (auto& v : lambda) v = std::sqrt(std::max(0.0, v));
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

inline double entanglement_of_formation(const DensityMatrix& rho) {
  const double c = std::min(1.0, concurrence(rho));
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

// ---------------------------------------------------------------------------
// Correlation-matrix rank

/// Orthonormal Hermitian basis of d x d operators: 1/sqrt(d) followed by the
/// generalized Gell-Mann matrices scaled to unit Hilbert-Schmidt norm.
inline std::vector<ComplexMatrix> hermitian_operator_basis(std::size_t d) {
  std::vector<ComplexMatrix> basis;
  basis.push_back(ComplexMatrix::identity(d) * (1.0 / std::sqrt(static_cast<double>(d))));
  const double r = 1.0 / std::numbers::sqrt2;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexMatrix s(d, d);
      s(j, k) = r;
      s(k, j) = r;
      basis.push_back(s);
      ComplexMatrix a(d, d);
      a(j, k) = Complex(0, -r);
      a(k, j) = Complex(0, r);
      basis.push_back(a);
    }
  for (std::size_t l = 1; l < d; ++l) {
    ComplexMatrix z(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (std::size_t j = 0; j < l; ++j) z(j, j) = norm;
    z(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(z);
  }
  return basis;
}

struct CorrelationRank {
  std::size_t rank = 0;
  bool witnessed = false;
  RealVector singular_values;
};

/// Expands rho = sum r_ij A_i (x) B_j and counts the singular values of (r_ij)
/// above 1e-10 relative to the largest. The witness fires when the count
/// exceeds min(d_A, d_B).
inline CorrelationRank correlation_rank(const DensityMatrix& rho) {
  if (!rho.is_bipartite()) throw std::invalid_argument("correlation_rank: state not bipartite");
  const std::size_t da = rho.dim_a();
  const std::size_t db = rho.dim_b();
  const auto basis_a = hermitian_operator_basis(da);
  const auto basis_b = hermitian_operator_basis(db);
  ComplexMatrix coeff(da * da, db * db);
  for (std::size_t i = 0; i < basis_a.size(); ++i)
    for (std::size_t j = 0; j < basis_b.size(); ++j)
      coeff(i, j) = expectation(rho.matrix(), kron(basis_a[i], basis_b[j])).real();

  CorrelationRank out;
  // The Gram matrix side is db^2 <= 16 for the supported shapes.
  const ComplexMatrix& small = da <= db ? coeff.adjoint() : coeff;
  out.singular_values = singular_values(small);
  const double top = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  for (double s : out.singular_values)
    if (s > tol::correlation_rank * top) ++out.rank;
  out.witnessed = out.rank > std::min(da, db);
  return out;
}

}  // namespace qlab
