#pragma once

// Kraus channels, local application to bipartite states, amplitude damping
// and the Stinespring dilation from unitary generators.

#include <cmath>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qlab/linalg.hpp"
#include "qlab/states.hpp"

namespace qlab {

/// CPTP map given by Kraus operators satisfying sum_i E_i^dagger E_i = 1.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw std::invalid_argument("KrausChannel: no Kraus operators");
    const std::size_t n = ops_.front().rows();
    ComplexMatrix sum(n, n);
    for (const auto& e : ops_) {
      if (e.rows() != n || e.cols() != n) {
        throw std::invalid_argument("KrausChannel: operators must share one square shape");
      }
      sum += e.adjoint() * e;
    }
    const double err = max_abs_diff(sum, ComplexMatrix::identity(n));
    if (err > tol::completeness) {
      std::ostringstream os;
      os << "KrausChannel: completeness violated by " << err;
      throw std::invalid_argument(os.str());
    }
  }

  static KrausChannel identity(std::size_t n) { return KrausChannel({ComplexMatrix::identity(n)}); }

  const std::vector<ComplexMatrix>& kraus_ops() const { return ops_; }
  std::size_t rank() const { return ops_.size(); }
  std::size_t dim() const { return ops_.front().rows(); }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    ComplexMatrix out(rho.rows(), rho.cols());
    for (const auto& e : ops_) out += conjugate_by(e, rho);
    return out;
  }

 private:
  std::vector<ComplexMatrix> ops_;
};

struct LocalChannelPair {
  KrausChannel channel_a;
  KrausChannel channel_b;
};

namespace detail {
inline ComplexMatrix apply_kron_side(const KrausChannel& ch, const ComplexMatrix& rho,
                                     std::size_t da, std::size_t db, bool on_a) {
  ComplexMatrix out(rho.rows(), rho.cols());
  const auto id = ComplexMatrix::identity(on_a ? db : da);
  for (const auto& e : ch.kraus_ops()) {
    const ComplexMatrix k = on_a ? kron(e, id) : kron(id, e);
    out += conjugate_by(k, rho);
  }
  return out;
}

inline ComplexMatrix symmetrized(ComplexMatrix m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    m(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = avg;
      m(j, i) = std::conj(avg);
    }
  }
  return m;
}
}  // namespace detail

/// rho -> sum_ij (A_i (x) B_j) rho (A_i (x) B_j)^dagger
inline DensityMatrix apply_local(const LocalChannelPair& pair, const DensityMatrix& rho) {
  const std::size_t da = rho.dim_a();
  const std::size_t db = rho.dim_b();
  if (pair.channel_a.dim() != da || pair.channel_b.dim() != db) {
    throw std::invalid_argument("apply_local: channel dimensions do not match subsystems");
  }
  ComplexMatrix m = rho.matrix();
  if (!(pair.channel_a.rank() == 1 && max_abs_diff(pair.channel_a.kraus_ops()[0],
                                                   ComplexMatrix::identity(da)) == 0.0))
    m = detail::apply_kron_side(pair.channel_a, m, da, db, true);
  if (!(pair.channel_b.rank() == 1 && max_abs_diff(pair.channel_b.kraus_ops()[0],
                                                   ComplexMatrix::identity(db)) == 0.0))
    m = detail::apply_kron_side(pair.channel_b, m, da, db, false);
  std::vector<std::size_t> dims(rho.dims().begin(), rho.dims().end());
  return DensityMatrix::trusted(detail::symmetrized(std::move(m)), std::move(dims),
                                rho.a_factors());
}

inline DensityMatrix apply_on_a(const KrausChannel& ch, const DensityMatrix& rho) {
  return apply_local({ch, KrausChannel::identity(rho.dim_b())}, rho);
}

inline DensityMatrix apply_on_b(const KrausChannel& ch, const DensityMatrix& rho) {
  return apply_local({KrausChannel::identity(rho.dim_a()), ch}, rho);
}

/// E0 = |0><0| + sqrt(1-p)|1><1|, E1 = sqrt(p)|0><1|
inline KrausChannel amplitude_damping(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("amplitude_damping: p must lie in [0, 1]");
  }
  ComplexMatrix e0{{1.0, 0.0}, {0.0, std::sqrt(1.0 - p)}};
  ComplexMatrix e1{{0.0, std::sqrt(p)}, {0.0, 0.0}};
  return KrausChannel({std::move(e0), std::move(e1)});
}

/// Damping probability after time t at relaxation rate gamma.
inline double damping_probability(double gamma_t) { return 1.0 - std::exp(-gamma_t); }

/// Replaces every input with 1/n.
inline KrausChannel full_depolarizing(std::size_t n) {
  std::vector<ComplexMatrix> ops;
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ComplexMatrix e(n, n);
      e(i, j) = s;
      ops.push_back(std::move(e));
    }
  return KrausChannel(std::move(ops));
}

/// Channel realized by preparing a d-dimensional ancilla in |0>, applying the
/// joint unitary U on ancilla (x) system and discarding the ancilla:
/// E_k[i, j] = <k, i| U |0, j>. Operators of negligible norm are dropped.
inline KrausChannel dilate_unitary(const ComplexMatrix& u, std::size_t ancilla_dim) {
  if (!u.is_square() || ancilla_dim == 0 || u.rows() % ancilla_dim != 0) {
    throw std::invalid_argument("dilate: unitary side must be a multiple of the ancilla dim");
  }
  const std::size_t n = u.rows() / ancilla_dim;
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < ancilla_dim; ++k) {
    ComplexMatrix e(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e(i, j) = u(k * n + i, j);
    if (e.frobenius_norm() >= tol::kraus_prune) ops.push_back(std::move(e));
  }
  return KrausChannel(std::move(ops));
}

inline KrausChannel dilate(std::span<const double> generator, std::size_t ancilla_dim) {
  return dilate_unitary(unitary_from_generator(generator), ancilla_dim);
}

inline KrausChannel unitary_channel(ComplexMatrix u) { return KrausChannel({std::move(u)}); }

inline LocalChannelPair local_unitary_pair(std::span<const double> params_a,
                                           std::span<const double> params_b) {
  return {unitary_channel(unitary_from_generator(params_a)),
          unitary_channel(unitary_from_generator(params_b))};
}

/// Gaussian generator entries with the given standard deviation.
inline RealVector random_generator(std::size_t n, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  RealVector h(n * n);
  for (auto& x : h) x = normal(rng);
  return h;
}

/// Channel of Kraus rank <= ancilla_dim from a random dilation.
inline KrausChannel random_channel(std::size_t n, std::size_t ancilla_dim, Rng& rng) {
  return dilate(random_generator(n * ancilla_dim, 1.5, rng), ancilla_dim);
}

inline ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
  return unitary_from_generator(random_generator(n, 1.5, rng));
}

}  // namespace qlab
