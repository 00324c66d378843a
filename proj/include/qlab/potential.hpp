#pragma once

// Potential quantumness: a correlation functional maximized over local
// operations of bounded Kraus rank, realized as local unitaries on
// ancilla-extended subsystems followed by discarding the ancillas.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qlab/channels.hpp"
#include "qlab/measures.hpp"
#include "qlab/optimize.hpp"
#include "qlab/states.hpp"

namespace qlab {

using Functional = std::function<double(const DensityMatrix&)>;

struct OptimizerConfig {
  std::size_t restarts = 24;
  std::uint64_t seed = 0;
  double simplex_tolerance = 1e-6;
  std::size_t max_evals = 2000;
  bool include_identity_start = true;
  // Standard deviation of random generator entries.
  double start_scale = std::numbers::pi / 2.0;
  double initial_step = 0.5;
  // Measurement grid used inside the search loop and for the final value.
  std::size_t search_grid = 16;
  std::size_t final_grid = 64;
  // Measurement-refinement tolerance inside the search loop; the final value
  // always uses the full discord defaults.
  double search_refine_tolerance = 1e-5;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
    if (!(simplex_tolerance > 0.0)) {
      throw std::invalid_argument("OptimizerConfig: tolerance must be positive");
    }
  }
};

struct PotentialResult {
  double value = 0.0;
  RealVector best_params;
  std::size_t evaluations = 0;
  std::size_t starts_converged = 0;
};

/// Ancilla dimension actually used for a requested rank; rank 0 means bare
/// local unitaries, which is the same as a one-dimensional ancilla.
inline std::size_t ancilla_for_rank(std::size_t d) {
  if (d == 0) return 1;
  if (d == 1 || d == 2 || d == 4 || d == 8) return d;
  throw std::invalid_argument("potential: unsupported ancilla dimension " + std::to_string(d));
}

/// Layout of the concatenated generator vector for both sides.
struct LocalDilationShape {
  std::size_t dim_a;
  std::size_t dim_b;
  std::size_t ancilla;

  std::size_t size_a() const { return (ancilla * dim_a) * (ancilla * dim_a); }
  std::size_t size_b() const { return (ancilla * dim_b) * (ancilla * dim_b); }
  std::size_t size() const { return size_a() + size_b(); }

  LocalChannelPair channels(std::span<const double> params) const {
    return {dilate(params.subspan(0, size_a()), ancilla),
            dilate(params.subspan(size_a(), size_b()), ancilla)};
  }
};

inline LocalDilationShape dilation_shape(const DensityMatrix& rho, std::size_t d) {
  if (!rho.is_bipartite()) throw std::invalid_argument("potential: state is not bipartite");
  const LocalDilationShape shape{rho.dim_a(), rho.dim_b(), ancilla_for_rank(d)};
  if (shape.ancilla * std::max(shape.dim_a, shape.dim_b) > kMaxSide) {
    throw std::invalid_argument("potential: dilated side exceeds 16");
  }
  return shape;
}

/// Output state of the local operation encoded by `params`.
inline DensityMatrix potential_output_state(const DensityMatrix& rho, std::size_t d,
                                            std::span<const double> params) {
  const auto shape = dilation_shape(rho, d);
  if (params.size() != shape.size()) {
    throw std::invalid_argument("potential_output_state: parameter length mismatch");
  }
  return apply_local(shape.channels(params), rho);
}

/// Lifts parameters found at ancilla dimension `from_d` to `to_d` so that the
/// encoded channels are unchanged (generator padded block-diagonally, which
/// leaves the extra ancilla levels untouched).
inline RealVector embed_parameters(std::span<const double> params, std::size_t dim_a,
                                   std::size_t dim_b, std::size_t from_d, std::size_t to_d) {
  const std::size_t fa = ancilla_for_rank(from_d);
  const std::size_t ta = ancilla_for_rank(to_d);
  if (ta < fa) throw std::invalid_argument("embed_parameters: cannot shrink the ancilla");
  auto lift = [&](std::span<const double> h, std::size_t n) {
    const ComplexMatrix gen = hermitian_from_params(h);
    ComplexMatrix big(ta * n, ta * n);
    for (std::size_t i = 0; i < gen.rows(); ++i)
      for (std::size_t j = 0; j < gen.cols(); ++j) big(i, j) = gen(i, j);
    return params_from_hermitian(big);
  };
  const std::size_t sa = (fa * dim_a) * (fa * dim_a);
  const std::size_t sb = (fa * dim_b) * (fa * dim_b);
  if (params.size() != sa + sb) throw std::invalid_argument("embed_parameters: length mismatch");
  RealVector out = lift(params.subspan(0, sa), dim_a);
  const RealVector b = lift(params.subspan(sa, sb), dim_b);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

namespace detail {

// Multi-start simplex maximization of `search` over a parameter vector of the
// given length. Each start's best point is re-scored with `final_score`, and
// the maximum of those is reported.
template <class Search, class Final>
PotentialResult multistart_maximize(std::size_t n_params, const OptimizerConfig& cfg,
                                    std::span<const RealVector> extra_starts, Search&& search,
                                    Final&& final_score) {
  cfg.validate();
  std::vector<RealVector> starts;
  if (cfg.include_identity_start) starts.emplace_back(n_params, 0.0);
  for (const auto& s : extra_starts) {
    if (s.size() != n_params) throw std::invalid_argument("potential: warm start length mismatch");
    starts.push_back(s);
  }
  const std::size_t fixed = starts.size();
  for (std::size_t k = 0; starts.size() < cfg.restarts; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(k)};
    Rng rng(seq);
    std::normal_distribution<double> normal(0.0, cfg.start_scale);
    RealVector x(n_params);
    for (auto& v : x) v = normal(rng);
    starts.push_back(std::move(x));
  }

  NelderMeadOptions nm;
  nm.initial_step = cfg.initial_step;
  nm.diameter_tolerance = cfg.simplex_tolerance;
  nm.max_evaluations = cfg.max_evals;

  PotentialResult best;
  best.value = -std::numeric_limits<double>::infinity();
  auto consider = [&](const RealVector& x) {
    const double v = final_score(x);
    ++best.evaluations;
    if (v > best.value) {
      best.value = v;
      best.best_params = x;
    }
  };
  for (std::size_t k = 0; k < starts.size(); ++k) {
    // Fixed starts are scored as given too, so the result never falls below
    // them even when the search metric and the final metric disagree.
    if (k < fixed) consider(starts[k]);
    const auto run = nelder_mead([&](const RealVector& x) { return -search(x); }, starts[k], nm);
    best.evaluations += run.evaluations;
    if (run.converged) ++best.starts_converged;
    consider(run.x);
  }
  return best;
}

}  // namespace detail

/// PQ^d(rho) for the functional q. `final_q` (defaults to q) scores the best
/// point of every start; `warm_starts` are extra initial parameter vectors.
inline PotentialResult potential_q(const DensityMatrix& rho, std::size_t d, const Functional& q,
                                   const OptimizerConfig& cfg = {},
                                   const Functional& final_q = nullptr,
                                   std::span<const RealVector> warm_starts = {}) {
  const auto shape = dilation_shape(rho, d);
  const Functional& fin = final_q ? final_q : q;
  auto score = [&](const Functional& f, const RealVector& x) {
    return f(apply_local(shape.channels(x), rho));
  };
  return detail::multistart_maximize(
      shape.size(), cfg, warm_starts, [&](const RealVector& x) { return score(q, x); },
      [&](const RealVector& x) { return score(fin, x); });
}

inline Functional discord_functional(std::size_t grid, double refine_tolerance = 1e-8) {
  return [grid, refine_tolerance](const DensityMatrix& s) {
    DiscordSettings ds;
    ds.grid = grid;
    ds.simplex_tolerance = refine_tolerance;
    return discord(s, ds).discord;
  };
}

/// Potential discord of rank d; checks discord <= PD <= I on the result.
inline PotentialResult potential_discord(const DensityMatrix& rho, std::size_t d,
                                         const OptimizerConfig& cfg = {},
                                         std::span<const RealVector> warm_starts = {}) {
  auto result = potential_q(rho, d, discord_functional(cfg.search_grid, cfg.search_refine_tolerance), cfg,
                            discord_functional(cfg.final_grid), warm_starts);
  const double slack = 1e-6;
  const double mi = mutual_information(rho);
  if (result.value > mi + slack) {
    std::ostringstream os;
    os << "potential_discord: value " << result.value << " exceeds mutual information " << mi;
    throw InvariantViolation(os.str());
  }
  if (cfg.include_identity_start) {
    DiscordSettings ds;
    ds.grid = cfg.final_grid;
    const double qd = discord(rho, ds).discord;
    if (result.value < qd - slack) {
      std::ostringstream os;
      os << "potential_discord: value " << result.value << " below discord " << qd;
      throw InvariantViolation(os.str());
    }
  }
  return result;
}

/// Unrestricted potential discord: rank d_max^2, warm-started from the rank
/// d_max optimum so the result never falls below it.
inline PotentialResult max_potential_discord(const DensityMatrix& rho,
                                             const OptimizerConfig& cfg = {}) {
  const std::size_t dmax = std::max(rho.dim_a(), rho.dim_b());
  const auto low = potential_discord(rho, dmax, cfg);
  const RealVector lifted =
      embed_parameters(low.best_params, rho.dim_a(), rho.dim_b(), dmax, dmax * dmax);
  auto high = potential_discord(rho, dmax * dmax, cfg, std::span<const RealVector>(&lifted, 1));
  high.evaluations += low.evaluations;
  return high;
}

// ---------------------------------------------------------------------------

struct SweepPoint {
  double parameter;
  double value;
};

struct RestrictedSweep {
  std::vector<SweepPoint> points;
  double argmax = 0.0;
  double max = -std::numeric_limits<double>::infinity();
};

/// Applies a one-parameter channel family on one side and scores every
/// output. The first maximal point wins ties.
inline RestrictedSweep potential_discord_restricted(
    const DensityMatrix& rho, const std::function<KrausChannel(double)>& family,
    std::span<const double> sweep, const Functional& score = discord_functional(64),
    MeasuredSide side = MeasuredSide::a) {
  RestrictedSweep out;
  for (double p : sweep) {
    const auto ch = family(p);
    const auto state = side == MeasuredSide::a ? apply_on_a(ch, rho) : apply_on_b(ch, rho);
    const double v = score(state);
    out.points.push_back({p, v});
    if (v > out.max) {
      out.max = v;
      out.argmax = p;
    }
  }
  return out;
}

struct GlobalUnitaryResult {
  PotentialResult potential;
  double entropy = 0.0;
  double original_discord = 0.0;
};

/// max_U discord(U rho U^dagger) over all unitaries on the joint space.
inline GlobalUnitaryResult max_discord_global_unitary(const DensityMatrix& rho,
                                                      const OptimizerConfig& cfg = {}) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2) {
    throw std::invalid_argument("max_discord_global_unitary: two-qubit state required");
  }
  const std::vector<std::size_t> dims{2, 2};
  auto rotated = [&](const RealVector& x) {
    const auto u = unitary_from_generator(x);
    return DensityMatrix::trusted(detail::symmetrized(conjugate_by(u, rho.matrix())), dims);
  };
  const auto search = discord_functional(cfg.search_grid, cfg.search_refine_tolerance);
  const auto fin = discord_functional(cfg.final_grid);
  GlobalUnitaryResult out;
  out.potential = detail::multistart_maximize(
      16, cfg, {}, [&](const RealVector& x) { return search(rotated(x)); },
      [&](const RealVector& x) { return fin(rotated(x)); });
  out.entropy = von_neumann_entropy(rho);
  out.original_discord = fin(rho.as_bipartite());
  return out;
}

struct ReductionValue {
  std::size_t factor_a;  // index into rho.dims()
  std::size_t factor_b;
  double value;
};

struct ReductionScan {
  std::vector<ReductionValue> values;
  ReductionValue best{0, 0, -std::numeric_limits<double>::infinity()};
};

/// Scores every reduction to one factor of A and one factor of B.
inline ReductionScan reduction_scan(const DensityMatrix& rho, const Functional& q) {
  const std::size_t na = rho.a_factors();
  const std::size_t nf = rho.dims().size();
  if (na == 0 || na >= nf) throw std::invalid_argument("reduction_scan: state not bipartite");
  if (na == 1 && nf == 2) {
    throw std::invalid_argument("reduction_scan: neither side is composite");
  }
  ReductionScan out;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = na; j < nf; ++j) {
      const std::size_t keep[] = {i, j};
      auto m = partial_trace(rho.matrix(), rho.dims(), keep);
      const auto reduced =
          DensityMatrix::trusted(detail::symmetrized(std::move(m)), {rho.dims()[i], rho.dims()[j]});
      const ReductionValue v{i, j, q(reduced)};
      out.values.push_back(v);
      if (v.value > out.best.value) out.best = v;
    }
  return out;
}

}  // namespace qlab
