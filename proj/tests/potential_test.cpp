#include "qlab/potential.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace qlab;

namespace {

OptimizerConfig quick() {
  OptimizerConfig cfg;
  cfg.restarts = 6;
  cfg.max_evals = 600;
  return cfg;
}

// Permutation matrix on a tensor product exchanging two qubit factors.
ComplexMatrix factor_swap(std::size_t n_qubits, std::size_t f1, std::size_t f2) {
  const std::size_t side = std::size_t{1} << n_qubits;
  ComplexMatrix p(side, side);
  for (std::size_t x = 0; x < side; ++x) {
    const std::size_t b1 = (x >> (n_qubits - 1 - f1)) & 1u;
    const std::size_t b2 = (x >> (n_qubits - 1 - f2)) & 1u;
    std::size_t y = x & ~(std::size_t{1} << (n_qubits - 1 - f1)) & ~(std::size_t{1} << (n_qubits - 1 - f2));
    y |= b2 << (n_qubits - 1 - f1);
    y |= b1 << (n_qubits - 1 - f2);
    p(y, x) = 1.0;
  }
  return p;
}

// Generator H with exp(iH) = P for an involutive permutation P.
RealVector involution_generator(const ComplexMatrix& p) {
  const auto id = ComplexMatrix::identity(p.rows());
  return params_from_hermitian((id - p) * (std::numbers::pi / 2.0));
}

}  // namespace

TEST(ParamsFromHermitian, RoundTrip) {
  Rng rng(1);
  const auto h = random_generator(4, 1.0, rng);
  EXPECT_EQ(params_from_hermitian(hermitian_from_params(h)), h);
  const auto swap = factor_swap(2, 0, 1);
  EXPECT_LE(max_abs_diff(unitary_from_generator(involution_generator(swap)), swap), 1e-12);
}

TEST(AncillaForRank, SupportedValues) {
  EXPECT_EQ(ancilla_for_rank(0), 1u);
  EXPECT_EQ(ancilla_for_rank(2), 2u);
  EXPECT_EQ(ancilla_for_rank(4), 4u);
  EXPECT_THROW(ancilla_for_rank(3), std::invalid_argument);
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(potential_discord(bell_state(), 2, cfg), std::invalid_argument);
  cfg.restarts = 1;
  cfg.simplex_tolerance = 0.0;
  EXPECT_THROW(potential_discord(bell_state(), 2, cfg), std::invalid_argument);
}

TEST(EmbedParameters, PreservesTheEncodedChannel) {
  Rng rng(2);
  const auto rho = random_density({2, 2}, 3, rng);
  RealVector params = random_generator(4, 1.0, rng);
  const auto hb = random_generator(4, 1.0, rng);
  params.insert(params.end(), hb.begin(), hb.end());
  const auto lifted = embed_parameters(params, 2, 2, 2, 4);
  EXPECT_EQ(lifted.size(), 128u);
  EXPECT_LE(max_abs_diff(potential_output_state(rho, 2, params).matrix(),
                         potential_output_state(rho, 4, lifted).matrix()),
            1e-12);
}

TEST(PotentialDiscord, MaximalCcState) {
  const auto r = potential_discord(cc_family(0.5), 2);
  EXPECT_NEAR(r.value, 0.2018, 0.01);
  // The reported parameters really realize a local pair with that much discord.
  const auto out = potential_output_state(cc_family(0.5), 2, r.best_params);
  EXPECT_GT(discord(out).discord, 0.19);
  EXPECT_NEAR(discord(out).discord, r.value, 1e-12);
}

TEST(PotentialDiscord, ProductStatesVanish) {
  Rng rng(3);
  for (int t = 0; t < 3; ++t) {
    const auto prod = product_state(random_density({2}, 2, rng), random_density({2}, 2, rng));
    for (std::size_t d : {2u, 4u}) EXPECT_NEAR(potential_discord(prod, d, quick()).value, 0.0, 1e-6);
  }
}

TEST(PotentialDiscord, BellStateIsOne) {
  EXPECT_NEAR(potential_discord(bell_state(), 2, quick()).value, 1.0, 1e-4);
}

TEST(PotentialDiscord, RankZeroMatchesDiscord) {
  Rng rng(4);
  for (int t = 0; t < 3; ++t) {
    const auto rho = random_density({2, 2}, 2 + t, rng);
    EXPECT_NEAR(potential_discord(rho, 0, quick()).value, discord(rho).discord, 1e-4);
  }
}

TEST(PotentialDiscord, OrderRelations) {
  Rng rng(5);
  for (int t = 0; t < 4; ++t) {
    const auto rho = random_density({2, 2}, 1 + t, rng);
    const double pd = potential_discord(rho, 2, quick()).value;
    EXPECT_GE(pd, discord(rho).discord - 1e-6);
    EXPECT_LE(pd, mutual_information(rho) + 1e-6);
  }
}

TEST(PotentialDiscord, WarmStartedMaximumDominatesRankTwo) {
  const auto cfg = quick();
  const auto rho = mixture_family(0.2);
  const auto low = potential_discord(rho, 2, cfg);
  const auto high = max_potential_discord(rho, cfg);
  EXPECT_GE(high.value, low.value - 1e-12);
}

TEST(PotentialDiscord, DeterministicPerSeed) {
  const auto cfg = quick();
  Rng rng(6);
  const auto rho = random_density({2, 2}, 4, rng);
  EXPECT_EQ(potential_discord(rho, 2, cfg).value, potential_discord(rho, 2, cfg).value);
}

TEST(PotentialQ, MutualInformationOfProductsStaysZero) {
  Rng rng(7);
  const auto prod = product_state(random_density({2}, 2, rng), random_density({2}, 2, rng));
  const Functional mi = [](const DensityMatrix& s) { return mutual_information(s); };
  EXPECT_NEAR(potential_q(prod, 2, mi, quick()).value, 0.0, 1e-9);
}

TEST(RestrictedSweep, AmplitudeDampingOnInitialState) {
  std::vector<double> ps;
  for (int k = 0; k <= 100; ++k) ps.push_back(0.01 * k);
  const auto sweep = potential_discord_restricted(ad_initial_state(), amplitude_damping, ps);
  ASSERT_EQ(sweep.points.size(), ps.size());
  EXPECT_NEAR(sweep.points.front().value, 0.0, 1e-6);
  EXPECT_NEAR(sweep.points.back().value, 0.0, 1e-6);
  EXPECT_NEAR(sweep.max, 0.07, 0.01);
  EXPECT_GT(sweep.argmax, 0.0);
  EXPECT_LT(sweep.argmax, 1.0);
}

TEST(GlobalUnitary, Endpoints) {
  const auto cfg = quick();
  EXPECT_NEAR(max_discord_global_unitary(maximally_mixed({2, 2}), cfg).potential.value, 0.0, 1e-6);
  const DensityMatrix zero(ComplexMatrix::projector(basis_ket(4, 0)), {2, 2});
  const auto r = max_discord_global_unitary(zero, cfg);
  EXPECT_NEAR(r.potential.value, 1.0, 1e-3);
  EXPECT_NEAR(r.entropy, 0.0, 1e-9);
  EXPECT_NEAR(r.original_discord, 0.0, 1e-9);
}

TEST(ReductionScan, CcStateWithQuantumReduction) {
  // A2 A1 | B1 B2 with p |0 0 0 0> + (1 - p) |1 + + 1>.
  const double p = 0.5;
  const double r = 1.0 / std::numbers::sqrt2;
  const std::vector<Complex> plus{r, r};
  const auto k0 = basis_ket(2, 0);
  const auto k1 = basis_ket(2, 1);
  const auto first = kron_ket(kron_ket(k0, k0), kron_ket(k0, k0));
  const auto second = kron_ket(kron_ket(k1, plus), kron_ket(plus, k1));
  const ComplexMatrix m = ComplexMatrix::projector(first) * p + ComplexMatrix::projector(second) * (1 - p);
  const DensityMatrix rho(m, {2, 2, 2, 2}, 2);
  const auto scan = reduction_scan(rho, discord_functional(64));
  ASSERT_EQ(scan.values.size(), 4u);
  double a1b1 = -1.0;
  for (const auto& v : scan.values)
    if (v.factor_a == 1 && v.factor_b == 2) a1b1 = v.value;
  EXPECT_GT(a1b1, 1e-3);
  EXPECT_GE(scan.best.value, a1b1);
  // Flags A2 and B2 are orthogonal, so reductions containing A2 are classical on A.
  for (const auto& v : scan.values)
    if (v.factor_a == 0) {
      EXPECT_NEAR(v.value, 0.0, 1e-6);
    }
}

TEST(ReductionScan, ProductStateReductionsVanish) {
  Rng rng(8);
  const auto a = random_density({2, 2}, 4, rng);
  const auto b = random_density({2, 2}, 4, rng);
  const DensityMatrix rho(kron(a.matrix(), b.matrix()), {2, 2, 2, 2}, 2);
  for (const auto& v : reduction_scan(rho, discord_functional(64)).values)
    EXPECT_NEAR(v.value, 0.0, 1e-6);
}

TEST(ReductionScan, RequiresCompositeSide) {
  EXPECT_THROW(reduction_scan(bell_state(), discord_functional(64)), std::invalid_argument);
}

TEST(ReductionScan, BoundedByPotentialOfRankFour) {
  // A | B1 B2: the reductions to (A, B_j) are reachable by a rank-2 local
  // operation that resets the other B factor, so PQ^4 must dominate them.
  Rng rng(9);
  const auto rho = random_density({2, 2, 2}, 3, rng);
  const auto scan = reduction_scan(rho, discord_functional(64));
  const Functional q = discord_functional(32, 1e-6);
  OptimizerConfig cfg;
  cfg.restarts = 2;
  cfg.max_evals = 60;
  // B side: ancilla (two qubits) x B1 x B2; swapping ancilla qubit 0 with
  // B_other replaces B_other by |0>.
  for (const auto& v : scan.values) {
    const std::size_t other = v.factor_b == 1 ? 3 : 2;
    RealVector start(64, 0.0);
    const auto gb = involution_generator(factor_swap(4, 0, other));
    start.insert(start.end(), gb.begin(), gb.end());
    const auto pq = potential_q(rho, 4, q, cfg, discord_functional(64), std::span(&start, 1));
    EXPECT_LE(v.value, pq.value + 1e-4);
  }
}
