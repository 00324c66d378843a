#include "qlab/states.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "qlab/measures.hpp"

using namespace qlab;

namespace {

void expect_valid(const DensityMatrix& rho) {
  EXPECT_TRUE(is_hermitian(rho.matrix()));
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_GE(eigenvalues_hermitian(rho.matrix()).back(), -1e-10);
}

ComplexMatrix diag4(double a, double b, double c, double d) {
  const double v[] = {a, b, c, d};
  return ComplexMatrix::diagonal(v);
}

}  // namespace

TEST(DensityMatrix, RejectsInvalidMatrices) {
  EXPECT_THROW(DensityMatrix(diag4(0.5, 0.5, 0.5, 0.5), {2, 2}), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(diag4(1.5, -0.5, 0, 0), {2, 2}), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(diag4(1, 0, 0, 0), {2, 3}), std::invalid_argument);
  ComplexMatrix skew = diag4(0.5, 0.5, 0, 0);
  skew(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix(skew, {2, 2}), std::invalid_argument);
}

TEST(Families, AllConstructorsProduceValidStates) {
  for (double p = 0.0; p <= 1.0 + 1e-12; p += 0.125) {
    expect_valid(cc_family(p));
    expect_valid(werner(p));
    expect_valid(isotropic(p));
    expect_valid(mixture_family(p));
  }
  expect_valid(ad_initial_state());
  expect_valid(bell_state());
}

TEST(Families, RejectOutOfRangeParameters) {
  EXPECT_THROW(cc_family(-0.1), std::invalid_argument);
  EXPECT_THROW(werner(1.1), std::invalid_argument);
  EXPECT_THROW(isotropic(2.0), std::invalid_argument);
  EXPECT_THROW(mixture_family(-1e-3), std::invalid_argument);
}

TEST(CcFamily, Endpoints) {
  EXPECT_EQ(cc_family(0.0).matrix(), ComplexMatrix::projector(basis_ket(4, 0)));
  EXPECT_LE(max_abs_diff(cc_family(0.5).matrix(), diag4(0.5, 0, 0, 0.5)), 1e-15);
}

TEST(Werner, EndpointsAndMaximallyMixedPoint) {
  ComplexMatrix swap(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) swap(i * 2 + j, j * 2 + i) = 1.0;
  const auto id = ComplexMatrix::identity(4);
  EXPECT_LE(max_abs_diff(werner(1.0).matrix(), (id + swap) * (0.5 / 3.0)), 1e-15);
  EXPECT_LE(max_abs_diff(werner(0.0).matrix(), (id - swap) * 0.5), 1e-15);
  EXPECT_LE(max_abs_diff(werner(0.75).matrix(), id * 0.25), 1e-12);
  EXPECT_LE(max_abs_diff(werner(0.75).matrix(), isotropic(0.0).matrix()), 1e-12);
}

TEST(Werner, CommutesWithTwirl) {
  Rng rng(2);
  const auto w = werner(0.3).matrix();
  for (int t = 0; t < 5; ++t) {
    const auto u = unitary_from_generator(RealVector{0.3 * t, -0.7, 1.1, 0.4 * t});
    const auto uu = kron(u, u);
    EXPECT_LE(max_abs_diff(uu * w, w * uu), 1e-12);
  }
}

TEST(Isotropic, EndpointsAndSpectrum) {
  EXPECT_LE(max_abs_diff(isotropic(0.0).matrix(), ComplexMatrix::identity(4) * 0.25), 1e-15);
  EXPECT_LE(max_abs_diff(isotropic(1.0).matrix(), bell_state().matrix()), 1e-15);
  const auto vals = eigenvalues_hermitian(isotropic(0.5).matrix());
  EXPECT_NEAR(vals[0], 5.0 / 8.0, 1e-12);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(vals[k], 1.0 / 8.0, 1e-12);
}

TEST(MixtureFamily, Endpoints) {
  EXPECT_LE(max_abs_diff(mixture_family(0.0).matrix(), diag4(0.5, 0, 0, 0.5)), 1e-15);
  EXPECT_LE(max_abs_diff(mixture_family(1.0).matrix(), bell_state().matrix()), 1e-15);
}

TEST(PseudoPure, SpectrumAndIsotropicIdentification) {
  const auto psi = bell_ket();
  EXPECT_LE(max_abs_diff(pseudo_pure(0.0, psi).matrix(), ComplexMatrix::identity(4) * 0.25), 1e-15);
  EXPECT_LE(max_abs_diff(pseudo_pure(1.0, psi).matrix(), bell_state().matrix()), 1e-15);
  const auto vals = eigenvalues_hermitian(pseudo_pure(0.5, psi).matrix());
  EXPECT_NEAR(vals[0], 5.0 / 8.0, 1e-12);
  for (double a = 0.0; a <= 1.0; a += 0.1)
    EXPECT_LE(max_abs_diff(pseudo_pure(a, psi).matrix(), isotropic(a).matrix()), 1e-12);
  Rng rng(17);
  const auto random_psi = random_pure_ket(4, rng);
  const auto spectrum = eigenvalues_hermitian(pseudo_pure(0.3, random_psi).matrix());
  EXPECT_NEAR(spectrum[0], 0.7 / 4 + 0.3, 1e-12);
  EXPECT_NEAR(spectrum[3], 0.7 / 4, 1e-12);
}

TEST(PseudoPure, RejectsUnnormalizedVector) {
  const std::vector<Complex> psi{1.0, 1.0, 0.0, 0.0};
  EXPECT_THROW(pseudo_pure(0.5, psi), std::invalid_argument);
}

TEST(AdInitialState, HadamardImageOfMaximalCcState) {
  const double r = 1.0 / std::numbers::sqrt2;
  const ComplexMatrix h{{r, r}, {r, -r}};
  const auto u = kron(h, ComplexMatrix::identity(2));
  EXPECT_LE(max_abs_diff(ad_initial_state().matrix(), conjugate_by(u, cc_family(0.5).matrix())),
            1e-12);
  EXPECT_LE(max_abs_diff(ad_initial_state().reduced_b(), ComplexMatrix::identity(2) * 0.5), 1e-15);
  EXPECT_LE(max_abs_diff(ad_initial_state().reduced_a(), ComplexMatrix::identity(2) * 0.5), 1e-15);
}

TEST(RandomDensity, RankOneIsPure) {
  const auto rho = random_density({2, 2}, 1, 42);
  EXPECT_NEAR((rho.matrix() * rho.matrix()).trace().real(), 1.0, 1e-10);
}

TEST(RandomDensity, DeterministicPerSeed) {
  EXPECT_EQ(random_density({2, 2}, 3, 99).matrix(), random_density({2, 2}, 3, 99).matrix());
  EXPECT_NE(random_density({2, 2}, 3, 99).matrix(), random_density({2, 2}, 3, 100).matrix());
}

TEST(RandomDensity, MeanApproachesMaximallyMixed) {
  Rng rng(123);
  ComplexMatrix mean(4, 4);
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) mean += random_density({2, 2}, 4, rng).matrix();
  mean *= 1.0 / samples;
  EXPECT_LE(max_abs_diff(mean, ComplexMatrix::identity(4) * 0.25), 0.02);
}

TEST(RandomDensity, RejectsBadRank) {
  EXPECT_THROW(random_density({2, 2}, 0, 1), std::invalid_argument);
  EXPECT_THROW(random_density({2, 2}, 5, 1), std::invalid_argument);
}

TEST(IsProduct, Verdicts) {
  Rng rng(31);
  const auto a = random_density({2}, 2, rng);
  const auto b = random_density({2}, 2, rng);
  EXPECT_TRUE(is_product(product_state(a, b)));
  EXPECT_FALSE(is_product(cc_family(0.5)));
  EXPECT_FALSE(is_product(bell_state()));
}

TEST(SwapSubsystems, ExchangesMarginals) {
  Rng rng(40);
  const auto rho = random_density({2, 3}, 4, rng);
  const auto swapped = swap_subsystems(rho);
  EXPECT_EQ(swapped.dim_a(), 3u);
  EXPECT_LE(max_abs_diff(swapped.reduced_a(), rho.reduced_b()), 1e-14);
  EXPECT_LE(max_abs_diff(swapped.reduced_b(), rho.reduced_a()), 1e-14);
}

TEST(StateText, RoundTripPreservesMatrix) {
  Rng rng(50);
  for (int t = 0; t < 5; ++t) {
    const auto rho = random_density({2, 2}, 1 + t % 4, rng);
    const auto back = parse_state(format_state(rho));
    EXPECT_EQ(back.matrix(), rho.matrix());
    EXPECT_EQ(back.dim_a(), 2u);
  }
  const auto four = random_density({2, 2, 2, 2}, 3, rng);
  const DensityMatrix split(four.matrix(), {2, 2, 2, 2}, 2);
  const auto back = parse_state(format_state(split));
  EXPECT_EQ(back.a_factors(), 2u);
  EXPECT_EQ(back.dim_a(), 4u);
}

TEST(StateText, ParsesHandWrittenFile) {
  const auto rho = parse_state(
      "dims: 2 2\n"
      "0.5+0j 0 0 0\n"
      "0 0-0j 0 0\n"
      "0 0 0 0\n"
      "0 0 0 0.5\n");
  EXPECT_LE(max_abs_diff(rho.matrix(), cc_family(0.5).matrix()), 1e-15);
  const auto with_imag = parse_state("dims: 2 1\n0.5 0-0.5j\n0+0.5j 0.5\n");
  EXPECT_EQ(with_imag.matrix()(0, 1), Complex(0.0, -0.5));
}

TEST(StateText, ReportsLineAndColumn) {
  try {
    parse_state("dims: 2 2\n1 0 0 0\n0 0 x 0\n0 0 0 0\n0 0 0 0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 5u);
  }
  EXPECT_THROW(parse_state("size: 2 2\n"), ParseError);
  EXPECT_THROW(parse_state("dims: 2 2\n1 0 0 0\n"), ParseError);
  EXPECT_THROW(parse_state("dims: 2 2\n1 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n"), ParseError);
  // Not unit trace.
  EXPECT_THROW(parse_state("dims: 2 1\n1 0\n0 1\n"), ParseError);
}
