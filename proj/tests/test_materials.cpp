#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace dmpm {
namespace {

Mat2d random_matrix(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Mat2d(u(rng), u(rng), u(rng), u(rng));
}

// A deformation gradient with det > 0.
Mat2d random_F(std::mt19937_64& rng) {
  for (;;) {
    Mat2d F = Mat2d::Identity() + random_matrix(rng, 0.3);
    if (F.determinant() > 0.2) return F;
  }
}

MaterialParams lame(double lambda, double mu, double lambda_d = 0.0, double mu_d = 0.0) {
  MaterialParams m;
  m.lambda = lambda;
  m.mu = mu;
  m.lambda_d = lambda_d;
  m.mu_d = mu_d;
  m.density = 1.0;
  return m;
}

TEST(Lame, RubberValues) {
  const LameParameters l = lame_from_young_poisson(1.5e6, 0.47);
  EXPECT_NEAR(l.lambda, 7.993e6, 1e3);
  EXPECT_NEAR(l.mu, 5.102e5, 1e2);
}

TEST(Lame, ZeroPoissonAndHandValues) {
  const LameParameters a = lame_from_young_poisson(3.0, 0.0);
  EXPECT_EQ(a.lambda, 0.0);
  EXPECT_DOUBLE_EQ(a.mu, 1.5);
  const LameParameters b = lame_from_young_poisson(1.0, 0.25);
  EXPECT_DOUBLE_EQ(b.lambda, 0.4);
  EXPECT_DOUBLE_EQ(b.mu, 0.4);
}

TEST(Lame, RejectsInvalidParameters) {
  EXPECT_THROW(lame_from_young_poisson(1.0, 0.5), ConfigError);
  EXPECT_THROW(lame_from_young_poisson(-1.0, 0.3), ConfigError);
  EXPECT_THROW(lame_from_young_poisson(1.0, -0.1), ConfigError);
  EXPECT_THROW(MaterialParams::FromYoungPoisson(1.0, 0.3, 0.0), ConfigError);
  EXPECT_THROW(MaterialParams::FromYoungPoisson(1.0, 0.3, 1.0, -1.0, 0.0), ConfigError);
}

TEST(GreenStrain, HandValues) {
  const Mat2d e0 = green_strain(Mat2d::Identity());
  EXPECT_EQ(test::fnorm(e0), 0.0);
  const Mat2d e = green_strain(Mat2d(1.1, 0.0, 0.0, 1.0));
  EXPECT_NEAR(e.xx, 0.105, 1e-15);
  EXPECT_EQ(e.xy, 0.0);
  EXPECT_EQ(e.yy, 0.0);
}

TEST(StrainRate, Reductions) {
  std::mt19937_64 rng(1);
  const Mat2d F = random_F(rng);
  EXPECT_EQ(test::fnorm(strain_rate(F, Mat2d::Zero())), 0.0);
  const Mat2d A = random_matrix(rng, 1.0);
  const Mat2d r = strain_rate(Mat2d::Identity(), A);
  const Mat2d sym = 0.5 * (A + A.transpose());
  EXPECT_NEAR(test::fnorm(r - sym), 0.0, 1e-15);
}

TEST(StrainRate, MatchesCentralDifferenceOfGreenStrain) {
  std::mt19937_64 rng(2);
  const double d = 1e-5;
  for (int c = 0; c < 100; ++c) {
    const Mat2d F = random_F(rng);
    const Mat2d Fdot = random_matrix(rng, 1.0);
    const Mat2d fd = (1.0 / (2.0 * d)) * (green_strain(F + d * Fdot) - green_strain(F - d * Fdot));
    // green_strain is quadratic in F, so the central difference is exact up to rounding.
    EXPECT_LE(test::fnorm(strain_rate(F, Fdot) - fd), 1e-9);
  }
}

TEST(TotalStress, StressFreeReference) {
  const MaterialParams m = test::rubber(50.0, 50.0);
  EXPECT_EQ(test::fnorm(total_stress(Mat2d::Identity(), Mat2d::Zero(), m)), 0.0);
}

TEST(TotalStress, UniaxialHandValues) {
  const MaterialParams m = lame(0.0, 1.0);
  const Mat2d F(1.1, 0.0, 0.0, 1.0);
  const Mat2d S = isotropic_linear(green_strain(F), m.lambda, m.mu);
  EXPECT_NEAR(S.xx, 0.21, 1e-15);
  EXPECT_EQ(S.yy, 0.0);
  const Mat2d sigma = total_stress(F, Mat2d::Zero(), m);
  EXPECT_NEAR(sigma.xx, 0.2541, 1e-15);
  EXPECT_EQ(sigma.xy, 0.0);
  EXPECT_EQ(sigma.yy, 0.0);
}

TEST(TotalStress, SymmetryAndElasticLimit) {
  std::mt19937_64 rng(3);
  const MaterialParams damped = test::rubber(50.0, 80.0);
  const MaterialParams elastic = test::rubber();
  for (int c = 0; c < 1000; ++c) {
    const Mat2d F = random_F(rng);
    const Mat2d Fdot = random_matrix(rng, 2.0);
    const Mat2d s = total_stress(F, Fdot, damped);
    ASSERT_EQ(s.xy, s.yx);
    ASSERT_EQ(green_strain(F).xy, green_strain(F).yx);
    ASSERT_EQ(strain_rate(F, Fdot).xy, strain_rate(F, Fdot).yx);
    const Mat2d se = total_stress(F, Fdot, elastic);
    const Mat2d pure = push_forward(F, isotropic_linear(green_strain(F), elastic.lambda, elastic.mu));
    ASSERT_LE(test::fnorm(se - pure), 1e-13 * test::fnorm(pure));
  }
}

TEST(TotalStress, DissipationIsNonNegative) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> par(0.0, 100.0);
  for (int c = 0; c < 1000; ++c) {
    const Mat2d F = random_F(rng);
    const Mat2d Fdot = random_matrix(rng, 3.0);
    const double ld = par(rng), md = par(rng);
    const Mat2d rate = strain_rate(F, Fdot);
    const Mat2d Pd = isotropic_linear(rate, ld, md);
    ASSERT_GE(1e-3 * ddot(Pd, rate), 0.0);
  }
}

TEST(TotalStress, InvertedDeformationThrows) {
  EXPECT_THROW(total_stress(Mat2d(1.0, 0.0, 0.0, -0.5), Mat2d::Zero(), test::rubber()),
               SimulationError);
}

TEST(Energies, HandValues) {
  ParticleSet<double> s;
  s.add(Vec2d(1.0, 1.0), Vec2d(3.0, 4.0), 2.0, 1e-3);
  const Energies e = energies(s, test::rubber());
  EXPECT_DOUBLE_EQ(e.kinetic, 25.0);
  EXPECT_EQ(e.strain, 0.0);
  EXPECT_DOUBLE_EQ(e.total, 25.0);

  ParticleSet<double> rest;
  rest.add(Vec2d(1.0, 1.0), Vec2d::Zero(), 2.0, 1e-3);
  const Energies z = energies(rest, test::rubber());
  EXPECT_EQ(z.kinetic, 0.0);
  EXPECT_EQ(z.strain, 0.0);
  EXPECT_EQ(z.total, 0.0);
}

TEST(Energies, StressIsTheStrainEnergyDerivative) {
  std::mt19937_64 rng(5);
  const MaterialParams m = test::rubber();
  const double d = 1e-6;
  for (int c = 0; c < 200; ++c) {
    Mat2d e = random_matrix(rng, 0.05);
    e.yx = e.xy;
    Mat2d rate = random_matrix(rng, 1.0);
    rate.yx = rate.xy;
    const double fd = (strain_energy_density(e + d * rate, m) - strain_energy_density(e - d * rate, m)) /
                      (2.0 * d);
    const double power = ddot(isotropic_linear(e, m.lambda, m.mu), rate);
    // psi is quadratic in E: central differences are exact up to rounding.
    EXPECT_NEAR(fd, power, 1e-6 * (std::abs(power) + m.lambda * 1e-2));
  }
}

}  // namespace
}  // namespace dmpm
