// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "hdg/analytic.hpp"
#include "hdg/bessel.hpp"

using namespace hdg;

namespace {

// Independent power series, long double, for the root search.
long double
j0_series_oracle(long double x)
{
    long double term = 1.0L, sum = 1.0L, q = x * x / 4.0L;
    for (int k = 1; k < 200; ++k)
    {
        term *= -q / (static_cast<long double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-30L)
            break;
    }
    return sum;
}

} // namespace

TEST(Bessel, ValuesAtZero)
{
    EXPECT_EQ(bessel_j0(0.0), 1.0);
    EXPECT_EQ(bessel_j1(0.0), 0.0);
}

TEST(Bessel, FirstRootOfJ0)
{
    long double a = 2.0L, b = 3.0L;
    for (int it = 0; it < 200; ++it)
    {
        long double m = 0.5L * (a + b);
        (j0_series_oracle(a) * j0_series_oracle(m) <= 0.0L ? b : a) = m;
    }
    const double root = double(0.5L * (a + b));
    EXPECT_NEAR(root, 2.404825557695773, 1e-14);
    EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-10);
}

TEST(Bessel, DerivativeIdentity)
{
    // half-integer points keep the stencil off the branch switch at 12
    const double h = 1e-5;
    for (int k = 1; k <= 50; ++k)
    {
        double x = k - 0.5;
        double d = (bessel_j0(x + h) - bessel_j0(x - h)) / (2 * h);
        EXPECT_NEAR(d, -bessel_j1(x), 1e-8) << x;
    }
}

TEST(Bessel, AgreesWithBoost)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> small(0.0, 30.0), large(30.0, 1e4);
    for (int s = 0; s < 400; ++s)
    {
        double x = s % 2 ? small(rng) : large(rng);
        EXPECT_NEAR(bessel_j0(x), boost::math::cyl_bessel_j(0, x), 1e-12) << x;
        EXPECT_NEAR(bessel_j1(x), boost::math::cyl_bessel_j(1, x), 1e-12) << x;
    }
}

TEST(Bessel, BranchesAgreeAroundCrossover)
{
    for (double x = 8.0; x <= 16.0; x += 0.125)
    {
        for (int order : {0, 1})
        {
            double d = std::abs(double(bessel_j_series(order, x)) - bessel_j_asymptotic(order, x));
            EXPECT_LT(d, x >= bessel_crossover ? 1e-12 : 5e-9) << "order " << order << " x " << x;
        }
    }
}

TEST(Bessel, Errors)
{
    EXPECT_THROW(bessel_j(2, 1.0), std::invalid_argument);
    EXPECT_THROW(bessel_j0(-1e-3), std::invalid_argument);
    EXPECT_THROW(bessel_j1(2e4), std::invalid_argument);
    EXPECT_NO_THROW(bessel_j0(1e4));
}

TEST(ExactSolution, ValuesAtOrigin)
{
    for (double k : {1.0, 5.0, 20.0, 40.0})
    {
        ExactSolution ex(k);
        cplx c = cplx(std::cos(k), std::sin(k)) /
                 (k * cplx(boost::math::cyl_bessel_j(0, k), boost::math::cyl_bessel_j(1, k)));
        EXPECT_NEAR(std::abs(ex.coefficient() - c), 0.0, 1e-12 * std::abs(c));
        EXPECT_NEAR(std::abs(ex.u(Point2(0, 0)) - (1.0 / k - c)), 0.0, 1e-14);
        EXPECT_EQ(ex.grad_u(Point2(0, 0)).norm(), 0.0);
    }
}

TEST(ExactSolution, HelmholtzResidual)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-0.5, 0.5);
    const double d = 1e-4;
    for (double k : {5.0, 20.0, 40.0})
    {
        BenchmarkData bench(k);
        const auto& ex = bench.exact();
        for (int s = 0; s < 100; ++s)
        {
            Point2 x(pos(rng), pos(rng));
            if (x.norm() < 1e-2)
                continue;
            cplx lap = (ex.u(x + Point2(d, 0)) + ex.u(x - Point2(d, 0)) + ex.u(x + Point2(0, d)) +
                        ex.u(x - Point2(0, d)) - 4.0 * ex.u(x)) /
                       (d * d);
            cplx res = -lap - k * k * ex.u(x) - bench.source_tilde(x);
            double scale = std::abs(lap) + k * k * std::abs(ex.u(x)) + std::abs(bench.source_tilde(x));
            EXPECT_LT(std::abs(res) / scale, 1e-4) << "kappa " << k;
        }
    }
}

TEST(ExactSolution, GradientAndFlux)
{
    const double k = 20.0, d = 1e-6;
    ExactSolution ex(k);
    for (Point2 x : {Point2(0.1, 0.2), Point2(-0.4, 0.05), Point2(0.33, -0.27)})
    {
        Eigen::Vector2cd g = ex.grad_u(x);
        EXPECT_LT(std::abs(g[0] - (ex.u(x + Point2(d, 0)) - ex.u(x - Point2(d, 0))) / (2 * d)), 1e-7);
        EXPECT_LT(std::abs(g[1] - (ex.u(x + Point2(0, d)) - ex.u(x - Point2(0, d))) / (2 * d)), 1e-7);
        EXPECT_LT((ex.q(x) - g * (imag_unit / k)).norm(), 1e-15);
    }
}

TEST(BenchmarkData, RobinResidualOnBoundary)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> side(-0.5, 0.5);
    const Point2 normals[4] = {Point2(1, 0), Point2(-1, 0), Point2(0, 1), Point2(0, -1)};
    const double d = 1e-6;
    for (double k : {5.0, 20.0})
    {
        BenchmarkData bench(k);
        const auto& ex = bench.exact();
        for (int s = 0; s < 100; ++s)
        {
            const Point2& nrm = normals[s % 4];
            double t = side(rng);
            Point2 x = nrm.x() != 0.0 ? Point2(0.5 * nrm.x(), t) : Point2(t, 0.5 * nrm.y());
            cplx dudn = (ex.u(x + d * nrm) - ex.u(x - d * nrm)) / (2 * d);
            cplx res = dudn + imag_unit * k * ex.u(x) - bench.boundary_tilde(x, nrm);
            EXPECT_LT(std::abs(res), 1e-7);
            EXPECT_LT(std::abs(bench.boundary(x, nrm) - (-imag_unit * bench.boundary_tilde(x, nrm) / k)), 1e-15);
        }
    }
}

TEST(BenchmarkData, Source)
{
    for (double k : {1.0, 20.0, 40.0})
    {
        BenchmarkData bench(k);
        EXPECT_DOUBLE_EQ(bench.source_tilde(Point2(0, 0)), k);
        EXPECT_NEAR(bench.source_tilde(Point2(M_PI / k, 0)), 0.0, 1e-12 * k);
        EXPECT_NEAR(std::abs(bench.source(Point2(0, 0)) - cplx(0, -1)), 0.0, 1e-15);
        // series branch meets sin(kr)/r
        double r = 0.999e-3 / k;
        EXPECT_NEAR(bench.source_tilde(Point2(r, 0)), std::sin(k * r) / r, 1e-12 * k);
    }
}

TEST(BenchmarkData, Errors)
{
    BenchmarkData bench(5.0);
    EXPECT_THROW(bench.boundary_tilde(Point2(0.1, 0.2), Point2(1, 0)), std::invalid_argument);
    EXPECT_THROW(ExactSolution(0.0), std::invalid_argument);
    EXPECT_THROW(ExactSolution(-2.0), std::invalid_argument);
}
