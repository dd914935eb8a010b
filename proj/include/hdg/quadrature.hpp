// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hdg {

enum class QuadratureDomain
{
    triangle,
    edge
};

/**
 * Points and positive weights on the reference triangle
 * {x >= 0, y >= 0, x + y <= 1} or on the reference edge [0, 1].
 * Edge points keep only their x() coordinate meaningful.
 */
struct QuadratureRule
{
    std::vector<Eigen::Vector2d> points;
    std::vector<double>          weights;
    int                          degree = 0;
    QuadratureDomain             domain = QuadratureDomain::edge;

    std::size_t size() const { return points.size(); }
};

inline constexpr int max_quadrature_degree = 200;

namespace detail {

/// P_n(z) and P_n'(z) by the three-term recurrence.
inline std::pair<double, double>
legendre_and_derivative(int n, double z)
{
    double p0 = 1.0, p1 = z;
    if (n == 0)
        return {1.0, 0.0};
    for (int k = 2; k <= n; ++k)
    {
        double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    return {p1, n * (z * p1 - p0) / (z * z - 1.0)};
}

} // namespace detail

/// Gauss-Legendre nodes (ascending) and weights on [0, 1].
inline void
gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(npoints, 0.0);
    weights.assign(npoints, 0.0);
    for (int i = 0; i < npoints; ++i)
    {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
        for (int iter = 0; iter < 100; ++iter)
        {
            auto [p, dp] = detail::legendre_and_derivative(npoints, z);
            double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        auto [p, dp] = detail::legendre_and_derivative(npoints, z);
        nodes[npoints - 1 - i] = 0.5 * (1.0 + z);
        weights[npoints - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
}

/**
 * Rule exact for polynomials of total degree <= degree.
 *
 * Edges use Gauss-Legendre with ceil((degree+1)/2) points. Triangles use the
 * collapsed (Duffy) map x = u, y = (1-u) v with a Gauss-Legendre tensor rule;
 * the extra factor (1-u) from the Jacobian raises the degree in u by one.
 */
inline QuadratureRule
quadrature_rule(QuadratureDomain domain, int degree)
{
    if (degree < 0)
        throw std::invalid_argument("quadrature_rule: negative degree");
    if (degree > max_quadrature_degree)
        throw std::invalid_argument("quadrature_rule: degree " + std::to_string(degree) +
                                    " exceeds supported maximum " + std::to_string(max_quadrature_degree));

    QuadratureRule rule;
    rule.degree = degree;
    rule.domain = domain;

    std::vector<double> xv, wv;
    if (domain == QuadratureDomain::edge)
    {
        int n = std::max(1, (degree + 2) / 2);
        gauss_legendre(n, xv, wv);
        for (int i = 0; i < n; ++i)
        {
            rule.points.emplace_back(xv[i], 0.0);
            rule.weights.push_back(wv[i]);
        }
        return rule;
    }

    int nu = std::max(1, (degree + 3) / 2);
    int nv = std::max(1, (degree + 2) / 2);
    std::vector<double> xu, wu;
    gauss_legendre(nu, xu, wu);
    gauss_legendre(nv, xv, wv);
    rule.points.reserve(nu * nv);
    rule.weights.reserve(nu * nv);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
        {
            double u = xu[i];
            rule.points.emplace_back(u, (1.0 - u) * xv[j]);
            rule.weights.push_back(wu[i] * wv[j] * (1.0 - u));
        }
    return rule;
}

/// Shared immutable rule; built once per (domain, degree).
inline const QuadratureRule&
cached_quadrature_rule(QuadratureDomain domain, int degree)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_pair(static_cast<int>(domain), degree);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, quadrature_rule(domain, degree)).first;
    return it->second;
}

} // namespace hdg
