// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "hdg/bessel.hpp"
#include "hdg/element_space.hpp"
#include "hdg/mesh.hpp"
#include "hdg/quadrature.hpp"

namespace hdg {

inline constexpr cplx imag_unit{0.0, 1.0};

using ScalarField = std::function<cplx(const Point2&)>;
using BoundaryField = std::function<cplx(const Point2& x, const Point2& normal)>;

/// Right-hand sides of the first-order system: the source f and Robin data g,
/// already scaled to f = -i f~/kappa and g = -i g~/kappa.
struct ProblemData
{
    ScalarField   source;
    BoundaryField boundary;
};

inline ProblemData
zero_data()
{
    return {[](const Point2&) { return cplx{}; }, [](const Point2&, const Point2&) { return cplx{}; }};
}

/// Quadrature degree for integrals involving data or the exact solution.
inline int
data_quadrature_degree(int order, double kappa, double h)
{
    return 2 * order + 4 + static_cast<int>(std::ceil(kappa * h));
}

/**
 * Radial benchmark on the unit square centred at the origin:
 *   u = cos(kappa r)/kappa - c J0(kappa r),
 *   c = (cos kappa + i sin kappa) / (kappa (J0(kappa) + i J1(kappa))),
 * solving -Lap u - kappa^2 u = sin(kappa r)/r with du/dn + i kappa u = g~.
 */
class ExactSolution
{
public:
    explicit ExactSolution(double kappa)
        : kappa_(kappa)
    {
        if (!(kappa > 0.0))
            throw std::invalid_argument("ExactSolution: kappa must be positive");
        cplx denom = kappa * cplx(bessel_j0(kappa), bessel_j1(kappa));
        // J0 and J1 have no common zero.
        if (std::abs(denom) == 0.0)
            throw std::logic_error("ExactSolution: J0(kappa) + i J1(kappa) vanished");
        coeff_ = cplx(std::cos(kappa), std::sin(kappa)) / denom;
    }

    double kappa() const { return kappa_; }
    cplx coefficient() const { return coeff_; }

    cplx
    u(const Point2& x) const
    {
        double r = x.norm();
        return std::cos(kappa_ * r) / kappa_ - coeff_ * bessel_j0(kappa_ * r);
    }

    Eigen::Vector2cd
    grad_u(const Point2& x) const
    {
        double r = x.norm();
        if (r == 0.0)
            return Eigen::Vector2cd::Zero();
        cplx du_dr = -std::sin(kappa_ * r) + coeff_ * kappa_ * bessel_j1(kappa_ * r);
        return Eigen::Vector2cd(du_dr * (x.x() / r), du_dr * (x.y() / r));
    }

    /// q = i grad u / kappa
    Eigen::Vector2cd q(const Point2& x) const { return grad_u(x) * (imag_unit / kappa_); }

private:
    double kappa_;
    cplx   coeff_;
};

/// Source and Robin data matching ExactSolution.
class BenchmarkData
{
public:
    explicit BenchmarkData(double kappa)
        : exact_(kappa)
    {}

    double kappa() const { return exact_.kappa(); }
    const ExactSolution& exact() const { return exact_; }

    /// f~ = sin(kappa r)/r, with its removable singularity at r = 0.
    double
    source_tilde(const Point2& x) const
    {
        const double k = kappa();
        double r = x.norm();
        double kr = k * r;
        if (kr < 1e-3)
            return k * (1.0 - kr * kr / 6.0 + kr * kr * kr * kr / 120.0);
        return std::sin(kr) / r;
    }

    cplx source(const Point2& x) const { return -imag_unit * source_tilde(x) / kappa(); }

    /// g~ = du/dn + i kappa u on the boundary of [-0.5, 0.5]^2.
    cplx
    boundary_tilde(const Point2& x, const Point2& normal) const
    {
        if (std::abs(std::max(std::abs(x.x()), std::abs(x.y())) - 0.5) > 1e-12)
            throw std::invalid_argument("BenchmarkData: Robin data requested at an interior point");
        Eigen::Vector2cd grad = exact_.grad_u(x);
        return grad[0] * normal.x() + grad[1] * normal.y() + imag_unit * kappa() * exact_.u(x);
    }

    cplx boundary(const Point2& x, const Point2& normal) const { return -imag_unit * boundary_tilde(x, normal) / kappa(); }

    ProblemData
    problem_data() const
    {
        return {[*this](const Point2& x) { return source(x); },
                [*this](const Point2& x, const Point2& n) { return boundary(x, n); }};
    }

private:
    ExactSolution exact_;
};

/// L2 projection onto P_p(T): coefficients are (v, phi_k)_T in the orthonormal basis.
inline VectorXc
l2_project_element(const ElementSpace& space, const ScalarField& v, int degree)
{
    const auto& rule = cached_quadrature_rule(QuadratureDomain::triangle, degree);
    VectorXc coeffs = VectorXc::Zero(Eigen::Index(space.size()));
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
        Point2 x = space.geom->map(rule.points[q]);
        cplx val = v(x) * space.weight(rule.weights[q]);
        coeffs += val * space.values(rule.points[q]).cast<cplx>();
    }
    return coeffs;
}

/// L2 projection onto P_p of the edge from a (t = 0) to b (t = 1).
inline VectorXc
l2_project_edge(const EdgeBasis& basis, const Point2& a, const Point2& b, const ScalarField& v, int degree)
{
    const auto& rule = cached_quadrature_rule(QuadratureDomain::edge, degree);
    double length = (b - a).norm();
    VectorXc coeffs = VectorXc::Zero(Eigen::Index(basis.size()));
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
        double t = rule.points[q].x();
        Point2 x = a + t * (b - a);
        coeffs += (v(x) * rule.weights[q] * length) * edge_values(basis, length, t).cast<cplx>();
    }
    return coeffs;
}

} // namespace hdg
