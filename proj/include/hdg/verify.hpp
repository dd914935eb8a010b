// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdg/analytic.hpp"
#include "hdg/basis.hpp"
#include "hdg/diagnostics.hpp"
#include "hdg/local.hpp"
#include "hdg/mesh.hpp"
#include "hdg/pipeline.hpp"
#include "hdg/quadrature.hpp"
#include "hdg/skeleton.hpp"

namespace hdg {

/// sup over P_p(T) of ||v||_dT h^{1/2} / (p ||v||_T) for p = 1, 2, 3 on the
/// structured-mesh triangle shape, found by power iteration on the reference element.
inline constexpr double trace_inequality_constant = 4.4260671869454447;

struct CheckResult
{
    std::string name;
    bool        passed = false;
    double      value = 0.0;
    double      threshold = 0.0;
    std::string detail;
};

inline std::string
format_check(const CheckResult& c)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", c.value);
    std::string s = std::string(c.passed ? "PASS " : "FAIL ") + c.name + "  " + buf;
    std::snprintf(buf, sizeof buf, "%.3e", c.threshold);
    s += "  (limit " + std::string(buf) + ")";
    if (!c.detail.empty())
        s += "  " + c.detail;
    return s;
}

/// Case lists for the solver-backed checks.
struct VerifyCases
{
    std::vector<double>      kappas;
    std::vector<int>         orders;
    std::vector<std::size_t> ns;
};

namespace detail {

inline double
monomial_integral(int a, int b)
{
    // int_T xi^a eta^b = a! b! / (a + b + 2)!
    return std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 3.0));
}

template <class T>
std::vector<T>
or_default(const std::vector<T>& v, std::vector<T> fallback)
{
    return v.empty() ? fallback : v;
}

} // namespace detail

/// max |G - I| of the reference Gram matrix, p = 1..max_basis_order.
inline CheckResult
check_orthonormality()
{
    double worst = 0.0;
    for (int p = 1; p <= max_basis_order; ++p)
    {
        const auto& rule = cached_quadrature_rule(QuadratureDomain::triangle, 2 * p);
        auto table = triangle_basis_eval(p, rule.points);
        Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), Eigen::Index(rule.size()));
        Eigen::MatrixXd G = table.values.transpose() * w.asDiagonal() * table.values;
        worst = std::max(worst, (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());

        const auto& erule = cached_quadrature_rule(QuadratureDomain::edge, 2 * p);
        std::vector<double> ts;
        for (const auto& pt : erule.points)
            ts.push_back(pt.x());
        Eigen::MatrixXd E = edge_basis_eval(p, ts);
        Eigen::Map<const Eigen::VectorXd> we(erule.weights.data(), Eigen::Index(erule.size()));
        Eigen::MatrixXd Ge = E.transpose() * we.asDiagonal() * E;
        worst = std::max(worst, (Ge - Eigen::MatrixXd::Identity(Ge.rows(), Ge.cols())).cwiseAbs().maxCoeff());
    }
    return {"orthonormality", worst <= 1e-12, worst, 1e-12, "max |G - I|, p = 1.." + std::to_string(max_basis_order)};
}

/// Relative error of every monomial of degree <= d under the degree-d rules, d <= 24.
inline CheckResult
check_quadrature_exactness()
{
    double worst = 0.0;
    for (int d = 0; d <= 24; ++d)
    {
        const auto& tri = cached_quadrature_rule(QuadratureDomain::triangle, d);
        const auto& edge = cached_quadrature_rule(QuadratureDomain::edge, d);
        for (int a = 0; a <= d; ++a)
        {
            for (int b = 0; a + b <= d; ++b)
            {
                double s = 0.0;
                for (std::size_t q = 0; q < tri.size(); ++q)
                    s += tri.weights[q] * std::pow(tri.points[q].x(), a) * std::pow(tri.points[q].y(), b);
                double exact = detail::monomial_integral(a, b);
                worst = std::max(worst, std::abs(s - exact) / exact);
            }
            double s = 0.0;
            for (std::size_t q = 0; q < edge.size(); ++q)
                s += edge.weights[q] * std::pow(edge.points[q].x(), a);
            worst = std::max(worst, std::abs(s * (a + 1) - 1.0));
        }
    }
    return {"quadrature-exactness", worst <= 1e-12, worst, 1e-12, "max relative monomial error, degree <= 24"};
}

/// Boundary mass matrix of the physically orthonormal basis on a triangle.
inline Eigen::MatrixXd
boundary_mass(int order, const std::array<Point2, 3>& v)
{
    ReferenceElement ref(order, 2 * order);
    Eigen::Matrix2d J;
    J.col(0) = v[1] - v[0];
    J.col(1) = v[2] - v[0];
    const double scale = 1.0 / std::abs(J.determinant());
    const auto N = Eigen::Index(ref.cell_size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
    for (int f = 0; f < 3; ++f)
    {
        double L = (v[(f + 1) % 3] - v[f]).norm();
        for (Eigen::Index q = 0; q < ref.face_values[f].rows(); ++q)
        {
            Eigen::VectorXd phi = ref.face_values[f].row(q).transpose();
            B += (ref.face_rule.weights[std::size_t(q)] * L * scale) * phi * phi.transpose();
        }
    }
    return B;
}

/**
 * 200 random v in P_p(T) per (p, h), p = 1..3, h = 1/4, 1/8, 1/16, on
 * rotated copies of the mesh triangle; reports the largest
 * ||v||_dT h^{1/2} / (p ||v||_T).
 */
inline CheckResult
check_trace_inequality(unsigned seed = 12345)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    double worst = 0.0;
    for (int p = 1; p <= 3; ++p)
    {
        for (double h : {0.25, 0.125, 0.0625})
        {
            const double leg = h / std::sqrt(2.0), th = angle(rng);
            Eigen::Matrix2d rot;
            rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
            std::array<Point2, 3> v{Point2(0.3, -0.2), Point2(0.3, -0.2) + rot * Point2(leg, 0.0),
                                    Point2(0.3, -0.2) + rot * Point2(0.0, leg)};
            Eigen::MatrixXd B = boundary_mass(p, v);
            for (int s = 0; s < 200; ++s)
            {
                Eigen::VectorXd c(B.rows());
                for (Eigen::Index i = 0; i < c.size(); ++i)
                    c[i] = normal(rng);
                double ratio = std::sqrt(c.dot(B * c) / c.squaredNorm()) * std::sqrt(h) / p;
                worst = std::max(worst, ratio);
            }
        }
    }
    return {"trace-inequality", worst <= trace_inequality_constant * (1.0 + 1e-12), worst, trace_inequality_constant,
            "sup ||v||_dT h^1/2 / (p ||v||_T) over 1800 samples"};
}

struct ProjectionStudy
{
    std::vector<double> h;
    std::vector<double> element_error;  // ||u - Pi u||_Omega
    std::vector<double> boundary_error; // ||u - Pi u|| over all element boundaries
    double element_slope = 0.0;
    double boundary_slope = 0.0;
};

/// L2 projection of sin(3x) cos(2y) onto P_p on structured meshes.
inline ProjectionStudy
projection_study(int order, const std::vector<std::size_t>& ns)
{
    ScalarField u = [](const Point2& x) { return cplx(std::sin(3.0 * x.x()) * std::cos(2.0 * x.y()), 0.0); };
    ProjectionStudy out;
    TriangleBasis basis(order);
    const int deg = 2 * order + 6;
    const auto& rule = cached_quadrature_rule(QuadratureDomain::triangle, deg);
    const auto& erule = cached_quadrature_rule(QuadratureDomain::edge, deg);
    for (std::size_t n : ns)
    {
        Mesh mesh = build_structured_mesh(n);
        double el = 0.0, bd = 0.0;
        for (std::size_t t = 0; t < mesh.num_elements(); ++t)
        {
            auto g = element_geometry(mesh, t);
            ElementSpace space(basis, g);
            VectorXc c = l2_project_element(space, u, deg);
            for (std::size_t q = 0; q < rule.size(); ++q)
                el += space.weight(rule.weights[q]) *
                      std::norm(u(g.map(rule.points[q])) - evaluate_field(space, c, rule.points[q]));
            for (int f = 0; f < 3; ++f)
                for (std::size_t q = 0; q < erule.size(); ++q)
                {
                    Point2 r = ElementGeometry::face_point(f, erule.points[q].x());
                    bd += erule.weights[q] * g.faces[f].length * std::norm(u(g.map(r)) - evaluate_field(space, c, r));
                }
        }
        out.h.push_back(mesh.h_global);
        out.element_error.push_back(std::sqrt(el));
        out.boundary_error.push_back(std::sqrt(bd));
    }
    out.element_slope = least_squares_slope(out.h, out.element_error);
    out.boundary_slope = least_squares_slope(out.h, out.boundary_error);
    return out;
}

inline std::vector<CheckResult>
check_projection_rates()
{
    // n = 8..64 halves h four times over h = sqrt(2)/n
    auto s = projection_study(1, {8, 16, 32, 64});
    return {{"projection-rate-element", s.element_slope >= 1.9, s.element_slope, 1.9,
             "slope of ||u - Pi u||_T, p = 1"},
            {"projection-rate-boundary", s.boundary_slope >= 1.4, s.boundary_slope, 1.4,
             "slope of ||u - Pi u||_dT, p = 1"}};
}

/**
 * Local problems on every element of the n = 2 mesh for p = 1..3 and
 * kappa = 1, 20, 100: the system factors, and zero data gives zero fields.
 */
inline CheckResult
check_local_uniqueness()
{
    Mesh mesh = build_structured_mesh(2);
    double worst = 0.0, min_rcond = 1.0;
    for (int p = 1; p <= 3; ++p)
    {
        for (double k : {1.0, 20.0, 100.0})
        {
            auto cfg = make_problem_config(mesh, k, p);
            ReferenceElement ref(cfg);
            for (std::size_t t = 0; t < mesh.num_elements(); ++t)
            {
                auto blocks = assemble_local_blocks(ref, element_geometry(mesh, t), cfg);
                auto lu = detail::factor_local(blocks);
                min_rcond = std::min(min_rcond, lu.rcond());
                auto fields = local_solve(blocks, VectorXc::Zero(Eigen::Index(ref.trace_size())),
                                          VectorXc::Zero(Eigen::Index(ref.cell_size())));
                worst = std::max({worst, fields.Q.cwiseAbs().maxCoeff(), fields.U.cwiseAbs().maxCoeff()});
            }
        }
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, "max |(Q,U)| for zero data; min rcond %.3e", min_rcond);
    return {"local-uniqueness", worst <= 1e-12, worst, 1e-12, buf};
}

/// Relative coefficient deviation of the condensed pipeline from the monolithic solve.
inline double
oracle_deviation(double kappa, int order, std::size_t n)
{
    Mesh mesh = build_structured_mesh(n);
    auto cfg = make_problem_config(mesh, kappa, order);
    auto data = BenchmarkData(kappa).problem_data();
    Solution a = solve_condensed(mesh, cfg, data);
    Solution b = monolithic_solve(mesh, cfg, data);
    double dev = 0.0, scale = 0.0;
    auto acc = [&](const VectorXc& x, const VectorXc& y) {
        dev = std::max(dev, (x - y).cwiseAbs().maxCoeff());
        scale = std::max(scale, y.cwiseAbs().maxCoeff());
    };
    acc(a.trace, b.trace);
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        acc(a.q[t], b.q[t]);
        acc(a.u[t], b.u[t]);
    }
    return scale > 0.0 ? dev / scale : dev;
}

inline CheckResult
check_oracle(const VerifyCases& cases = {})
{
    auto ks = detail::or_default(cases.kappas, {5.0, 20.0});
    auto ps = detail::or_default(cases.orders, {1, 2});
    auto ns = detail::or_default(cases.ns, {std::size_t(1), std::size_t(2)});
    double worst = 0.0;
    for (double k : ks)
        for (int p : ps)
            for (std::size_t n : ns)
                worst = std::max(worst, oracle_deviation(k, p, n));
    return {"oracle", worst <= 1e-8, worst, 1e-8, "max relative coefficient deviation, condensed vs monolithic"};
}

inline CheckResult
check_energy_identity(const VerifyCases& cases = {})
{
    auto ks = detail::or_default(cases.kappas, {5.0, 20.0, 40.0});
    auto ps = detail::or_default(cases.orders, {1, 2, 3});
    auto ns = detail::or_default(cases.ns, {std::size_t(8), std::size_t(16), std::size_t(32)});
    double re = 0.0, im = 0.0;
    for (double k : ks)
        for (int p : ps)
            for (std::size_t n : ns)
            {
                auto r = run_case(k, p, n);
                re = std::max(re, r.energy.re_residual);
                im = std::max(im, r.energy.im_residual);
            }
    char buf[80];
    std::snprintf(buf, sizeof buf, "re %.3e, im %.3e", re, im);
    return {"energy-identity", std::max(re, im) <= 1e-9, std::max(re, im), 1e-9, buf};
}

/**
 * Finite-difference residuals of the exact solution: Helmholtz equation at
 * interior points and the Robin condition at boundary points, relative to
 * the size of the terms.
 */
inline CheckResult
check_exact_solution(const VerifyCases& cases = {})
{
    auto ks = detail::or_default(cases.kappas, {5.0, 20.0, 40.0});
    double worst = 0.0;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(-0.45, 0.45), side(-0.5, 0.5);
    for (double k : ks)
    {
        BenchmarkData bench(k);
        const auto& ex = bench.exact();
        const double d = 1e-3 / k;
        for (int s = 0; s < 50; ++s)
        {
            Point2 x(pos(rng), pos(rng));
            if (x.norm() < 4.0 * d)
                continue;
            Point2 ex1(d, 0.0), ey(0.0, d);
            cplx lap = (ex.u(x + ex1) + ex.u(x - ex1) + ex.u(x + ey) + ex.u(x - ey) - 4.0 * ex.u(x)) / (d * d);
            cplx res = -lap - k * k * ex.u(x) - bench.source_tilde(x);
            double scale = std::abs(lap) + k * k * std::abs(ex.u(x)) + std::abs(bench.source_tilde(x));
            worst = std::max(worst, std::abs(res) / scale);
        }
        const std::array<Point2, 4> normals{Point2(1, 0), Point2(-1, 0), Point2(0, 1), Point2(0, -1)};
        for (int s = 0; s < 100; ++s)
        {
            const Point2& nrm = normals[std::size_t(s % 4)];
            double t = side(rng);
            Point2 x = nrm.x() != 0.0 ? Point2(0.5 * nrm.x(), t) : Point2(t, 0.5 * nrm.y());
            cplx dudn = (ex.u(x + d * nrm) - ex.u(x - d * nrm)) / (2.0 * d);
            cplx g = bench.boundary_tilde(x, nrm);
            cplx res = dudn + imag_unit * k * ex.u(x) - g;
            worst = std::max(worst, std::abs(res) / (std::abs(dudn) + k * std::abs(ex.u(x)) + std::abs(g)));
        }
    }
    return {"exact-solution-residuals", worst <= 1e-4, worst, 1e-4,
            "finite-difference Helmholtz and Robin residuals, relative"};
}

inline const std::vector<std::string>&
verify_check_names()
{
    static const std::vector<std::string> names{"orthonormality",   "quadrature-exactness", "trace-inequality",
                                                "projection-rates", "local-uniqueness",     "oracle",
                                                "energy-identity",  "exact-solution-residuals"};
    return names;
}

/// Runs one named check group; throws std::invalid_argument for an unknown name.
inline std::vector<CheckResult>
run_check(const std::string& name, const VerifyCases& cases = {})
{
    if (name == "orthonormality")
        return {check_orthonormality()};
    if (name == "quadrature-exactness")
        return {check_quadrature_exactness()};
    if (name == "trace-inequality")
        return {check_trace_inequality()};
    if (name == "projection-rates")
        return check_projection_rates();
    if (name == "local-uniqueness")
        return {check_local_uniqueness()};
    if (name == "oracle")
        return {check_oracle(cases)};
    if (name == "energy-identity")
        return {check_energy_identity(cases)};
    if (name == "exact-solution-residuals")
        return {check_exact_solution(cases)};
    throw std::invalid_argument("unknown check '" + name + "'");
}

} // namespace hdg
