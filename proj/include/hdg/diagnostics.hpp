// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdg/analytic.hpp"
#include "hdg/local.hpp"
#include "hdg/mesh.hpp"
#include "hdg/skeleton.hpp"

namespace hdg {

struct ErrorReport
{
    double      e_u = 0.0;        // ||u - u_h||_Omega
    double      e_q = 0.0;        // ||q - q_h||_Omega
    double      e_q_scaled = 0.0; // kappa ||q - q_h||_Omega
    double      e_trace = 0.0;    // ||u - uhat_h||_{boundary of every element}
    double      kappa = 0.0;
    int         order = 0;
    std::size_t n = 0;
    double      h = 0.0;
    std::size_t dofs = 0;
    double      seconds = 0.0;
};

/**
 * L2 errors against the exact solution with the data quadrature. The trace
 * error runs over every element boundary, so interior edges count twice.
 */
inline ErrorReport
compute_errors(const Mesh& mesh, const ProblemConfig& cfg, const Solution& sol, const ExactSolution& exact)
{
    ReferenceElement ref(cfg);
    const auto N = Eigen::Index(ref.cell_size());
    DofMap dofs(mesh, cfg.order);
    double su = 0.0, sq = 0.0, st = 0.0;
    Eigen::VectorXd vals;
    Eigen::MatrixX2d grads;
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        auto g = element_geometry(mesh, t);
        ElementSpace space(ref.cell_basis, g);
        const int deg = cfg.data_degree(g.diameter);
        const auto& rule = cached_quadrature_rule(QuadratureDomain::triangle, deg);
        for (std::size_t qp = 0; qp < rule.size(); ++qp)
        {
            Point2 x = g.map(rule.points[qp]);
            Eigen::VectorXcd v = space.values(rule.points[qp]).cast<cplx>();
            cplx uh = (sol.u[t].array() * v.array()).sum();
            cplx q1 = (sol.q[t].head(N).array() * v.array()).sum();
            cplx q2 = (sol.q[t].tail(N).array() * v.array()).sum();
            Eigen::Vector2cd qe = exact.q(x);
            double w = space.weight(rule.weights[qp]);
            su += w * std::norm(exact.u(x) - uh);
            sq += w * (std::norm(qe[0] - q1) + std::norm(qe[1] - q2));
        }

        const auto& erule = cached_quadrature_rule(QuadratureDomain::edge, deg);
        for (int f = 0; f < 3; ++f)
        {
            const auto& face = g.faces[f];
            VectorXc lam = sol.trace.segment(Eigen::Index(dofs.edge_offset[face.edge]),
                                             Eigen::Index(dofs.dofs_per_edge));
            for (std::size_t qp = 0; qp < erule.size(); ++qp)
            {
                double s = erule.points[qp].x();
                Point2 x = g.map(ElementGeometry::face_point(f, s));
                Eigen::VectorXd psi = edge_values(ref.face_basis, face.length, g.edge_parameter(f, s));
                cplx uhat = (lam.array() * psi.array().cast<cplx>()).sum();
                st += erule.weights[qp] * face.length * std::norm(exact.u(x) - uhat);
            }
        }
    }
    ErrorReport rep;
    rep.e_u = std::sqrt(su);
    rep.e_q = std::sqrt(sq);
    rep.e_q_scaled = cfg.kappa * rep.e_q;
    rep.e_trace = std::sqrt(st);
    rep.kappa = cfg.kappa;
    rep.order = cfg.order;
    rep.h = mesh.h_global;
    rep.dofs = dofs.total;
    return rep;
}

/**
 * Terms of the discrete energy identity obtained by testing the scheme with
 * its own solution:
 *   i k ||u_h||^2 - i k ||q_h||^2 + tau ||u_h - uhat_h||^2_dTh + ||uhat_h||^2_bd
 *     = (f, conj u_h) + <g, conj uhat_h>_bd
 */
struct EnergyReport
{
    cplx   lhs;
    cplx   rhs;
    double re_residual = 0.0;
    double im_residual = 0.0;
    double tau_jump_sq = 0.0; // tau ||u_h - uhat_h||^2 over all element boundaries
    double trace_bd_sq = 0.0; // ||uhat_h||^2 on the domain boundary
    double norm_u = 0.0;
    double norm_q = 0.0;
    double norm_f = 0.0;
    double norm_g = 0.0;

    /// tau ||u_h - uhat_h||^2 <= ||f|| ||u_h|| + ||g||^2
    bool
    trace_bound_holds(double rel_tol = 1e-12) const
    {
        double bound = norm_f * norm_u + norm_g * norm_g;
        return tau_jump_sq <= bound + rel_tol * std::max(bound, tau_jump_sq);
    }

    /// ||u_h|| / [(1 + k^3 h^2 / p^2) ||f|| + (1 + k^1.5 h / p) ||g||]
    double
    stability_ratio(double kappa, double h, int order) const
    {
        double p = order;
        double denom = (1.0 + kappa * kappa * kappa * h * h / (p * p)) * norm_f +
                       (1.0 + std::pow(kappa, 1.5) * h / p) * norm_g;
        return denom > 0.0 ? norm_u / denom : 0.0;
    }
};

namespace detail {

inline double
balance_residual(double a, double b)
{
    double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

} // namespace detail

inline EnergyReport
energy_identity_residual(const Mesh& mesh, const ProblemConfig& cfg, const ProblemData& data, const Solution& sol)
{
    ReferenceElement ref(cfg);
    const auto N = Eigen::Index(ref.cell_size());
    const auto m = Eigen::Index(ref.face_size());
    DofMap dofs(mesh, cfg.order);
    EnergyReport rep;
    const cplx ik = imag_unit * cfg.kappa;
    double mass_u = 0.0, mass_q = 0.0, f_sq = 0.0, g_sq = 0.0;
    cplx rhs_f{}, rhs_g{};
    double jump = 0.0;

    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        auto w = element_work(ref, mesh, t, cfg, data);
        const auto& U = sol.u[t];
        const auto& Q = sol.q[t];
        mass_u += (U.adjoint() * w.blocks.M.cast<cplx>() * U)(0).real();
        mass_q += (Q.head(N).adjoint() * w.blocks.M.cast<cplx>() * Q.head(N))(0).real() +
                  (Q.tail(N).adjoint() * w.blocks.M.cast<cplx>() * Q.tail(N))(0).real();
        rhs_f += (w.load.array() * U.array().conjugate()).sum();

        // ||u_h - uhat_h||^2 on dT: integrand of degree 2p, exact on the operator face rule.
        VectorXc lam = dofs.gather(sol.trace, t);
        const double sc = 1.0 / std::sqrt(std::abs(w.geom.det_jacobian));
        for (int f = 0; f < 3; ++f)
        {
            const auto& face = w.geom.faces[f];
            const Eigen::MatrixXd& Psi = face.flipped ? ref.edge_backward : ref.edge_forward;
            VectorXc uh = (sc * ref.face_values[f]).cast<cplx>() * U;
            VectorXc lh = (Psi / std::sqrt(face.length)).cast<cplx>() * lam.segment(f * m, m);
            for (Eigen::Index q = 0; q < uh.size(); ++q)
                jump += ref.face_rule.weights[std::size_t(q)] * face.length * std::norm(uh[q] - lh[q]);
        }

        const auto& rule = cached_quadrature_rule(QuadratureDomain::triangle, cfg.data_degree(w.geom.diameter));
        for (std::size_t qp = 0; qp < rule.size(); ++qp)
            f_sq += std::abs(w.geom.det_jacobian) * rule.weights[qp] * std::norm(data.source(w.geom.map(rule.points[qp])));
    }

    Eigen::MatrixXd emass = edge_mass(ref);
    double bd = 0.0;
    for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    {
        if (!mesh.boundary_flags[e])
            continue;
        const auto off = Eigen::Index(dofs.edge_offset[e]);
        VectorXc lam = sol.trace.segment(off, m);
        bd += (lam.adjoint() * emass.cast<cplx>() * lam)(0).real();
        VectorXc gload = boundary_load(ref, mesh, e, cfg, data);
        rhs_g += (gload.array() * lam.array().conjugate()).sum();

        const auto& inc = mesh.edge_to_elements[e].front();
        auto geom = element_geometry(mesh, inc.element);
        const Point2 normal = geom.faces[inc.local_face].normal;
        const Point2& a = mesh.vertices[mesh.edges[e][0]];
        const Point2& b = mesh.vertices[mesh.edges[e][1]];
        const double L = (b - a).norm();
        const auto& erule = cached_quadrature_rule(QuadratureDomain::edge, cfg.data_degree(geom.diameter));
        for (std::size_t qp = 0; qp < erule.size(); ++qp)
            g_sq += erule.weights[qp] * L * std::norm(data.boundary(a + erule.points[qp].x() * (b - a), normal));
    }

    rep.tau_jump_sq = cfg.tau * jump;
    rep.trace_bd_sq = bd;
    rep.lhs = ik * mass_u - ik * mass_q + rep.tau_jump_sq + bd;
    rep.rhs = rhs_f + rhs_g;
    rep.re_residual = detail::balance_residual(rep.lhs.real(), rep.rhs.real());
    rep.im_residual = detail::balance_residual(rep.lhs.imag(), rep.rhs.imag());
    rep.norm_u = std::sqrt(mass_u);
    rep.norm_q = std::sqrt(mass_q);
    rep.norm_f = std::sqrt(f_sq);
    rep.norm_g = std::sqrt(g_sq);
    return rep;
}

/// Rows ordered by increasing n.
struct ConvergenceTable
{
    std::vector<ErrorReport> rows;
};

struct ConvergenceRates
{
    // least-squares slopes of log e against log h over the finest three rows
    double slope_u = 0.0;
    double slope_q = 0.0;
    double slope_trace = 0.0;
    // rate between row k-1 and k; NaN for the first row
    std::vector<double> rate_u;
    std::vector<double> rate_q;
    std::vector<double> rate_trace;
};

inline double
least_squares_slope(const std::vector<double>& h, const std::vector<double>& e)
{
    const std::size_t n = h.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        mx += std::log(h[i]);
        my += std::log(e[i]);
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double dx = std::log(h[i]) - mx;
        sxy += dx * (std::log(e[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

/// Pairwise rates log(e_{k-1}/e_k) / log(h_{k-1}/h_k); log2 of the error ratio under halving.
inline std::vector<double>
pairwise_rates(const std::vector<double>& h, const std::vector<double>& e)
{
    std::vector<double> r(h.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 1; k < h.size(); ++k)
        r[k] = std::log(e[k - 1] / e[k]) / std::log(h[k - 1] / h[k]);
    return r;
}

inline ConvergenceRates
convergence_rates(const ConvergenceTable& table)
{
    const auto& rows = table.rows;
    if (rows.size() < 3)
        throw std::invalid_argument("convergence_rates: need at least 3 rows, got " + std::to_string(rows.size()));
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (rows[k].n <= rows[k - 1].n)
            throw std::invalid_argument("convergence_rates: rows must be strictly ordered by n");

    std::vector<double> h, eu, eq, et;
    for (const auto& r : rows)
    {
        h.push_back(r.h);
        eu.push_back(r.e_u);
        eq.push_back(r.e_q);
        et.push_back(r.e_trace);
    }
    auto tail3 = [](const std::vector<double>& v) { return std::vector<double>(v.end() - 3, v.end()); };

    ConvergenceRates out;
    out.slope_u = least_squares_slope(tail3(h), tail3(eu));
    out.slope_q = least_squares_slope(tail3(h), tail3(eq));
    out.slope_trace = least_squares_slope(tail3(h), tail3(et));
    out.rate_u = pairwise_rates(h, eu);
    out.rate_q = pairwise_rates(h, eq);
    out.rate_trace = pairwise_rates(h, et);
    return out;
}

/// Table CSV; rates need at least two rows and are NaN where undefined.
inline void
write_convergence_csv(std::ostream& os, const ConvergenceTable& table, const std::vector<std::string>& header_comments)
{
    std::vector<double> h, eu, eq, et;
    for (const auto& r : table.rows)
    {
        h.push_back(r.h);
        eu.push_back(r.e_u);
        eq.push_back(r.e_q);
        et.push_back(r.e_trace);
    }
    auto ru = pairwise_rates(h, eu), rq = pairwise_rates(h, eq), rt = pairwise_rates(h, et);

    auto old_precision = os.precision(17);
    for (const auto& line : header_comments)
        os << "# " << line << '\n';
    os << "kappa,p,n,h,dofs,e_u,e_q,e_q_scaled,e_trace,rate_u,rate_q,rate_trace,seconds\n";
    for (std::size_t k = 0; k < table.rows.size(); ++k)
    {
        const auto& r = table.rows[k];
        os << r.kappa << ',' << r.order << ',' << r.n << ',' << r.h << ',' << r.dofs << ',' << r.e_u << ','
           << r.e_q << ',' << r.e_q_scaled << ',' << r.e_trace << ',' << ru[k] << ',' << rq[k] << ',' << rt[k]
           << ',' << r.seconds << '\n';
    }
    os.precision(old_precision);
}

} // namespace hdg
