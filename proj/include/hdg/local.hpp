// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "hdg/analytic.hpp"
#include "hdg/basis.hpp"
#include "hdg/element_space.hpp"
#include "hdg/mesh.hpp"
#include "hdg/quadrature.hpp"

namespace hdg {

/// Raised when a local or global system cannot be factored.
class SingularSystemError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class TauRule
{
    p_over_kappa_h, // tau = p / (kappa h)
    constant,
};

inline std::string
to_string(TauRule rule)
{
    return rule == TauRule::p_over_kappa_h ? "p/(kappa*h)" : "constant";
}

struct QuadratureOptions
{
    int operator_degree = -1; // < 0: use 2p
    int data_extra = 4;       // data degree = 2p + data_extra + ceil(kappa h_T)
};

/**
 * Wave number, polynomial order and stabilization for one mesh.
 * Build with make_problem_config so tau follows the mesh.
 */
struct ProblemConfig
{
    double            kappa = 1.0;
    int               order = 1;
    double            tau = 1.0;
    double            h = 1.0;
    TauRule           tau_rule = TauRule::p_over_kappa_h;
    QuadratureOptions quadrature;

    int operator_degree() const { return quadrature.operator_degree >= 0 ? quadrature.operator_degree : 2 * order; }

    int
    data_degree(double h_elem) const
    {
        return 2 * order + quadrature.data_extra + static_cast<int>(std::ceil(kappa * h_elem));
    }
};

inline ProblemConfig
make_problem_config(const Mesh& mesh, double kappa, int order,
                    TauRule rule = TauRule::p_over_kappa_h, double constant_tau = 1.0,
                    QuadratureOptions quad = {})
{
    if (!(kappa > 0.0))
        throw std::invalid_argument("ProblemConfig: kappa must be positive");
    if (order < 1 || order > max_basis_order)
        throw std::invalid_argument("ProblemConfig: unsupported order " + std::to_string(order));
    ProblemConfig cfg;
    cfg.kappa = kappa;
    cfg.order = order;
    cfg.h = mesh.h_global;
    cfg.tau_rule = rule;
    cfg.quadrature = quad;
    cfg.tau = rule == TauRule::p_over_kappa_h ? double(order) / (kappa * mesh.h_global) : constant_tau;
    if (!(cfg.tau > 0.0))
        throw std::invalid_argument("ProblemConfig: tau must be positive");
    return cfg;
}

/**
 * Reference-element tables shared by every element of one order: basis
 * values and gradients at the operator quadrature points, element traces at
 * the face points, and the edge basis in both traversal directions.
 */
struct ReferenceElement
{
    int                            order;
    TriangleBasis                  cell_basis;
    EdgeBasis                      face_basis;
    QuadratureRule                 cell_rule;
    QuadratureRule                 face_rule;
    Eigen::MatrixXd                cell_values;
    Eigen::MatrixXd                cell_d_dxi;
    Eigen::MatrixXd                cell_d_deta;
    std::array<Eigen::MatrixXd, 3> face_values;
    Eigen::MatrixXd                edge_forward;  // psi(s)
    Eigen::MatrixXd                edge_backward; // psi(1 - s)

    ReferenceElement(int p, int operator_degree)
        : order(p), cell_basis(p), face_basis(p),
          cell_rule(quadrature_rule(QuadratureDomain::triangle, operator_degree)),
          face_rule(quadrature_rule(QuadratureDomain::edge, operator_degree))
    {
        auto table = triangle_basis_eval(p, cell_rule.points);
        cell_values = std::move(table.values);
        cell_d_dxi = std::move(table.d_dx);
        cell_d_deta = std::move(table.d_dy);

        const auto nq = Eigen::Index(face_rule.size());
        const auto nb = Eigen::Index(cell_basis.size());
        const auto ne = Eigen::Index(face_basis.size());
        edge_forward.resize(nq, ne);
        edge_backward.resize(nq, ne);
        for (int f = 0; f < 3; ++f)
        {
            face_values[f].resize(nq, nb);
            for (Eigen::Index q = 0; q < nq; ++q)
                face_values[f].row(q) =
                    cell_basis.values(ElementGeometry::face_point(f, face_rule.points[q].x())).transpose();
        }
        for (Eigen::Index q = 0; q < nq; ++q)
        {
            double s = face_rule.points[q].x();
            edge_forward.row(q) = face_basis.values(s).transpose();
            edge_backward.row(q) = face_basis.values(1.0 - s).transpose();
        }
    }

    explicit ReferenceElement(const ProblemConfig& cfg)
        : ReferenceElement(cfg.order, cfg.operator_degree())
    {}

    std::size_t cell_size() const { return cell_basis.size(); }
    std::size_t face_size() const { return face_basis.size(); }
    std::size_t trace_size() const { return 3 * face_basis.size(); }
};

/**
 * Element blocks of the local HDG equations, in the physically orthonormal
 * bases. Vector test/trial functions r_a are (phi_a, 0) for a < N and
 * (0, phi_{a-N}) otherwise; trace dofs are ordered face by face in the
 * global edge orientation.
 *
 *   A  (2N x 2N)  i kappa (q, r)_T
 *   B  (N  x 2N)  (w, div r)_T
 *   C  (2N x 3m)  <mu, r.n>_dT
 *   S  (N  x N )  tau <u, w>_dT
 *   R  (N  x 3m)  tau <mu, w>_dT
 *   M  (N  x N )  (u, w)_T
 *   E  (3m x 3m)  <lambda, mu>_dT, face-block diagonal
 */
struct LocalBlocks
{
    MatrixXc        A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd S;
    Eigen::MatrixXd R;
    Eigen::MatrixXd M;
    Eigen::MatrixXd E;
    double          kappa = 0.0;
    double          tau = 0.0;

    Eigen::Index cell_size() const { return M.rows(); }
    Eigen::Index trace_size() const { return E.rows(); }
    Eigen::Index local_size() const { return 3 * M.rows(); }

    /// [[A, -B^T], [B, i kappa M + S]] acting on (Q, U).
    MatrixXc
    system_matrix() const
    {
        const Eigen::Index n = cell_size();
        MatrixXc L(3 * n, 3 * n);
        L.topLeftCorner(2 * n, 2 * n) = A;
        L.topRightCorner(2 * n, n) = -B.transpose().cast<cplx>();
        L.bottomLeftCorner(n, 2 * n) = B.cast<cplx>();
        L.bottomRightCorner(n, n) = (imag_unit * kappa) * M.cast<cplx>() + S.cast<cplx>();
        return L;
    }

    /// Right-hand side of the local equations per unit trace: [-C; R].
    Eigen::MatrixXd
    trace_coupling() const
    {
        Eigen::MatrixXd G(local_size(), trace_size());
        G.topRows(2 * cell_size()) = -C;
        G.bottomRows(cell_size()) = R;
        return G;
    }

    /// Maps (Q, U) to the flux moments <q.n + tau u, mu>_dT: [C^T R^T].
    Eigen::MatrixXd
    flux_extraction() const
    {
        Eigen::MatrixXd P(trace_size(), local_size());
        P.leftCols(2 * cell_size()) = C.transpose();
        P.rightCols(cell_size()) = R.transpose();
        return P;
    }
};

inline LocalBlocks
assemble_local_blocks(const ReferenceElement& ref, const ElementGeometry& geom, const ProblemConfig& cfg)
{
    if (geom.area <= 1e-14)
        throw std::invalid_argument("assemble_local_blocks: degenerate element");

    const auto N = Eigen::Index(ref.cell_size());
    const auto m = Eigen::Index(ref.face_size());
    const double detj = std::abs(geom.det_jacobian);
    const double sc = 1.0 / std::sqrt(detj);
    const auto& Jinv = geom.inverse_jacobian;

    // |det J| sc^2 = 1, so cell integrals reduce to reference weights.
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(ref.cell_rule.weights.data(),
                                                          Eigen::Index(ref.cell_rule.size()));
    Eigen::MatrixXd V = ref.cell_values;
    Eigen::MatrixXd DX = ref.cell_d_dxi * Jinv(0, 0) + ref.cell_d_deta * Jinv(1, 0);
    Eigen::MatrixXd DY = ref.cell_d_dxi * Jinv(0, 1) + ref.cell_d_deta * Jinv(1, 1);
    Eigen::MatrixXd WV = w.asDiagonal() * V;

    LocalBlocks blk;
    blk.kappa = cfg.kappa;
    blk.tau = cfg.tau;
    blk.M = WV.transpose() * V;
    blk.A = MatrixXc::Zero(2 * N, 2 * N);
    blk.A.topLeftCorner(N, N) = (imag_unit * cfg.kappa) * blk.M.cast<cplx>();
    blk.A.bottomRightCorner(N, N) = (imag_unit * cfg.kappa) * blk.M.cast<cplx>();
    blk.B.resize(N, 2 * N);
    blk.B.leftCols(N) = WV.transpose() * DX;
    blk.B.rightCols(N) = WV.transpose() * DY;

    blk.C = Eigen::MatrixXd::Zero(2 * N, 3 * m);
    blk.S = Eigen::MatrixXd::Zero(N, N);
    blk.R = Eigen::MatrixXd::Zero(N, 3 * m);
    blk.E = Eigen::MatrixXd::Zero(3 * m, 3 * m);

    Eigen::VectorXd wf = Eigen::Map<const Eigen::VectorXd>(ref.face_rule.weights.data(),
                                                           Eigen::Index(ref.face_rule.size()));
    for (int f = 0; f < 3; ++f)
    {
        const auto& face = geom.faces[f];
        const double L = face.length;
        const Eigen::MatrixXd& Vf = ref.face_values[f];
        const Eigen::MatrixXd& Psi = face.flipped ? ref.edge_backward : ref.edge_forward;
        // element trace sc * phi_hat, edge function psi_hat / sqrt(L), measure L ds
        Eigen::MatrixXd WVf = wf.asDiagonal() * Vf;
        Eigen::MatrixXd cross = (sc * std::sqrt(L)) * (WVf.transpose() * Psi);
        blk.C.block(0, f * m, N, m) = face.normal.x() * cross;
        blk.C.block(N, f * m, N, m) = face.normal.y() * cross;
        blk.S += (cfg.tau * sc * sc * L) * (WVf.transpose() * Vf);
        blk.R.block(0, f * m, N, m) = cfg.tau * cross;
        blk.E.block(f * m, f * m, m, m) = Psi.transpose() * wf.asDiagonal() * Psi;
    }
    return blk;
}

inline LocalBlocks
assemble_local_blocks(const ElementGeometry& geom, const ProblemConfig& cfg)
{
    ReferenceElement ref(cfg);
    return assemble_local_blocks(ref, geom, cfg);
}

/**
 * -(r_b, grad w_i)_T + <r_b.n, w_i>_dT, the form in which the flux enters
 * the scalar equation. Integration by parts makes it equal to B.
 */
inline Eigen::MatrixXd
divergence_block_by_parts(const ReferenceElement& ref, const ElementGeometry& geom)
{
    const auto N = Eigen::Index(ref.cell_size());
    const double sc = 1.0 / std::sqrt(std::abs(geom.det_jacobian));
    const auto& Jinv = geom.inverse_jacobian;
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(ref.cell_rule.weights.data(),
                                                          Eigen::Index(ref.cell_rule.size()));
    Eigen::MatrixXd V = ref.cell_values;
    Eigen::MatrixXd DX = ref.cell_d_dxi * Jinv(0, 0) + ref.cell_d_deta * Jinv(1, 0);
    Eigen::MatrixXd DY = ref.cell_d_dxi * Jinv(0, 1) + ref.cell_d_deta * Jinv(1, 1);

    Eigen::MatrixXd D(N, 2 * N);
    D.leftCols(N) = -(DX.transpose() * w.asDiagonal() * V);
    D.rightCols(N) = -(DY.transpose() * w.asDiagonal() * V);

    Eigen::VectorXd wf = Eigen::Map<const Eigen::VectorXd>(ref.face_rule.weights.data(),
                                                           Eigen::Index(ref.face_rule.size()));
    for (int f = 0; f < 3; ++f)
    {
        const auto& face = geom.faces[f];
        const Eigen::MatrixXd& Vf = ref.face_values[f];
        Eigen::MatrixXd trace = (sc * sc * face.length) * (Vf.transpose() * wf.asDiagonal() * Vf);
        D.leftCols(N) += face.normal.x() * trace;
        D.rightCols(N) += face.normal.y() * trace;
    }
    return D;
}

/// Interior fields of one element.
struct LocalFields
{
    VectorXc Q; // 2N: x components then y components
    VectorXc U; // N
};

namespace detail {

inline Eigen::PartialPivLU<MatrixXc>
factor_local(const LocalBlocks& blocks)
{
    Eigen::PartialPivLU<MatrixXc> lu(blocks.system_matrix());
    double rc = lu.rcond();
    if (!(rc > 1e3 * std::numeric_limits<double>::epsilon()))
        throw SingularSystemError("local HDG system is numerically singular (rcond = " + std::to_string(rc) + ")");
    return lu;
}

inline LocalFields
split_local(const VectorXc& x, Eigen::Index n)
{
    return {x.head(2 * n), x.tail(n)};
}

} // namespace detail

/// Solve the local problems for trace data lambda and load (f, w_i)_T.
inline LocalFields
local_solve(const LocalBlocks& blocks, const VectorXc& lambda, const VectorXc& f_load)
{
    const Eigen::Index n = blocks.cell_size();
    if (lambda.size() != blocks.trace_size() || f_load.size() != n)
        throw std::invalid_argument("local_solve: size mismatch");
    auto lu = detail::factor_local(blocks);
    VectorXc rhs = blocks.trace_coupling().cast<cplx>() * lambda;
    rhs.tail(n) += f_load;
    return detail::split_local(lu.solve(rhs), n);
}

/// Max-norm residual of the local equations, relative to the data.
inline double
local_residual(const LocalBlocks& blocks, const VectorXc& lambda, const VectorXc& f_load, const LocalFields& fields)
{
    const Eigen::Index n = blocks.cell_size();
    VectorXc x(3 * n);
    x << fields.Q, fields.U;
    VectorXc rhs = blocks.trace_coupling().cast<cplx>() * lambda;
    rhs.tail(n) += f_load;
    VectorXc res = blocks.system_matrix() * x - rhs;
    double scale = std::max({rhs.norm(), (blocks.system_matrix() * x).norm(), 1e-300});
    return res.norm() / scale;
}

/// <q^.n, mu>_dT with q^.n = Q.n + tau (U - lambda), one entry per trace dof.
inline VectorXc
flux_moments(const LocalBlocks& blocks, const VectorXc& lambda, const LocalFields& fields)
{
    VectorXc x(blocks.local_size());
    x << fields.Q, fields.U;
    return blocks.flux_extraction().cast<cplx>() * x - blocks.tau * (blocks.E.cast<cplx>() * lambda);
}

/**
 * Statically condensed element. With lambda the element's trace dofs:
 *   fields(lambda) = recon_lambda * lambda + recon_f
 *   -<q^.n, mu>_dT = K * lambda - F
 * so K is the element's share of a_h and F its share of b_h.
 */
struct CondensedElement
{
    MatrixXc K;
    VectorXc F;
    MatrixXc recon_lambda;
    VectorXc recon_f;

    LocalFields
    reconstruct(const VectorXc& lambda) const
    {
        VectorXc x = recon_lambda * lambda + recon_f;
        return detail::split_local(x, x.size() / 3);
    }
};

inline CondensedElement
condense_element(const LocalBlocks& blocks, const VectorXc& f_load)
{
    const Eigen::Index n = blocks.cell_size();
    if (f_load.size() != n)
        throw std::invalid_argument("condense_element: load size mismatch");
    auto lu = detail::factor_local(blocks);

    CondensedElement ce;
    ce.recon_lambda = lu.solve(blocks.trace_coupling().cast<cplx>());
    VectorXc load = VectorXc::Zero(blocks.local_size());
    load.tail(n) = f_load;
    ce.recon_f = lu.solve(load);

    MatrixXc P = blocks.flux_extraction().cast<cplx>();
    ce.K = blocks.tau * blocks.E.cast<cplx>() - P * ce.recon_lambda;
    ce.F = P * ce.recon_f;
    return ce;
}

/// Load vector (f, w_i)_T with the data quadrature.
inline VectorXc
element_load(const ReferenceElement& ref, const ElementGeometry& geom, const ProblemConfig& cfg,
             const ScalarField& source)
{
    ElementSpace space(ref.cell_basis, geom);
    return l2_project_element(space, source, cfg.data_degree(geom.diameter));
}

} // namespace hdg
