// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#ifdef HDG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

#include "hdg/analytic.hpp"
#include "hdg/local.hpp"
#include "hdg/mesh.hpp"

namespace hdg {

using SparseMatrixXc = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

/// p+1 trace dofs per edge, laid out edge by edge.
struct DofMap
{
    std::size_t                             dofs_per_edge = 0;
    std::size_t                             total = 0;
    std::vector<std::size_t>                edge_offset;
    std::vector<std::array<std::size_t, 3>> element_edges;
    std::vector<std::array<bool, 3>>        element_flipped;

    DofMap() = default;

    DofMap(const Mesh& mesh, int order)
        : dofs_per_edge(edge_basis_size(order)), total(mesh.num_edges() * dofs_per_edge)
    {
        edge_offset.resize(mesh.num_edges());
        for (std::size_t e = 0; e < mesh.num_edges(); ++e)
            edge_offset[e] = e * dofs_per_edge;
        element_edges = mesh.element_edges;
        element_flipped.resize(mesh.num_elements());
        for (std::size_t t = 0; t < mesh.num_elements(); ++t)
            for (int f = 0; f < 3; ++f)
                element_flipped[t][f] = mesh.edges[mesh.element_edges[t][f]][0] != mesh.triangles[t][f];
    }

    std::size_t local_size() const { return 3 * dofs_per_edge; }

    /// Global index of local trace dof k (face k / m, mode k % m) of an element.
    std::size_t
    global_index(std::size_t elem, std::size_t k) const
    {
        return edge_offset[element_edges[elem][k / dofs_per_edge]] + k % dofs_per_edge;
    }

    VectorXc
    gather(const VectorXc& global, std::size_t elem) const
    {
        VectorXc local(static_cast<Eigen::Index>(local_size()));
        for (std::size_t k = 0; k < local_size(); ++k)
            local[Eigen::Index(k)] = global[Eigen::Index(global_index(elem, k))];
        return local;
    }

    void
    scatter_add(const VectorXc& local, std::size_t elem, VectorXc& global) const
    {
        for (std::size_t k = 0; k < local_size(); ++k)
            global[Eigen::Index(global_index(elem, k))] += local[Eigen::Index(k)];
    }
};

/**
 * Check that both neighbours of every interior edge see the same physical
 * point at the same edge parameter, i.e. that face orientation flags make
 * the single-valued trace dofs consistent.
 */
inline void
check_orientation(const Mesh& mesh)
{
    for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    {
        const Point2& a = mesh.vertices[mesh.edges[e][0]];
        const Point2& b = mesh.vertices[mesh.edges[e][1]];
        for (const auto& inc : mesh.edge_to_elements[e])
        {
            auto g = element_geometry(mesh, inc.element);
            for (double s : {0.0, 0.3, 1.0})
            {
                Point2 x_face = g.map(ElementGeometry::face_point(inc.local_face, s));
                Point2 x_edge = a + g.edge_parameter(inc.local_face, s) * (b - a);
                if ((x_face - x_edge).norm() > 1e-12 * (1.0 + x_edge.norm()))
                    throw std::logic_error("dof map orientation mismatch on edge " + std::to_string(e));
            }
        }
    }
}

/// Global system a_h(uhat, mu) = b_h(mu) in the trace unknowns.
struct SkeletonSystem
{
    DofMap         dofs;
    SparseMatrixXc matrix;
    VectorXc       rhs;
};

/// Element and edge coefficients of (q_h, u_h, uhat_h).
struct Solution
{
    int                   order = 1;
    std::vector<VectorXc> q; // 2N per element
    std::vector<VectorXc> u; // N per element
    VectorXc              trace;
};

/// Everything the per-element work produces for one element.
struct ElementWork
{
    ElementGeometry geom;
    LocalBlocks     blocks;
    VectorXc        load;
};

inline ElementWork
element_work(const ReferenceElement& ref, const Mesh& mesh, std::size_t elem, const ProblemConfig& cfg,
             const ProblemData& data)
{
    ElementWork w;
    w.geom = element_geometry(mesh, elem);
    w.blocks = assemble_local_blocks(ref, w.geom, cfg);
    w.load = element_load(ref, w.geom, cfg, data.source);
    return w;
}

/// <g, mu_k> on a boundary edge, in the edge's global orientation.
inline VectorXc
boundary_load(const ReferenceElement& ref, const Mesh& mesh, std::size_t edge, const ProblemConfig& cfg,
              const ProblemData& data)
{
    const auto& inc = mesh.edge_to_elements[edge].front();
    auto g = element_geometry(mesh, inc.element);
    const Point2 normal = g.faces[inc.local_face].normal;
    const Point2& a = mesh.vertices[mesh.edges[edge][0]];
    const Point2& b = mesh.vertices[mesh.edges[edge][1]];
    return l2_project_edge(ref.face_basis, a, b, [&](const Point2& x) { return data.boundary(x, normal); },
                           cfg.data_degree(g.diameter));
}

/// <lambda, mu> on one edge (the identity up to quadrature round-off).
inline Eigen::MatrixXd
edge_mass(const ReferenceElement& ref)
{
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(ref.face_rule.weights.data(),
                                                          Eigen::Index(ref.face_rule.size()));
    return ref.edge_forward.transpose() * w.asDiagonal() * ref.edge_forward;
}

/**
 * Assemble a_h and b_h by static condensation, element by element in
 * ascending order, plus the Robin mass and data on boundary edges.
 */
inline SkeletonSystem
assemble_skeleton(const Mesh& mesh, const ProblemConfig& cfg, const ProblemData& data)
{
    check_orientation(mesh);
    ReferenceElement ref(cfg);
    SkeletonSystem sys;
    sys.dofs = DofMap(mesh, cfg.order);
    const auto& dofs = sys.dofs;
    const std::size_t nloc = dofs.local_size();
    sys.rhs = VectorXc::Zero(Eigen::Index(dofs.total));

    std::vector<Eigen::Triplet<cplx, int>> triplets;
    triplets.reserve(mesh.num_elements() * nloc * nloc + mesh.num_edges() * dofs.dofs_per_edge * dofs.dofs_per_edge);
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        auto w = element_work(ref, mesh, t, cfg, data);
        auto ce = condense_element(w.blocks, w.load);
        for (std::size_t i = 0; i < nloc; ++i)
            for (std::size_t j = 0; j < nloc; ++j)
                triplets.emplace_back(int(dofs.global_index(t, i)), int(dofs.global_index(t, j)),
                                      ce.K(Eigen::Index(i), Eigen::Index(j)));
        dofs.scatter_add(ce.F, t, sys.rhs);
    }

    Eigen::MatrixXd mass = edge_mass(ref);
    const auto m = Eigen::Index(dofs.dofs_per_edge);
    for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    {
        if (!mesh.boundary_flags[e])
            continue;
        const auto off = Eigen::Index(dofs.edge_offset[e]);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                triplets.emplace_back(int(off + i), int(off + j), cplx(mass(i, j), 0.0));
        sys.rhs.segment(off, m) += boundary_load(ref, mesh, e, cfg, data);
    }

    sys.matrix.resize(Eigen::Index(dofs.total), Eigen::Index(dofs.total));
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();
    return sys;
}

inline double
relative_residual(const SparseMatrixXc& A, const VectorXc& x, const VectorXc& b)
{
    double bn = b.norm();
    VectorXc r = A * x - b;
    return bn > 0.0 ? r.norm() / bn : r.norm();
}

/**
 * Sparse direct solve of a complex general system (UMFPACK when available),
 * with one step of iterative refinement if the residual misses the target.
 */
inline VectorXc
sparse_direct_solve(const SparseMatrixXc& A, const VectorXc& b, double tolerance = 1e-10)
{
    if (b.norm() == 0.0)
        return VectorXc::Zero(b.size());
#ifdef HDG_HAVE_UMFPACK
    Eigen::UmfPackLU<SparseMatrixXc> solver;
#else
    Eigen::SparseLU<SparseMatrixXc, Eigen::COLAMDOrdering<int>> solver;
#endif
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw SingularSystemError("sparse LU factorization failed");
    VectorXc x = solver.solve(b);
    if (solver.info() != Eigen::Success)
        throw SingularSystemError("sparse LU solve failed");
    if (relative_residual(A, x, b) > tolerance)
    {
        VectorXc r = b - A * x;
        x += solver.solve(r);
    }
    double res = relative_residual(A, x, b);
    if (!(res <= tolerance))
        throw SingularSystemError("sparse solve residual " + std::to_string(res) + " exceeds " +
                                  std::to_string(tolerance));
    return x;
}

inline VectorXc
solve_skeleton(const SkeletonSystem& system)
{
    return sparse_direct_solve(system.matrix, system.rhs);
}

/// Recover (q_h, u_h) from uhat_h through the local solvers.
inline Solution
reconstruct_interior(const Mesh& mesh, const ProblemConfig& cfg, const VectorXc& trace, const ProblemData& data)
{
    ReferenceElement ref(cfg);
    DofMap dofs(mesh, cfg.order);
    if (trace.size() != Eigen::Index(dofs.total))
        throw std::invalid_argument("reconstruct_interior: trace vector has wrong size");
    Solution sol;
    sol.order = cfg.order;
    sol.trace = trace;
    sol.q.resize(mesh.num_elements());
    sol.u.resize(mesh.num_elements());
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        auto w = element_work(ref, mesh, t, cfg, data);
        auto fields = local_solve(w.blocks, dofs.gather(trace, t), w.load);
        sol.q[t] = std::move(fields.Q);
        sol.u[t] = std::move(fields.U);
    }
    return sol;
}

/// Condensed pipeline: assemble, solve, reconstruct.
inline Solution
solve_condensed(const Mesh& mesh, const ProblemConfig& cfg, const ProblemData& data)
{
    auto sys = assemble_skeleton(mesh, cfg, data);
    return reconstruct_interior(mesh, cfg, solve_skeleton(sys), data);
}

inline constexpr std::size_t default_monolithic_limit = 200000;

/// The coupled system in (Q, U) per element followed by all trace dofs.
struct MonolithicSystem
{
    SparseMatrixXc matrix;
    VectorXc       rhs;
    std::size_t    interior_size = 0; // leading block of element unknowns
    std::size_t    cell_size = 0;
};

/**
 * All four equation groups as one system. Element rows hold the local
 * equations; trace rows hold -sum_T <q^.n, mu>_dT + <uhat, mu>_bd = <g, mu>_bd,
 * the transmission and Robin conditions in the sign of a_h.
 */
inline MonolithicSystem
assemble_monolithic(const Mesh& mesh, const ProblemConfig& cfg, const ProblemData& data,
                    std::size_t max_unknowns = default_monolithic_limit)
{
    ReferenceElement ref(cfg);
    DofMap dofs(mesh, cfg.order);
    const auto N = ref.cell_size();
    const std::size_t nl = 3 * N;
    const std::size_t interior = mesh.num_elements() * nl;
    const std::size_t total = interior + dofs.total;
    if (total > max_unknowns)
        throw std::length_error("monolithic_solve: " + std::to_string(total) +
                                " unknowns exceed the monolithic size guard (" + std::to_string(max_unknowns) + ")");

    MonolithicSystem sys;
    sys.interior_size = interior;
    sys.cell_size = N;
    sys.rhs = VectorXc::Zero(Eigen::Index(total));
    std::vector<Eigen::Triplet<cplx, int>> trip;
    const std::size_t nt = dofs.local_size();
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        auto w = element_work(ref, mesh, t, cfg, data);
        MatrixXc L = w.blocks.system_matrix();
        Eigen::MatrixXd G = w.blocks.trace_coupling();
        Eigen::MatrixXd P = w.blocks.flux_extraction();
        const std::size_t off = t * nl;
        for (std::size_t i = 0; i < nl; ++i)
        {
            for (std::size_t j = 0; j < nl; ++j)
                trip.emplace_back(int(off + i), int(off + j), L(Eigen::Index(i), Eigen::Index(j)));
            for (std::size_t k = 0; k < nt; ++k)
                trip.emplace_back(int(off + i), int(interior + dofs.global_index(t, k)),
                                  cplx(-G(Eigen::Index(i), Eigen::Index(k)), 0.0));
        }
        sys.rhs.segment(Eigen::Index(off + 2 * N), Eigen::Index(N)) = w.load;
        for (std::size_t k = 0; k < nt; ++k)
        {
            const int row = int(interior + dofs.global_index(t, k));
            for (std::size_t j = 0; j < nl; ++j)
                trip.emplace_back(row, int(off + j), cplx(-P(Eigen::Index(k), Eigen::Index(j)), 0.0));
            for (std::size_t l = 0; l < nt; ++l)
                trip.emplace_back(row, int(interior + dofs.global_index(t, l)),
                                  cplx(w.blocks.tau * w.blocks.E(Eigen::Index(k), Eigen::Index(l)), 0.0));
        }
    }
    Eigen::MatrixXd mass = edge_mass(ref);
    const auto m = Eigen::Index(dofs.dofs_per_edge);
    for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    {
        if (!mesh.boundary_flags[e])
            continue;
        const auto off = Eigen::Index(interior + dofs.edge_offset[e]);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                trip.emplace_back(int(off + i), int(off + j), cplx(mass(i, j), 0.0));
        sys.rhs.segment(off, m) += boundary_load(ref, mesh, e, cfg, data);
    }
    sys.matrix.resize(Eigen::Index(total), Eigen::Index(total));
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.matrix.makeCompressed();
    return sys;
}

inline Solution
monolithic_solve(const Mesh& mesh, const ProblemConfig& cfg, const ProblemData& data,
                 std::size_t max_unknowns = default_monolithic_limit)
{
    auto sys = assemble_monolithic(mesh, cfg, data, max_unknowns);
    VectorXc x = sparse_direct_solve(sys.matrix, sys.rhs);
    const auto N = Eigen::Index(sys.cell_size);
    Solution sol;
    sol.order = cfg.order;
    sol.q.resize(mesh.num_elements());
    sol.u.resize(mesh.num_elements());
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        const auto off = Eigen::Index(t) * 3 * N;
        sol.q[t] = x.segment(off, 2 * N);
        sol.u[t] = x.segment(off + 2 * N, N);
    }
    sol.trace = x.tail(x.size() - Eigen::Index(sys.interior_size));
    return sol;
}

/// Largest relative residual of the local equations over all elements.
inline double
max_element_residual(const Mesh& mesh, const ProblemConfig& cfg, const ProblemData& data, const Solution& sol)
{
    ReferenceElement ref(cfg);
    DofMap dofs(mesh, cfg.order);
    double worst = 0.0;
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        auto w = element_work(ref, mesh, t, cfg, data);
        worst = std::max(worst, local_residual(w.blocks, dofs.gather(sol.trace, t), w.load, {sol.q[t], sol.u[t]}));
    }
    return worst;
}

/**
 * Residual of the skeleton equations evaluated from the reconstructed
 * fields: flux moments from both sides of interior edges must cancel, and
 * -q^.n + uhat must match g on the boundary. Relative to the largest
 * single flux moment.
 */
inline double
transmission_residual(const Mesh& mesh, const ProblemConfig& cfg, const ProblemData& data, const Solution& sol)
{
    ReferenceElement ref(cfg);
    DofMap dofs(mesh, cfg.order);
    VectorXc balance = VectorXc::Zero(Eigen::Index(dofs.total));
    double scale = 0.0;
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        auto w = element_work(ref, mesh, t, cfg, data);
        VectorXc flux = flux_moments(w.blocks, dofs.gather(sol.trace, t), {sol.q[t], sol.u[t]});
        scale = std::max(scale, flux.cwiseAbs().maxCoeff());
        dofs.scatter_add(flux, t, balance);
    }
    Eigen::MatrixXd mass = edge_mass(ref);
    const auto m = Eigen::Index(dofs.dofs_per_edge);
    for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    {
        if (!mesh.boundary_flags[e])
            continue;
        const auto off = Eigen::Index(dofs.edge_offset[e]);
        balance.segment(off, m) = -balance.segment(off, m) + mass.cast<cplx>() * sol.trace.segment(off, m) -
                                  boundary_load(ref, mesh, e, cfg, data);
    }
    return scale > 0.0 ? balance.cwiseAbs().maxCoeff() / scale : balance.cwiseAbs().maxCoeff();
}

/// CSV of the fields at the operator quadrature points of every element.
inline void
write_solution_csv(std::ostream& os, const Mesh& mesh, const ProblemConfig& cfg, const Solution& sol)
{
    ReferenceElement ref(cfg);
    const auto N = Eigen::Index(ref.cell_size());
    auto old_precision = os.precision(17);
    os << "x,y,re_u,im_u,re_q1,im_q1,re_q2,im_q2\n";
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        auto g = element_geometry(mesh, t);
        ElementSpace space(ref.cell_basis, g);
        for (std::size_t qp = 0; qp < ref.cell_rule.size(); ++qp)
        {
            const auto& xi = ref.cell_rule.points[qp];
            Point2 x = g.map(xi);
            Eigen::VectorXcd v = space.values(xi).cast<cplx>();
            cplx u = (sol.u[t].array() * v.array()).sum();
            cplx q1 = (sol.q[t].head(N).array() * v.array()).sum();
            cplx q2 = (sol.q[t].tail(N).array() * v.array()).sum();
            os << x.x() << ',' << x.y() << ',' << u.real() << ',' << u.imag() << ',' << q1.real() << ','
               << q1.imag() << ',' << q2.real() << ',' << q2.imag() << '\n';
        }
    }
    os.precision(old_precision);
}

} // namespace hdg
