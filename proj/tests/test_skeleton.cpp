// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "hdg/analytic.hpp"
#include "hdg/skeleton.hpp"
#include "hdg/verify.hpp"

using namespace hdg;

TEST(DofMap, CountsAndRoundTrip)
{
    Mesh mesh = build_structured_mesh(1);
    DofMap d(mesh, 1);
    EXPECT_EQ(d.total, 10u);
    EXPECT_EQ(d.local_size(), 6u);

    Mesh m3 = build_structured_mesh(3);
    DofMap d3(m3, 2);
    std::vector<int> hits(d3.total, 0);
    for (std::size_t e = 0; e < m3.num_edges(); ++e)
        for (std::size_t k = 0; k < d3.dofs_per_edge; ++k)
            ++hits[d3.edge_offset[e] + k];
    for (int h : hits)
        EXPECT_EQ(h, 1);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    VectorXc g(Eigen::Index(d3.total));
    for (Eigen::Index i = 0; i < g.size(); ++i)
        g[i] = cplx(nd(rng), nd(rng));
    // gather then scatter counts each dof once per incident element
    VectorXc back = VectorXc::Zero(g.size());
    for (std::size_t t = 0; t < m3.num_elements(); ++t)
        d3.scatter_add(d3.gather(g, t), t, back);
    for (std::size_t e = 0; e < m3.num_edges(); ++e)
        for (std::size_t k = 0; k < d3.dofs_per_edge; ++k)
        {
            auto i = Eigen::Index(d3.edge_offset[e] + k);
            EXPECT_EQ(back[i], g[i] * double(m3.edge_to_elements[e].size()));
        }
}

TEST(DofMap, OrientationMismatchDetected)
{
    Mesh mesh = build_structured_mesh(2);
    EXPECT_NO_THROW(check_orientation(mesh));
    std::swap(mesh.element_edges[0][0], mesh.element_edges[0][1]);
    EXPECT_THROW(check_orientation(mesh), std::logic_error);
}

TEST(Skeleton, ZeroDataGivesZero)
{
    Mesh mesh = build_structured_mesh(4);
    auto cfg = make_problem_config(mesh, 20.0, 2);
    auto sys = assemble_skeleton(mesh, cfg, zero_data());
    EXPECT_EQ(sys.rhs.cwiseAbs().maxCoeff(), 0.0);
    auto sol = solve_condensed(mesh, cfg, zero_data());
    EXPECT_EQ(sol.trace.cwiseAbs().maxCoeff(), 0.0);
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    {
        EXPECT_EQ(sol.q[t].cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(sol.u[t].cwiseAbs().maxCoeff(), 0.0);
    }
    auto mono = monolithic_solve(mesh, cfg, zero_data());
    EXPECT_EQ(mono.trace.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Skeleton, MatrixIsSchurComplementOfMonolithic)
{
    Mesh mesh = build_structured_mesh(2);
    auto cfg = make_problem_config(mesh, 5.0, 1);
    auto data = BenchmarkData(5.0).problem_data();
    auto sys = assemble_skeleton(mesh, cfg, data);
    auto mono = assemble_monolithic(mesh, cfg, data);
    MatrixXc M(mono.matrix);
    const auto ni = Eigen::Index(mono.interior_size), nt = M.rows() - ni;
    ASSERT_EQ(nt, Eigen::Index(sys.dofs.total));
    Eigen::PartialPivLU<MatrixXc> lu(M.topLeftCorner(ni, ni));
    MatrixXc schur = M.bottomRightCorner(nt, nt) - M.bottomLeftCorner(nt, ni) * lu.solve(M.topRightCorner(ni, nt));
    VectorXc rhs = mono.rhs.tail(nt) - M.bottomLeftCorner(nt, ni) * lu.solve(mono.rhs.head(ni));
    MatrixXc A(sys.matrix);
    EXPECT_LT((A - schur).cwiseAbs().maxCoeff(), 1e-10 * schur.cwiseAbs().maxCoeff());
    EXPECT_LT((sys.rhs - rhs).cwiseAbs().maxCoeff(), 1e-10 * rhs.cwiseAbs().maxCoeff());
}

TEST(Skeleton, SparsityFollowsElements)
{
    Mesh mesh = build_structured_mesh(3);
    auto cfg = make_problem_config(mesh, 5.0, 1);
    auto sys = assemble_skeleton(mesh, cfg, BenchmarkData(5.0).problem_data());
    std::set<std::pair<std::size_t, std::size_t>> allowed;
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
        for (auto a : mesh.element_edges[t])
            for (auto b : mesh.element_edges[t])
                allowed.insert({a, b});
    const std::size_t m = sys.dofs.dofs_per_edge;
    for (int k = 0; k < sys.matrix.outerSize(); ++k)
        for (SparseMatrixXc::InnerIterator it(sys.matrix, k); it; ++it)
            EXPECT_TRUE(allowed.count({std::size_t(it.row()) / m, std::size_t(it.col()) / m}));
    // no empty rows
    MatrixXc A(sys.matrix);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        EXPECT_GT(A.row(i).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Skeleton, SolveResidualAndReconstruction)
{
    for (int p = 1; p <= 3; ++p)
    {
        Mesh mesh = build_structured_mesh(8);
        auto cfg = make_problem_config(mesh, 20.0, p);
        auto data = BenchmarkData(20.0).problem_data();
        auto sys = assemble_skeleton(mesh, cfg, data);
        VectorXc x = solve_skeleton(sys);
        EXPECT_LE(relative_residual(sys.matrix, x, sys.rhs), 1e-10);
        auto sol = reconstruct_interior(mesh, cfg, x, data);
        EXPECT_LE(max_element_residual(mesh, cfg, data, sol), 1e-9);
        EXPECT_LE(transmission_residual(mesh, cfg, data, sol), 1e-9);
    }
}

TEST(Skeleton, Deterministic)
{
    Mesh mesh = build_structured_mesh(8);
    auto cfg = make_problem_config(mesh, 20.0, 1);
    auto data = BenchmarkData(20.0).problem_data();
    auto a = solve_condensed(mesh, cfg, data);
    auto b = solve_condensed(mesh, cfg, data);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (Eigen::Index i = 0; i < a.trace.size(); ++i)
        EXPECT_EQ(a.trace[i], b.trace[i]);
    for (std::size_t t = 0; t < mesh.num_elements(); ++t)
        EXPECT_TRUE(a.u[t] == b.u[t] && a.q[t] == b.q[t]);
}

TEST(Monolithic, CountsAndGuard)
{
    Mesh mesh = build_structured_mesh(1);
    auto cfg = make_problem_config(mesh, 5.0, 1);
    auto data = BenchmarkData(5.0).problem_data();
    auto sys = assemble_monolithic(mesh, cfg, data);
    EXPECT_EQ(sys.matrix.rows(), 28);
    EXPECT_EQ(sys.interior_size, 18u);
    try
    {
        assemble_monolithic(mesh, cfg, data, 27);
        FAIL() << "guard did not trigger";
    }
    catch (const std::length_error& e)
    {
        EXPECT_NE(std::string(e.what()).find("size guard"), std::string::npos);
    }
    Mesh big = build_structured_mesh(200);
    auto cfg_big = make_problem_config(big, 5.0, 1);
    EXPECT_THROW(assemble_monolithic(big, cfg_big, data), std::length_error);
}

TEST(Monolithic, ResidualAndAgreement)
{
    for (double k : {5.0, 20.0})
        for (int p : {1, 2})
            for (std::size_t n : {1u, 2u})
            {
                Mesh mesh = build_structured_mesh(n);
                auto cfg = make_problem_config(mesh, k, p);
                auto data = BenchmarkData(k).problem_data();
                auto sys = assemble_monolithic(mesh, cfg, data);
                VectorXc x = sparse_direct_solve(sys.matrix, sys.rhs);
                EXPECT_LE(relative_residual(sys.matrix, x, sys.rhs), 1e-10);
                EXPECT_LE(oracle_deviation(k, p, n), 1e-8) << k << " " << p << " " << n;
            }
}

TEST(Monolithic, MatchesCondensedAtModerateSize)
{
    EXPECT_LE(oracle_deviation(5.0, 1, 2), 1e-8);
    EXPECT_LE(oracle_deviation(20.0, 3, 6), 1e-8);
}

TEST(SparseSolve, ZeroRightHandSide)
{
    Mesh mesh = build_structured_mesh(2);
    auto cfg = make_problem_config(mesh, 5.0, 1);
    auto sys = assemble_skeleton(mesh, cfg, BenchmarkData(5.0).problem_data());
    VectorXc x = sparse_direct_solve(sys.matrix, VectorXc::Zero(sys.rhs.size()));
    EXPECT_EQ(x.cwiseAbs().maxCoeff(), 0.0);

    SparseMatrixXc singular(3, 3);
    singular.insert(0, 0) = 1.0;
    singular.makeCompressed();
    EXPECT_THROW(sparse_direct_solve(singular, VectorXc::Ones(3)), SingularSystemError);
}

TEST(SolutionDump, Format)
{
    Mesh mesh = build_structured_mesh(1);
    auto cfg = make_problem_config(mesh, 5.0, 1);
    auto sol = solve_condensed(mesh, cfg, BenchmarkData(5.0).problem_data());
    std::ostringstream os;
    write_solution_csv(os, mesh, cfg, sol);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x,y,re_u,im_u,re_q1,im_q1,re_q2,im_q2");
    std::size_t rows = 0;
    while (std::getline(is, line))
        ++rows;
    EXPECT_EQ(rows, mesh.num_elements() * quadrature_rule(QuadratureDomain::triangle, 2).size());
}
