// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "hdg/pipeline.hpp"

using namespace hdg;

TEST(StudyLines, MeshSelection)
{
    EXPECT_EQ(n_fixed_kh(10, 1, 1.1), 13u);
    EXPECT_EQ(n_fixed_kh(20, 1, 1.1), 26u);
    EXPECT_EQ(n_fixed_kh(40, 1, 1.1), 51u);
    EXPECT_EQ(n_fixed_k3h2(10, 1, 1.1), 43u);
    EXPECT_EQ(n_fixed_k3h2(20, 1, 1.1), 121u);
    EXPECT_EQ(n_fixed_k3h2(40, 1, 1.1), 341u);
    for (double k : {10.0, 20.0, 40.0})
    {
        double h = std::sqrt(2.0) / double(n_fixed_kh(k, 1, 1.1));
        EXPECT_NEAR(k * h, 1.1, 0.05);
        h = std::sqrt(2.0) / double(n_fixed_k3h2(k, 1, 1.1));
        EXPECT_NEAR(k * k * k * h * h, 1.1, 0.03);
    }
    EXPECT_EQ(n_for_h(10.0), 1u);
    EXPECT_THROW(n_for_h(0.0), std::invalid_argument);
}

TEST(RunCase, ContractsHold)
{
    auto r = run_case(20.0, 2, 8);
    EXPECT_TRUE(r.ok());
    EXPECT_LE(r.skeleton_residual, 1e-10);
    EXPECT_EQ(r.errors.n, 8u);
    EXPECT_EQ(r.errors.dofs, (3u * 64u + 16u) * 3u);
    EXPECT_EQ(r.errors.seconds, 0.0);
    EXPECT_GT(r.wall_seconds, 0.0);

    RunOptions timed;
    timed.record_timing = true;
    EXPECT_GT(run_case(20.0, 1, 4, timed).errors.seconds, 0.0);
}

TEST(RunCase, ToleranceViolationIsReported)
{
    RunOptions strict;
    strict.energy_tolerance = 0.0;
    strict.residual_tolerance = 0.0;
    auto r = run_case(20.0, 1, 8, strict);
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(r.failures.size(), 2u);
}

TEST(RunCase, SizeGuard)
{
    RunOptions opt;
    opt.max_skeleton_dofs = 100;
    try
    {
        run_case(5.0, 1, 8, opt);
        FAIL();
    }
    catch (const std::length_error& e)
    {
        EXPECT_NE(std::string(e.what()).find("max-skeleton-dofs"), std::string::npos);
    }
    EXPECT_NO_THROW(check_skeleton_guard(8, 1, 416));
    EXPECT_THROW(check_skeleton_guard(8, 1, 415), std::length_error);
}

TEST(Sweep, GroupsAndOrdering)
{
    SweepSpec spec;
    spec.kappas = {5.0, 10.0};
    spec.orders = {1, 2};
    spec.ns = {8, 4, 8};
    auto groups = run_sweep(spec);
    ASSERT_EQ(groups.size(), 4u);
    EXPECT_EQ(groups[0].kappa, 5.0);
    EXPECT_EQ(groups[1].order, 2);
    for (const auto& g : groups)
    {
        ASSERT_EQ(g.cases.size(), 2u);
        EXPECT_EQ(g.cases[0].errors.n, 4u);
        EXPECT_EQ(g.cases[1].errors.n, 8u);
    }

    SweepSpec fixed;
    fixed.kappas = {20.0, 10.0};
    fixed.orders = {1};
    fixed.line = StudyLine::fixed_kh;
    auto pol = run_sweep(fixed);
    ASSERT_EQ(pol.size(), 1u);
    EXPECT_EQ(pol[0].cases[0].errors.kappa, 10.0);
    EXPECT_EQ(pol[0].cases[1].errors.n, 26u);
}

TEST(Sweep, WorkersDoNotChangeResults)
{
    SweepSpec spec;
    spec.kappas = {20.0};
    spec.orders = {1, 2};
    spec.ns = {4, 8, 16};
    auto a = run_sweep(spec);
    spec.workers = 3;
    auto b = run_sweep(spec);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t g = 0; g < a.size(); ++g)
        for (std::size_t c = 0; c < a[g].cases.size(); ++c)
        {
            EXPECT_EQ(a[g].cases[c].errors.e_u, b[g].cases[c].errors.e_u);
            EXPECT_EQ(a[g].cases[c].errors.e_trace, b[g].cases[c].errors.e_trace);
        }
}

TEST(Sweep, InvalidSpecs)
{
    SweepSpec spec;
    EXPECT_THROW(run_sweep(spec), std::invalid_argument);
    spec.kappas = {5.0};
    spec.orders = {1};
    EXPECT_THROW(run_sweep(spec), std::invalid_argument);
    spec.ns = {8};
    RunOptions opt;
    opt.max_skeleton_dofs = 10;
    EXPECT_THROW(run_sweep(spec, opt), std::length_error);
}
