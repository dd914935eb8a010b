// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "hdg/mesh.hpp"

using namespace hdg;

TEST(Mesh, SingleSquareCounts)
{
    Mesh m = build_structured_mesh(1);
    EXPECT_EQ(m.num_vertices(), 4u);
    EXPECT_EQ(m.num_elements(), 2u);
    EXPECT_EQ(m.num_edges(), 5u);
    EXPECT_EQ(m.num_boundary_edges(), 4u);
}

TEST(Mesh, TwoByTwoEuler)
{
    Mesh m = build_structured_mesh(2);
    EXPECT_EQ(m.num_vertices(), 9u);
    EXPECT_EQ(m.num_elements(), 8u);
    EXPECT_EQ(m.num_edges(), 16u);
    EXPECT_EQ(long(m.num_vertices()) - long(m.num_edges()) + long(m.num_elements()), 1);
}

TEST(Mesh, EulerAndIncidenceForSeveralSizes)
{
    for (std::size_t n : {1u, 3u, 7u, 16u})
    {
        Mesh m = build_structured_mesh(n);
        EXPECT_EQ(long(m.num_vertices()) - long(m.num_edges()) + long(m.num_elements()), 1) << n;
        EXPECT_EQ(m.num_boundary_edges(), 4 * n);
        for (std::size_t e = 0; e < m.num_edges(); ++e)
        {
            EXPECT_LT(m.edges[e][0], m.edges[e][1]);
            EXPECT_EQ(m.edge_to_elements[e].size(), m.boundary_flags[e] ? 1u : 2u);
        }
    }
}

TEST(Mesh, GlobalSize)
{
    EXPECT_NEAR(build_structured_mesh(4).h_global, 0.35355339, 1e-8);
    for (std::size_t n : {1u, 2u, 5u, 32u})
        EXPECT_EQ(build_structured_mesh(2 * n).h_global, build_structured_mesh(n).h_global / 2.0);
}

TEST(Mesh, AreasSumToOne)
{
    for (std::size_t n : {1u, 4u, 9u})
    {
        Mesh m = build_structured_mesh(n);
        double a = 0.0;
        for (std::size_t t = 0; t < m.num_elements(); ++t)
            a += element_geometry(m, t).area;
        EXPECT_NEAR(a, 1.0, 1e-12);
    }
}

TEST(Mesh, ElementGeometry)
{
    Mesh m1 = build_structured_mesh(1);
    EXPECT_DOUBLE_EQ(element_geometry(m1, 0).area, 0.5);

    Mesh m2 = build_structured_mesh(2);
    for (std::size_t t = 0; t < m2.num_elements(); ++t)
    {
        auto g = element_geometry(m2, t);
        EXPECT_DOUBLE_EQ(g.diameter, std::sqrt(2.0) / 2.0);
        EXPECT_NEAR(std::abs(g.det_jacobian), 2.0 * g.area, 1e-15);
        EXPECT_GT(g.det_jacobian, 0.0);
        Eigen::Matrix2d id = g.jacobian * g.inverse_jacobian;
        EXPECT_NEAR((id - Eigen::Matrix2d::Identity()).norm(), 0.0, 1e-14);
    }
}

TEST(Mesh, NormalsAreOutwardAndClose)
{
    Mesh m = build_structured_mesh(5);
    for (std::size_t t = 0; t < m.num_elements(); ++t)
    {
        auto g = element_geometry(m, t);
        Point2 sum = Point2::Zero();
        for (int f = 0; f < 3; ++f)
        {
            const auto& face = g.faces[f];
            Point2 a = g.vertices[f], b = g.vertices[(f + 1) % 3];
            EXPECT_NEAR(face.normal.norm(), 1.0, 1e-14);
            EXPECT_NEAR(face.normal.dot(b - a), 0.0, 1e-14);
            EXPECT_GT(face.normal.dot(0.5 * (a + b) - g.centroid()), 0.0);
            sum += face.length * face.normal;
        }
        EXPECT_NEAR(sum.norm(), 0.0, 1e-14);
    }
}

TEST(Mesh, MapRoundTrip)
{
    Mesh m = build_structured_mesh(3);
    auto g = element_geometry(m, 7);
    Point2 r(0.2, 0.3);
    EXPECT_NEAR((g.inverse_map(g.map(r)) - r).norm(), 0.0, 1e-14);
    EXPECT_NEAR((g.map(Point2(0, 0)) - g.vertices[0]).norm(), 0.0, 0.0);
    EXPECT_NEAR((g.map(Point2(1, 0)) - g.vertices[1]).norm(), 0.0, 1e-15);
    EXPECT_NEAR((g.map(Point2(0, 1)) - g.vertices[2]).norm(), 0.0, 1e-15);
}

// Both sides of an interior edge must see the same physical point for a
// given edge parameter.
TEST(Mesh, SharedEdgeOrientation)
{
    Mesh m = build_structured_mesh(4);
    for (std::size_t e = 0; e < m.num_edges(); ++e)
    {
        if (m.boundary_flags[e])
            continue;
        const Point2& a = m.vertices[m.edges[e][0]];
        const Point2& b = m.vertices[m.edges[e][1]];
        for (const auto& inc : m.edge_to_elements[e])
        {
            auto g = element_geometry(m, inc.element);
            EXPECT_EQ(g.faces[inc.local_face].edge, e);
            for (double s : {0.0, 0.21, 0.5, 0.93})
            {
                Point2 x = g.map(ElementGeometry::face_point(inc.local_face, s));
                double t = g.edge_parameter(inc.local_face, s);
                EXPECT_NEAR((x - (a + t * (b - a))).norm(), 0.0, 1e-14);
            }
        }
    }
}

TEST(Mesh, DiagonalDirection)
{
    // lower-left to upper-right in every cell
    Mesh m = build_structured_mesh(3);
    std::set<std::pair<long, long>> dirs;
    for (std::size_t e = 0; e < m.num_edges(); ++e)
    {
        Point2 d = m.vertices[m.edges[e][1]] - m.vertices[m.edges[e][0]];
        if (std::abs(d.x()) > 1e-12 && std::abs(d.y()) > 1e-12)
            dirs.insert({std::lround(d.x() * 3), std::lround(d.y() * 3)});
    }
    ASSERT_EQ(dirs.size(), 1u);
    EXPECT_EQ(dirs.begin()->first * dirs.begin()->second, 1);
}

TEST(Mesh, Errors)
{
    EXPECT_THROW(build_structured_mesh(0), std::invalid_argument);
    Mesh m = build_structured_mesh(2);
    EXPECT_THROW(element_geometry(m, 8), std::out_of_range);

    Mesh bad;
    bad.vertices = {Point2(0, 0), Point2(1, 0), Point2(2, 0)};
    bad.triangles = {{0, 1, 2}};
    EXPECT_THROW(finalize_mesh(bad), std::invalid_argument);
}

TEST(Mesh, Dump)
{
    std::ostringstream os;
    write_mesh(os, build_structured_mesh(1));
    std::string s = os.str();
    EXPECT_NE(s.find("vertices 4"), std::string::npos);
    EXPECT_NE(s.find("triangles 2"), std::string::npos);
    EXPECT_NE(s.find("edges 5"), std::string::npos);
}
