// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hdg {

using Point2 = Eigen::Vector2d;

/// One side of an edge: the element touching it and which of its faces it is.
struct EdgeIncidence
{
    std::size_t element;
    int         local_face;
};

/**
 * Conforming triangulation of a polygonal domain.
 *
 * Triangles are positively oriented. Local face k joins local vertices k and
 * (k+1)%3. Edges are stored with v0 < v1; this fixes the parametrization
 * t in [0,1] (t = 0 at v0) shared by both neighbours of an interior edge.
 */
struct Mesh
{
    std::vector<Point2>                            vertices;
    std::vector<std::array<std::size_t, 3>>        triangles;
    std::vector<std::array<std::size_t, 2>>        edges;
    std::vector<std::vector<EdgeIncidence>>        edge_to_elements;
    std::vector<bool>                              boundary_flags;
    std::vector<std::array<std::size_t, 3>>        element_edges;
    double                                         h_global = 0.0;
    std::vector<double>                            h_per_element;

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_elements() const { return triangles.size(); }
    std::size_t num_edges() const { return edges.size(); }

    std::size_t
    num_boundary_edges() const
    {
        std::size_t count = 0;
        for (bool b : boundary_flags)
            count += b ? 1 : 0;
        return count;
    }
};

/// Geometry of one face of an element, as seen from that element.
struct FaceGeometry
{
    std::size_t edge;
    Point2      normal;    // outward, unit length
    double      length;
    bool        flipped;   // local traversal runs from the edge's v1 to v0
};

/// Affine map x = origin + jacobian * xi from the reference triangle
/// {xi >= 0, eta >= 0, xi + eta <= 1} onto the element.
struct ElementGeometry
{
    std::array<Point2, 3>       vertices;
    double                      area = 0.0;
    double                      diameter = 0.0;
    Eigen::Matrix2d             jacobian;
    Eigen::Matrix2d             inverse_jacobian;
    double                      det_jacobian = 0.0;
    std::array<FaceGeometry, 3> faces;

    Point2 map(const Point2& ref) const { return vertices[0] + jacobian * ref; }
    Point2 inverse_map(const Point2& x) const { return inverse_jacobian * (x - vertices[0]); }

    /// Reference point on local face f at face parameter s (s = 0 at local vertex f).
    static Point2
    face_point(int f, double s)
    {
        switch (f)
        {
            case 0: return Point2(s, 0.0);
            case 1: return Point2(1.0 - s, s);
            default: return Point2(0.0, 1.0 - s);
        }
    }

    /// Parameter along the global edge for face parameter s.
    double edge_parameter(int f, double s) const { return faces[f].flipped ? 1.0 - s : s; }

    Point2
    centroid() const
    {
        return (vertices[0] + vertices[1] + vertices[2]) / 3.0;
    }
};

namespace detail {

inline double
triangle_signed_area(const Point2& a, const Point2& b, const Point2& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

} // namespace detail

/// Fill edges, incidences, boundary flags and sizes from vertices + triangles.
inline void
finalize_mesh(Mesh& mesh)
{
    mesh.edges.clear();
    mesh.edge_to_elements.clear();
    mesh.boundary_flags.clear();
    mesh.element_edges.assign(mesh.triangles.size(), {0, 0, 0});
    mesh.h_per_element.assign(mesh.triangles.size(), 0.0);
    mesh.h_global = 0.0;

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> lookup;
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e)
    {
        const auto& tri = mesh.triangles[e];
        if (detail::triangle_signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                         mesh.vertices[tri[2]]) <= 0.0)
            throw std::invalid_argument("triangle " + std::to_string(e) + " is not positively oriented");

        double diam = 0.0;
        for (int f = 0; f < 3; ++f)
        {
            std::size_t a = tri[f], b = tri[(f + 1) % 3];
            auto key = std::minmax(a, b);
            auto [it, inserted] = lookup.try_emplace({key.first, key.second}, mesh.edges.size());
            if (inserted)
            {
                mesh.edges.push_back({key.first, key.second});
                mesh.edge_to_elements.emplace_back();
            }
            mesh.edge_to_elements[it->second].push_back({e, f});
            mesh.element_edges[e][f] = it->second;
            diam = std::max(diam, (mesh.vertices[a] - mesh.vertices[b]).norm());
        }
        mesh.h_per_element[e] = diam;
        mesh.h_global = std::max(mesh.h_global, diam);
    }

    mesh.boundary_flags.resize(mesh.edges.size());
    for (std::size_t i = 0; i < mesh.edges.size(); ++i)
    {
        auto n = mesh.edge_to_elements[i].size();
        if (n > 2)
            throw std::invalid_argument("non-manifold edge " + std::to_string(i));
        mesh.boundary_flags[i] = (n == 1);
    }
}

/**
 * Uniform n x n grid on [-0.5, 0.5]^2, each cell cut along its
 * lower-left to upper-right diagonal.
 */
inline Mesh
build_structured_mesh(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("build_structured_mesh: n must be at least 1");

    Mesh mesh;
    const std::size_t nv = n + 1;
    mesh.vertices.reserve(nv * nv);
    for (std::size_t j = 0; j < nv; ++j)
        for (std::size_t i = 0; i < nv; ++i)
            mesh.vertices.emplace_back(-0.5 + double(i) / double(n), -0.5 + double(j) / double(n));

    mesh.triangles.reserve(2 * n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
        {
            std::size_t a = j * nv + i;
            std::size_t b = a + 1;
            std::size_t c = a + nv + 1;
            std::size_t d = a + nv;
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }

    finalize_mesh(mesh);
    // The diagonal is the longest side; use its exact value so h(2n) = h(n)/2 holds exactly.
    mesh.h_global = std::sqrt(2.0) / double(n);
    for (auto& h : mesh.h_per_element)
        h = mesh.h_global;
    return mesh;
}

inline ElementGeometry
element_geometry(const Mesh& mesh, std::size_t elem)
{
    if (elem >= mesh.num_elements())
        throw std::out_of_range("element_geometry: element " + std::to_string(elem) + " out of range");

    ElementGeometry g;
    const auto& tri = mesh.triangles[elem];
    for (int k = 0; k < 3; ++k)
        g.vertices[k] = mesh.vertices[tri[k]];

    g.jacobian.col(0) = g.vertices[1] - g.vertices[0];
    g.jacobian.col(1) = g.vertices[2] - g.vertices[0];
    g.det_jacobian = g.jacobian.determinant();
    g.area = 0.5 * std::abs(g.det_jacobian);
    if (g.area <= 1e-14)
        throw std::invalid_argument("element_geometry: degenerate element " + std::to_string(elem));
    g.inverse_jacobian = g.jacobian.inverse();
    g.diameter = mesh.h_per_element[elem];

    for (int f = 0; f < 3; ++f)
    {
        const Point2& a = g.vertices[f];
        const Point2& b = g.vertices[(f + 1) % 3];
        Point2 tangent = b - a;
        auto& face = g.faces[f];
        face.length = tangent.norm();
        face.normal = Point2(tangent.y(), -tangent.x()) / face.length;
        face.edge = mesh.element_edges[elem][f];
        face.flipped = (mesh.edges[face.edge][0] != tri[f]);
    }
    return g;
}

/// Plain-text dump: vertices, triangles and edges sections.
inline void
write_mesh(std::ostream& os, const Mesh& mesh)
{
    auto old_precision = os.precision(17);
    os << "vertices " << mesh.num_vertices() << '\n';
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
        os << i << ' ' << mesh.vertices[i].x() << ' ' << mesh.vertices[i].y() << '\n';
    os << "triangles " << mesh.num_elements() << '\n';
    for (std::size_t i = 0; i < mesh.num_elements(); ++i)
    {
        const auto& t = mesh.triangles[i];
        os << i << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    os << "edges " << mesh.num_edges() << '\n';
    for (std::size_t i = 0; i < mesh.num_edges(); ++i)
        os << i << ' ' << mesh.edges[i][0] << ' ' << mesh.edges[i][1] << ' '
           << (mesh.boundary_flags[i] ? 1 : 0) << '\n';
    os.precision(old_precision);
}

} // namespace hdg
