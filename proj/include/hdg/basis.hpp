// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hdg {

inline constexpr int max_basis_order = 10;

inline std::size_t triangle_basis_size(int order) { return std::size_t((order + 1) * (order + 2) / 2); }
inline std::size_t edge_basis_size(int order) { return std::size_t(order + 1); }

namespace detail {

inline void
check_order(int order, const char* who)
{
    if (order < 1 || order > max_basis_order)
        throw std::invalid_argument(std::string(who) + ": unsupported polynomial order " +
                                    std::to_string(order) + " (expected 1.." +
                                    std::to_string(max_basis_order) + ")");
}

/// Jacobi polynomial P_n^{(alpha,beta)}(x) and its derivative.
inline std::pair<double, double>
jacobi(int n, double alpha, double beta, double x)
{
    auto value = [](int m, double a, double b, double z) {
        if (m == 0)
            return 1.0;
        double p0 = 1.0;
        double p1 = (a + 1.0) + (a + b + 2.0) * (z - 1.0) / 2.0;
        for (int k = 1; k < m; ++k)
        {
            double s = 2.0 * k + a + b;
            double c1 = 2.0 * (k + 1) * (k + a + b + 1.0) * s;
            double c2 = (s + 1.0) * ((s + 2.0) * s * z + a * a - b * b);
            double c3 = 2.0 * (k + a) * (k + b) * (s + 2.0);
            double p2 = (c2 * p1 - c3 * p0) / c1;
            p0 = p1;
            p1 = p2;
        }
        return p1;
    };
    double v = value(n, alpha, beta, x);
    double d = n == 0 ? 0.0 : 0.5 * (n + alpha + beta + 1.0) * value(n - 1, alpha + 1.0, beta + 1.0, x);
    return {v, d};
}

} // namespace detail

/**
 * Orthonormal basis of P_p on the reference triangle {x, y >= 0, x + y <= 1}.
 *
 * Members are the collapsed-coordinate (Dubiner) products
 *   sqrt(2 (2i+1)(i+j+1)) * t^i P_i(s/t) * P_j^{(2i+1,0)}(2y-1),
 * s = 2x + y - 1, t = 1 - y, ordered by total degree i + j. The factor
 * t^i P_i(s/t) is evaluated through the homogenized Legendre recurrence so
 * values and gradients are regular at the collapsed vertex.
 */
class TriangleBasis
{
public:
    explicit TriangleBasis(int order)
        : order_(order)
    {
        detail::check_order(order, "TriangleBasis");
        for (int d = 0; d <= order; ++d)
            for (int j = 0; j <= d; ++j)
                indices_.push_back({d - j, j});
    }

    int order() const { return order_; }
    std::size_t size() const { return indices_.size(); }

    /// Values at one reference point.
    Eigen::VectorXd
    values(const Eigen::Vector2d& pt) const
    {
        Eigen::VectorXd v(size());
        Eigen::MatrixX2d g(size(), 2);
        evaluate(pt, v, g);
        return v;
    }

    /// Gradients at one reference point, row k = grad of member k.
    Eigen::MatrixX2d
    gradients(const Eigen::Vector2d& pt) const
    {
        Eigen::VectorXd v(size());
        Eigen::MatrixX2d g(size(), 2);
        evaluate(pt, v, g);
        return g;
    }

    void
    evaluate(const Eigen::Vector2d& pt, Eigen::VectorXd& vals, Eigen::MatrixX2d& grads) const
    {
        const double x = pt.x(), y = pt.y();
        const double s = 2.0 * x + y - 1.0, t = 1.0 - y;

        // L_i = t^i P_i(s/t) with gradients; ds = (2, 1), dt = (0, -1).
        std::vector<double> L(order_ + 1), Lx(order_ + 1), Ly(order_ + 1);
        L[0] = 1.0;
        Lx[0] = Ly[0] = 0.0;
        if (order_ >= 1)
        {
            L[1] = s;
            Lx[1] = 2.0;
            Ly[1] = 1.0;
        }
        for (int i = 1; i < order_; ++i)
        {
            double a = 2.0 * i + 1.0, b = double(i);
            L[i + 1] = (a * s * L[i] - b * t * t * L[i - 1]) / (i + 1.0);
            Lx[i + 1] = (a * (2.0 * L[i] + s * Lx[i]) - b * t * t * Lx[i - 1]) / (i + 1.0);
            Ly[i + 1] = (a * (L[i] + s * Ly[i]) - b * (-2.0 * t * L[i - 1] + t * t * Ly[i - 1])) / (i + 1.0);
        }

        vals.resize(size());
        grads.resize(size(), 2);
        for (std::size_t k = 0; k < indices_.size(); ++k)
        {
            auto [i, j] = indices_[k];
            double scale = std::sqrt(2.0 * (2.0 * i + 1.0) * (i + j + 1.0));
            auto [P, dP] = detail::jacobi(j, 2.0 * i + 1.0, 0.0, 2.0 * y - 1.0);
            vals[k] = scale * L[i] * P;
            grads(k, 0) = scale * Lx[i] * P;
            grads(k, 1) = scale * (Ly[i] * P + L[i] * 2.0 * dP);
        }
    }

private:
    int                              order_;
    std::vector<std::pair<int, int>> indices_;
};

/// Orthonormal Legendre basis sqrt(2k+1) P_k(2t-1) on [0, 1].
class EdgeBasis
{
public:
    explicit EdgeBasis(int order)
        : order_(order)
    {
        detail::check_order(order, "EdgeBasis");
    }

    int order() const { return order_; }
    std::size_t size() const { return std::size_t(order_ + 1); }

    Eigen::VectorXd
    values(double t) const
    {
        Eigen::VectorXd v(size());
        double z = 2.0 * t - 1.0;
        double p0 = 1.0, p1 = z;
        v[0] = 1.0;
        if (order_ >= 1)
            v[1] = std::sqrt(3.0) * z;
        for (int k = 1; k < order_; ++k)
        {
            double p2 = ((2.0 * k + 1.0) * z * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
            v[k + 1] = std::sqrt(2.0 * k + 3.0) * p2;
        }
        return v;
    }

private:
    int order_;
};

/// Values (npoints x dim) and gradient components at reference points.
struct TriangleBasisTable
{
    Eigen::MatrixXd values;
    Eigen::MatrixXd d_dx;
    Eigen::MatrixXd d_dy;
};

inline TriangleBasisTable
triangle_basis_eval(int order, std::span<const Eigen::Vector2d> points)
{
    TriangleBasis basis(order);
    TriangleBasisTable table;
    const auto np = Eigen::Index(points.size());
    const auto nb = Eigen::Index(basis.size());
    table.values.resize(np, nb);
    table.d_dx.resize(np, nb);
    table.d_dy.resize(np, nb);
    Eigen::VectorXd v;
    Eigen::MatrixX2d g;
    for (Eigen::Index q = 0; q < np; ++q)
    {
        const auto& pt = points[q];
        if (pt.x() < -1e-12 || pt.y() < -1e-12 || pt.x() + pt.y() > 1.0 + 1e-12)
            throw std::invalid_argument("triangle_basis_eval: point outside the reference triangle");
        basis.evaluate(pt, v, g);
        table.values.row(q) = v.transpose();
        table.d_dx.row(q) = g.col(0).transpose();
        table.d_dy.row(q) = g.col(1).transpose();
    }
    return table;
}

inline Eigen::MatrixXd
edge_basis_eval(int order, std::span<const double> points)
{
    EdgeBasis basis(order);
    Eigen::MatrixXd table(Eigen::Index(points.size()), Eigen::Index(basis.size()));
    for (std::size_t q = 0; q < points.size(); ++q)
    {
        if (points[q] < -1e-12 || points[q] > 1.0 + 1e-12)
            throw std::invalid_argument("edge_basis_eval: point outside [0, 1]");
        table.row(Eigen::Index(q)) = basis.values(points[q]).transpose();
    }
    return table;
}

} // namespace hdg
