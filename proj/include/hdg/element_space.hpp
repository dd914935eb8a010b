// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "hdg/basis.hpp"
#include "hdg/mesh.hpp"
#include "hdg/quadrature.hpp"

namespace hdg {

using cplx = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/**
 * Reference bases pushed forward to one element or edge.
 *
 * Element functions are phi_hat(F^{-1} x) / sqrt(|det J|), edge functions
 * psi_hat(t) / sqrt(length); both families are L2-orthonormal on the
 * physical cell, so mass matrices are identities and projections are plain
 * inner products.
 */
struct ElementSpace
{
    const TriangleBasis*   basis;
    const ElementGeometry* geom;
    double                 scale;

    ElementSpace(const TriangleBasis& b, const ElementGeometry& g)
        : basis(&b), geom(&g), scale(1.0 / std::sqrt(std::abs(g.det_jacobian)))
    {}

    std::size_t size() const { return basis->size(); }

    /// Values and physical gradients at a reference point.
    void
    evaluate(const Point2& ref, Eigen::VectorXd& vals, Eigen::MatrixX2d& grads) const
    {
        basis->evaluate(ref, vals, grads);
        vals *= scale;
        // grad_x = J^{-T} grad_xi, applied row-wise.
        grads = (grads * geom->inverse_jacobian) * scale;
    }

    Eigen::VectorXd
    values(const Point2& ref) const
    {
        return basis->values(ref) * scale;
    }

    /// Quadrature weight of a reference-triangle rule entry in physical measure.
    double weight(double ref_weight) const { return ref_weight * std::abs(geom->det_jacobian); }
};

/// Values of the edge basis on a physical edge of the given length.
inline Eigen::VectorXd
edge_values(const EdgeBasis& basis, double length, double t)
{
    return basis.values(t) / std::sqrt(length);
}

/// Evaluate sum_k c_k phi_k at a reference point.
inline cplx
evaluate_field(const ElementSpace& space, const VectorXc& coeffs, const Point2& ref)
{
    Eigen::VectorXd v = space.values(ref);
    return (coeffs.array() * v.array().cast<cplx>()).sum();
}

} // namespace hdg
