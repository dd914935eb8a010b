// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hdg {

/// Argument at which J0/J1 switch from the power series to the Hankel expansion.
inline constexpr double bessel_crossover = 12.0;
inline constexpr double bessel_max_argument = 1e4;

/// Power series sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!) in extended precision.
/// Cancellation grows like exp(x); the long double accumulator keeps the
/// result at double accuracy up to the crossover and somewhat beyond.
inline double
bessel_j_series(int order, double x)
{
    const long double half = 0.5L * x;
    const long double q = -half * half;
    long double term = (order == 0) ? 1.0L : half;
    long double sum = term;
    for (int k = 1; k < 500; ++k)
    {
        term *= q / (static_cast<long double>(k) * static_cast<long double>(k + order));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum) && std::abs(term) < 1e-22L)
            break;
    }
    return static_cast<double>(sum);
}

/// Large-argument Hankel expansion, truncated at its smallest term.
inline double
bessel_j_asymptotic(int order, double x)
{
    const double mu = 4.0 * order * order;
    double P = 1.0, Q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k)
    {
        double next = term * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
        if (std::abs(next) >= std::abs(last) && k > 2)
            break;
        term = next;
        last = next;
        // k odd feeds Q with signs +,-,+...; k even feeds P with signs -,+,-...
        if (k % 2 == 1)
            Q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        else
            P += ((k / 2) % 2 == 1 ? -1.0 : 1.0) * term;
        if (std::abs(term) < 1e-17)
            break;
    }
    // chi = x - (order/2 + 1/4) pi; expand the trig sum to avoid reducing x - const.
    const double c = std::cos(x), s = std::sin(x);
    const double r = std::numbers::sqrt2 / 2.0;
    double cos_chi, sin_chi;
    if (order == 0)
    {
        cos_chi = r * (c + s);
        sin_chi = r * (s - c);
    }
    else
    {
        cos_chi = r * (s - c);
        sin_chi = -r * (c + s);
    }
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (P * cos_chi - Q * sin_chi);
}

/// J_0 or J_1 for 0 <= x <= 1e4.
inline double
bessel_j(int order, double x)
{
    if (order != 0 && order != 1)
        throw std::invalid_argument("bessel_j: only orders 0 and 1 are implemented, got " + std::to_string(order));
    if (!(x >= 0.0))
        throw std::invalid_argument("bessel_j: negative argument");
    if (x > bessel_max_argument)
        throw std::invalid_argument("bessel_j: argument beyond 1e4");
    return x < bessel_crossover ? bessel_j_series(order, x) : bessel_j_asymptotic(order, x);
}

inline double bessel_j0(double x) { return bessel_j(0, x); }
inline double bessel_j1(double x) { return bessel_j(1, x); }

} // namespace hdg
