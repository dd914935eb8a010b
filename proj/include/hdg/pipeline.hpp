// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hdg/analytic.hpp"
#include "hdg/diagnostics.hpp"
#include "hdg/local.hpp"
#include "hdg/mesh.hpp"
#include "hdg/skeleton.hpp"

namespace hdg {

inline constexpr std::size_t default_skeleton_limit = 4'000'000;

struct RunOptions
{
    TauRule           tau_rule = TauRule::p_over_kappa_h;
    double            constant_tau = 1.0;
    QuadratureOptions quadrature;
    std::size_t       max_skeleton_dofs = default_skeleton_limit;
    double            residual_tolerance = 1e-10;
    double            energy_tolerance = 1e-9;
    bool              record_timing = false; // wall time in ErrorReport::seconds
};

/// One benchmark solve with its diagnostics and contract outcomes.
struct CaseResult
{
    ErrorReport              errors;
    EnergyReport             energy;
    ProblemConfig            config;
    double                   skeleton_residual = 0.0;
    double                   stability_ratio = 0.0;
    double                   wall_seconds = 0.0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

/// Throws std::length_error naming the guard when the skeleton would be too large.
inline void
check_skeleton_guard(std::size_t n, int order, std::size_t limit)
{
    // structured mesh: 3n^2 + 2n edges
    const std::size_t dofs = (3 * n * n + 2 * n) * edge_basis_size(order);
    if (dofs > limit)
        throw std::length_error("refusing n=" + std::to_string(n) + ", p=" + std::to_string(order) + ": " +
                                std::to_string(dofs) + " skeleton dofs exceed max-skeleton-dofs (" +
                                std::to_string(limit) + ")");
}

inline CaseResult
run_case(double kappa, int order, std::size_t n, const RunOptions& opt = {})
{
    check_skeleton_guard(n, order, opt.max_skeleton_dofs);
    auto t0 = std::chrono::steady_clock::now();

    Mesh mesh = build_structured_mesh(n);
    CaseResult res;
    res.config = make_problem_config(mesh, kappa, order, opt.tau_rule, opt.constant_tau, opt.quadrature);
    BenchmarkData bench(kappa);
    ProblemData data = bench.problem_data();

    auto sys = assemble_skeleton(mesh, res.config, data);
    VectorXc trace = sparse_direct_solve(sys.matrix, sys.rhs, std::numeric_limits<double>::infinity());
    res.skeleton_residual = relative_residual(sys.matrix, trace, sys.rhs);
    Solution sol = reconstruct_interior(mesh, res.config, trace, data);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    res.errors = compute_errors(mesh, res.config, sol, bench.exact());
    res.errors.n = n;
    res.errors.dofs = sys.dofs.total;
    res.errors.seconds = opt.record_timing ? res.wall_seconds : 0.0;
    res.energy = energy_identity_residual(mesh, res.config, data, sol);
    res.stability_ratio = res.energy.stability_ratio(kappa, mesh.h_global, order);

    if (!(res.skeleton_residual <= opt.residual_tolerance))
        res.failures.push_back("skeleton residual " + std::to_string(res.skeleton_residual));
    if (!(std::max(res.energy.re_residual, res.energy.im_residual) <= opt.energy_tolerance))
        res.failures.push_back("energy identity residual " +
                               std::to_string(std::max(res.energy.re_residual, res.energy.im_residual)));
    if (!res.energy.trace_bound_holds())
        res.failures.push_back("trace bound violated");
    return res;
}

enum class StudyLine
{
    explicit_n, // the given n list
    fixed_kh,   // kappa h / p = target
    fixed_k3h2, // kappa^3 h^2 / p^2 = target
};

inline std::string
to_string(StudyLine line)
{
    switch (line)
    {
    case StudyLine::fixed_kh: return "fixed-kh";
    case StudyLine::fixed_k3h2: return "fixed-k3h2";
    default: return "explicit";
    }
}

/// Mesh size n for h = sqrt(2)/n closest to a target h.
inline std::size_t
n_for_h(double h)
{
    if (!(h > 0.0))
        throw std::invalid_argument("n_for_h: h must be positive");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(2.0) / h)));
}

inline std::size_t
n_fixed_kh(double kappa, int order, double target)
{
    return n_for_h(target * order / kappa);
}

inline std::size_t
n_fixed_k3h2(double kappa, int order, double target)
{
    return n_for_h(order * std::sqrt(target / (kappa * kappa * kappa)));
}

struct SweepSpec
{
    std::vector<double>      kappas;
    std::vector<int>         orders;
    std::vector<std::size_t> ns;
    StudyLine                line = StudyLine::explicit_n;
    double                   target = 1.1;
    unsigned                 workers = 1;
};

/// All cases of one (kappa, p), ordered by n. In the fixed modes a table
/// groups one p over kappa instead, with kappa = 0 here.
struct SweepGroup
{
    double                  kappa = 0.0;
    int                     order = 0;
    std::vector<CaseResult> cases;
};

struct SweepJob
{
    double      kappa;
    int         order;
    std::size_t n;
    std::size_t group;
};

inline std::vector<SweepGroup>
plan_sweep(const SweepSpec& spec, std::vector<SweepJob>& jobs)
{
    if (spec.kappas.empty() || spec.orders.empty())
        throw std::invalid_argument("sweep: kappa and p lists must be non-empty");
    std::vector<SweepGroup> groups;
    jobs.clear();
    if (spec.line == StudyLine::explicit_n)
    {
        if (spec.ns.empty())
            throw std::invalid_argument("sweep: n list must be non-empty");
        std::vector<std::size_t> ns = spec.ns;
        std::sort(ns.begin(), ns.end());
        ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
        for (double k : spec.kappas)
            for (int p : spec.orders)
            {
                groups.push_back({k, p, {}});
                for (std::size_t n : ns)
                    jobs.push_back({k, p, n, groups.size() - 1});
            }
    }
    else
    {
        std::vector<double> ks = spec.kappas;
        std::sort(ks.begin(), ks.end());
        for (int p : spec.orders)
        {
            groups.push_back({0.0, p, {}});
            for (double k : ks)
            {
                std::size_t n = spec.line == StudyLine::fixed_kh ? n_fixed_kh(k, p, spec.target)
                                                                 : n_fixed_k3h2(k, p, spec.target);
                jobs.push_back({k, p, n, groups.size() - 1});
            }
        }
    }
    return groups;
}

/**
 * Runs every case of a sweep on up to spec.workers threads. Results land in
 * plan order, so output does not depend on scheduling. Exceptions from a
 * case are rethrown after all workers stop.
 */
inline std::vector<SweepGroup>
run_sweep(const SweepSpec& spec, const RunOptions& opt = {})
{
    std::vector<SweepJob> jobs;
    auto groups = plan_sweep(spec, jobs);
    for (const auto& j : jobs)
        check_skeleton_guard(j.n, j.order, opt.max_skeleton_dofs);

    std::vector<CaseResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
        {
            try
            {
                results[i] = run_case(jobs[i].kappa, jobs[i].order, jobs[i].n, opt);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = jobs.size();
            }
        }
    };
    const unsigned w = std::max(1u, std::min<unsigned>(spec.workers, unsigned(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < w; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);

    for (std::size_t i = 0; i < jobs.size(); ++i)
        groups[jobs[i].group].cases.push_back(std::move(results[i]));
    return groups;
}

inline ConvergenceTable
to_table(const SweepGroup& group)
{
    ConvergenceTable t;
    for (const auto& c : group.cases)
        t.rows.push_back(c.errors);
    return t;
}

} // namespace hdg
