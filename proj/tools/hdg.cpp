// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0
//
// hdg solve|converge|verify: command-line driver for the benchmark problem.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdg/hdg.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit
{
    exit_ok = 0,
    exit_contract = 1,
    exit_usage = 2,
};

struct Args
{
    std::vector<double>      kappas;
    std::vector<int>         orders;
    std::vector<std::size_t> ns;
    std::string              tau_rule = "p/(kappa*h)";
    double                   tau = 1.0;
    std::string              out;
    unsigned                 workers = 1;
    int                      operator_degree = -1;
    int                      data_extra = 4;
    std::size_t              max_skeleton_dofs = hdg::default_skeleton_limit;
    std::string              mode = "explicit";
    double                   target = 1.1;
    bool                     timing = false;
    bool                     write_mesh = false;
    bool                     write_solution = false;
    std::vector<std::string> only;
};

std::string
num(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string
short_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

template <class T>
std::string
join(const std::vector<T>& v)
{
    std::string s;
    for (const auto& x : v)
        s += (s.empty() ? "" : " ") + num(double(x));
    return s;
}

hdg::RunOptions
run_options(const Args& a)
{
    hdg::RunOptions opt;
    if (a.tau_rule == "p/(kappa*h)")
        opt.tau_rule = hdg::TauRule::p_over_kappa_h;
    else if (a.tau_rule == "constant")
        opt.tau_rule = hdg::TauRule::constant;
    else
        throw CLI::ValidationError("--tau-rule", "expected 'p/(kappa*h)' or 'constant', got '" + a.tau_rule + "'");
    opt.constant_tau = a.tau;
    opt.quadrature.operator_degree = a.operator_degree;
    opt.quadrature.data_extra = a.data_extra;
    opt.max_skeleton_dofs = a.max_skeleton_dofs;
    opt.record_timing = a.timing;
    return opt;
}

hdg::StudyLine
study_line(const std::string& mode)
{
    if (mode == "explicit")
        return hdg::StudyLine::explicit_n;
    if (mode == "fixed-kh")
        return hdg::StudyLine::fixed_kh;
    if (mode == "fixed-k3h2")
        return hdg::StudyLine::fixed_k3h2;
    throw CLI::ValidationError("--mode", "expected explicit, fixed-kh or fixed-k3h2, got '" + mode + "'");
}

std::vector<std::string>
config_echo(const std::string& command, const Args& a, const hdg::SweepGroup& g)
{
    std::vector<std::string> h;
    h.push_back(std::string("hdg ") + HDG_VERSION + " " + command);
    h.push_back("kappa " + (g.kappa > 0.0 ? num(g.kappa) : join(a.kappas)));
    h.push_back("p " + std::to_string(g.order));
    h.push_back("mode " + a.mode + (a.mode == "explicit" ? "" : " target " + num(a.target)));
    h.push_back("tau_rule " + a.tau_rule + (a.tau_rule == "constant" ? " tau " + num(a.tau) : ""));
    h.push_back("timing " + std::string(a.timing ? "on" : "off"));
    for (const auto& c : g.cases)
    {
        const auto& cfg = c.config;
        h.push_back("case kappa " + num(cfg.kappa) + " n " + std::to_string(c.errors.n) + " h " + num(cfg.h) +
                    " tau " + num(cfg.tau) + " operator_degree " + std::to_string(cfg.operator_degree()) +
                    " data_degree " + std::to_string(cfg.data_degree(cfg.h)));
    }
    return h;
}

void
print_case(const hdg::CaseResult& c)
{
    const auto& e = c.errors;
    std::printf("kappa=%g p=%d n=%zu h=%.6g dofs=%zu e_u=%.6e e_q=%.6e e_trace=%.6e energy=%.2e/%.2e "
                "residual=%.2e stability=%.4g time=%.2fs %s\n",
                e.kappa, e.order, e.n, e.h, e.dofs, e.e_u, e.e_q, e.e_trace, c.energy.re_residual,
                c.energy.im_residual, c.skeleton_residual, c.stability_ratio, c.wall_seconds,
                c.ok() ? "ok" : "CONTRACT FAILED");
    for (const auto& f : c.failures)
        std::printf("  contract: %s\n", f.c_str());
}

std::ofstream
open_output(const fs::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    return os;
}

void
ensure_dir(const std::string& dir)
{
    if (!dir.empty())
        fs::create_directories(dir);
}

int
cmd_solve(const Args& a)
{
    auto opt = run_options(a);
    if (a.kappas.size() != 1 || a.orders.size() != 1 || a.ns.size() != 1)
        throw CLI::ValidationError("solve", "takes exactly one --kappa, --p and --n");
    const double k = a.kappas[0];
    const int p = a.orders[0];
    const std::size_t n = a.ns[0];
    hdg::check_skeleton_guard(n, p, opt.max_skeleton_dofs);
    auto res = hdg::run_case(k, p, n, opt);
    print_case(res);
    if (!a.out.empty())
    {
        ensure_dir(a.out);
        const std::string stem = "k" + short_num(k) + "_p" + std::to_string(p) + "_n" + std::to_string(n);
        hdg::SweepGroup g{k, p, {res}};
        auto os = open_output(fs::path(a.out) / ("solve_" + stem + ".csv"));
        hdg::write_convergence_csv(os, hdg::to_table(g), config_echo("solve", a, g));
        if (a.write_mesh || a.write_solution)
        {
            hdg::Mesh mesh = hdg::build_structured_mesh(n);
            if (a.write_mesh)
            {
                auto ms = open_output(fs::path(a.out) / ("mesh_n" + std::to_string(n) + ".txt"));
                hdg::write_mesh(ms, mesh);
            }
            if (a.write_solution)
            {
                auto cfg = res.config;
                auto data = hdg::BenchmarkData(k).problem_data();
                auto sol = hdg::solve_condensed(mesh, cfg, data);
                auto ss = open_output(fs::path(a.out) / ("solution_" + stem + ".csv"));
                hdg::write_solution_csv(ss, mesh, cfg, sol);
            }
        }
    }
    return res.ok() ? exit_ok : exit_contract;
}

int
cmd_converge(const Args& a)
{
    auto opt = run_options(a);
    hdg::SweepSpec spec;
    spec.kappas = a.kappas;
    spec.orders = a.orders;
    spec.ns = a.ns;
    spec.line = study_line(a.mode);
    spec.target = a.target;
    spec.workers = a.workers;
    if (spec.line == hdg::StudyLine::explicit_n && a.ns.empty())
        throw CLI::ValidationError("converge", "explicit mode needs --n");
    if (!(a.target > 0.0))
        throw CLI::ValidationError("--target", "must be positive");

    auto groups = hdg::run_sweep(spec, opt);
    bool ok = true;
    ensure_dir(a.out);
    for (const auto& g : groups)
    {
        for (const auto& c : g.cases)
        {
            print_case(c);
            ok = ok && c.ok();
        }
        auto table = hdg::to_table(g);
        if (table.rows.size() >= 3)
        {
            auto r = hdg::convergence_rates(table);
            std::printf("p=%d slopes (finest 3): u %.3f  q %.3f  trace %.3f\n", g.order, r.slope_u, r.slope_q,
                        r.slope_trace);
        }
        std::string name = spec.line == hdg::StudyLine::explicit_n
                               ? "converge_k" + short_num(g.kappa) + "_p" + std::to_string(g.order)
                               : "pollution_" + a.mode + "_p" + std::to_string(g.order);
        fs::path path = fs::path(a.out.empty() ? "." : a.out) / (name + ".csv");
        auto os = open_output(path);
        hdg::write_convergence_csv(os, table, config_echo("converge", a, g));
        std::printf("wrote %s\n", path.string().c_str());
    }
    return ok ? exit_ok : exit_contract;
}

int
cmd_verify(const Args& a)
{
    std::vector<std::string> names = a.only.empty() ? hdg::verify_check_names() : a.only;
    for (const auto& n : names)
    {
        const auto& all = hdg::verify_check_names();
        if (std::find(all.begin(), all.end(), n) == all.end())
            throw CLI::ValidationError("--only", "unknown check '" + n + "'");
    }
    hdg::VerifyCases cases{a.kappas, a.orders, a.ns};
    for (const auto& n : names)
    {
        for (const auto& c : hdg::run_check(n, cases))
        {
            std::printf("%s\n", hdg::format_check(c).c_str());
            std::fflush(stdout);
            if (!c.passed)
            {
                std::fprintf(stderr, "verify: %s failed with %.17g\n", c.name.c_str(), c.value);
                return exit_contract;
            }
        }
    }
    return exit_ok;
}

void
add_common(CLI::App* sub, Args& a)
{
    sub->add_option("--kappa", a.kappas, "wave numbers")->delimiter(',')->check(CLI::PositiveNumber);
    sub->add_option("--p", a.orders, "polynomial orders")->delimiter(',')->check(CLI::Range(1, hdg::max_basis_order));
    sub->add_option("--n", a.ns, "mesh sizes (n x n squares)")->delimiter(',')->check(CLI::PositiveNumber);
    sub->add_option("--tau-rule", a.tau_rule, "stabilization rule: p/(kappa*h) or constant")->capture_default_str();
    sub->add_option("--tau", a.tau, "tau for --tau-rule constant")->check(CLI::PositiveNumber);
    sub->add_option("--out", a.out, "output directory");
    sub->add_option("--quad-operator", a.operator_degree, "operator quadrature degree (default 2p)");
    sub->add_option("--quad-data-extra", a.data_extra, "data quadrature degree is 2p + this + ceil(kappa h)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-skeleton-dofs", a.max_skeleton_dofs, "size guard on the skeleton system")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_flag("--timing", a.timing, "record wall time in the seconds column");
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"HDG solver for the 2-d Helmholtz benchmark with Robin boundary data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HDG_VERSION);
    app.set_config("--config", "", "TOML/INI file with option values under [solve], [converge] or [verify]; "
                                   "command-line flags win");
    app.fallthrough();
    Args a;

    auto* solve = app.add_subcommand("solve", "single solve with error and energy report");
    add_common(solve, a);
    solve->add_flag("--write-mesh", a.write_mesh, "dump the mesh into --out");
    solve->add_flag("--write-solution", a.write_solution, "dump fields at quadrature points into --out");

    auto* converge = app.add_subcommand("converge", "convergence or pollution study, one CSV per (kappa, p)");
    add_common(converge, a);
    converge->add_option("--workers", a.workers, "parallel solves")->capture_default_str()->check(CLI::PositiveNumber);
    converge->add_option("--mode", a.mode, "explicit, fixed-kh (kappa h/p = target) or fixed-k3h2 "
                                           "(kappa^3 h^2/p^2 = target)")
        ->capture_default_str();
    converge->add_option("--target", a.target, "target value of the fixed study line")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "invariant checks, one line each");
    add_common(verify, a);
    verify->add_option("--only", a.only, "run only these checks")->delimiter(',');

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*solve)
        {
            if (a.kappas.empty() || a.orders.empty() || a.ns.empty())
                throw CLI::ValidationError("solve", "needs --kappa, --p and --n");
            return cmd_solve(a);
        }
        if (*converge)
        {
            if (a.kappas.empty() || a.orders.empty())
                throw CLI::ValidationError("converge", "needs --kappa and --p");
            return cmd_converge(a);
        }
        return cmd_verify(a);
    }
    catch (const CLI::Error& e)
    {
        std::cerr << "hdg: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::length_error& e)
    {
        std::cerr << "hdg: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "hdg: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "hdg: " << e.what() << '\n';
        return exit_contract;
    }
}
