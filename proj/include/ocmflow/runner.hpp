#pragma once

// Orchestration behind the CLI subcommands. Exit codes: 0 converged/ok,
// 1 check failed, 2 invalid config, 3 convexity lost, 4 budget exhausted.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ocmflow/config.hpp"
#include "ocmflow/diagnostics.hpp"
#include "ocmflow/flow.hpp"
#include "ocmflow/io.hpp"
#include "ocmflow/oracles.hpp"

namespace ocmflow {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_invalid_config = 2;
inline constexpr int exit_convexity_lost = 3;
inline constexpr int exit_budget_exhausted = 4;

namespace detail {

inline std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string resolved_output_dir(const RunSetup& setup) {
    if (const char* env = std::getenv("OCMFLOW_OUTPUT_DIR"))
        if (*env) return env;
    return setup.output_dir;
}

inline void print_report(std::ostream& os, const std::string& title,
                         const HypothesisReport& rep) {
    os << title << ": " << (rep.pass ? "pass" : "FAIL") << "\n";
    for (const auto& c : rep.clauses) {
        os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name;
        if (!c.pass)
            os << "  (witness s = " << c.witness_s << ", value = " << c.witness_value
               << ")";
        if (!c.note.empty()) os << "  [" << c.note << "]";
        os << "\n";
    }
}

}  // namespace detail

inline int check_command(const std::string& config_path, std::ostream& os) {
    RunSetup setup;
    try {
        setup = parse_config_file(config_path);
    } catch (const ConfigError& e) {
        os << "config error: " << e.what() << "\n";
        return exit_invalid_config;
    }
    HypothesisReport rep =
        check_hypotheses(setup.flow.model, setup.flow.k, setup.check_mode);
    detail::print_report(os, std::string("phi hypotheses (") +
                                 (setup.check_mode == HypothesisMode::thm1 ? "thm1" : "thm2") +
                                 ")",
                         rep);
    bool all = rep.pass;
    if (setup.check_mode == HypothesisMode::thm1) {
        FConditionReport fr = f_condition_check(setup.flow.f, setup.flow.k,
                                                setup.flow.model.a);
        os << "f condition: " << (fr.pass ? "pass" : "FAIL")
           << " (min eigenvalue = " << fr.min_eigenvalue << " at node "
           << fr.witness_node << ")\n";
        all = all && fr.pass;
    }
    return all ? exit_ok : exit_check_failed;
}

inline int run_command(const std::string& config_path, std::ostream& os) {
    RunSetup setup;
    try {
        setup = parse_config_file(config_path);
    } catch (const ConfigError& e) {
        os << "config error: " << e.what() << "\n";
        return exit_invalid_config;
    }

    HypothesisReport hyp =
        check_hypotheses(setup.flow.model, setup.flow.k, setup.check_mode);
    if (!hyp.pass) {
        os << "warning: phi hypothesis check failed (run continues; see 'check')\n";
        for (const auto& c : hyp.clauses)
            if (!c.pass) os << "warning:   " << c.name << "\n";
    }
    if (setup.check_mode == HypothesisMode::thm1) {
        FConditionReport fr =
            f_condition_check(setup.flow.f, setup.flow.k, setup.flow.model.a);
        if (!fr.pass)
            os << "warning: f condition fails (min eigenvalue " << fr.min_eigenvalue
               << ")\n";
    }

    std::string dir = detail::resolved_output_dir(setup);
    std::filesystem::create_directories(dir);
    std::string series_path = dir + "/series.csv";
    std::ofstream series(series_path);
    if (!series) {
        os << "cannot open " << series_path << " for writing\n";
        return exit_invalid_config;
    }
    series << series_csv_header() << "\n";

    std::string start = detail::iso_timestamp();
    std::vector<std::string> emitted;
    DiagnosticsRecord last{};
    long dump_counter = -1;

    FlowObservers obs;
    obs.on_record = [&](const DiagnosticsRecord& r) {
        series << series_csv_row(r) << "\n";
        last = r;
    };
    obs.on_state = [&](const FlowState& st, const ScalarField&) {
        if (setup.output_every > 0 && st.step % setup.output_every == 0 &&
            st.step != dump_counter) {
            dump_counter = st.step;
            std::string name = "h_" + std::to_string(st.step) + ".field";
            write_field_file(dir + "/" + name, st.h, "t " + format_double(st.t));
            emitted.push_back(name);
        }
    };

    RunResult result = run(setup.flow, setup.h0, obs);
    series.close();

    // final state dump
    {
        std::string name = "h_" + std::to_string(result.state.step) + ".field";
        if (emitted.empty() || emitted.back() != name) {
            write_field_file(dir + "/" + name, result.state.h,
                             "t " + format_double(result.state.t));
            emitted.push_back(name);
        }
    }
    emitted.insert(emitted.begin(), "series.csv");

    int code = exit_ok;
    if (result.reason == TerminationReason::convexity_lost) code = exit_convexity_lost;
    if (result.reason == TerminationReason::budget_exhausted) code = exit_budget_exhausted;

    std::ofstream manifest(dir + "/manifest");
    manifest << "# ocmflow run manifest\n";
    manifest << "status " << to_string(result.reason) << "\n";
    manifest << "exit_code " << code << "\n";
    manifest << "detail " << result.detail << "\n";
    manifest << "start " << start << "\n";
    manifest << "end " << detail::iso_timestamp() << "\n";
    manifest << "steps " << result.state.step << "\n";
    manifest << "t_final " << format_double(result.state.t) << "\n";
    manifest << "[final]\n";
    manifest << "J " << format_double(last.J) << "\n";
    manifest << "V " << format_double(last.V) << "\n";
    manifest << "eta " << format_double(last.eta) << "\n";
    manifest << "residual_sup " << format_double(last.residual_sup) << "\n";
    manifest << "residual_l2 " << format_double(last.residual_l2) << "\n";
    manifest << "holder_gap " << format_double(last.holder_gap) << "\n";
    manifest << "h_min " << format_double(last.h_min) << "\n";
    manifest << "h_max " << format_double(last.h_max) << "\n";
    manifest << "min_radius " << format_double(last.min_radius) << "\n";
    manifest << "[files]\n";
    for (const std::string& name : emitted)
        manifest << name << " sha256:" << sha256_file(dir + "/" + name) << "\n";
    manifest << "[config]\n";
    std::istringstream cfg_lines(setup.config_text);
    std::string line;
    while (std::getline(cfg_lines, line)) manifest << "  " << line << "\n";

    os << "run " << to_string(result.reason) << " after " << result.state.step
       << " steps, t = " << result.state.t << "\n";
    os << "  residual_sup = " << last.residual_sup << ", c_eta = " << last.eta << "\n";
    os << "  output in " << dir << "\n";
    if (!result.detail.empty()) os << "  detail: " << result.detail << "\n";
    return code;
}

inline int export_mesh_command(const std::string& field_path, const std::string& out_path,
                               std::ostream& os) {
    try {
        FieldDump dump = read_field_file(field_path);
        GridPtr grid = build_grid(dump.dim, dump.n_lat, dump.n_lon);
        ScalarField h = field_from_dump(dump, grid);
        std::ofstream out(out_path);
        if (!out) {
            os << "cannot open " << out_path << " for writing\n";
            return exit_invalid_config;
        }
        export_mesh(out, h);
        os << "wrote " << out_path << "\n";
        return exit_ok;
    } catch (const std::exception& e) {
        os << "export-mesh failed: " << e.what() << "\n";
        return exit_invalid_config;
    }
}

// The oracle suite behind `validate`: small cross-checks of the main pipeline
// against the independent reference computations.
inline std::vector<OracleReport> run_validation_suite() {
    std::vector<OracleReport> reports;

    {  // Gauss-Legendre x uniform quadrature of cos^2(theta) vs closed form
        OracleReport rep;
        rep.name = "quadrature cos^2(theta) on S^2";
        rep.resolution = "n_lat 32, n_lon 64";
        rep.tolerance = 1e-10;
        GridPtr g = build_grid(2, 32, 64);
        ScalarField u(g);
        for (int r = 0; r < g->n_lat; ++r)
            for (int j = 0; j < g->n_lon; ++j)
                u.values[g->node_index(r, j)] = std::pow(std::cos(g->theta[r]), 2);
        rep.max_abs_error = std::abs(integrate(u) - 4.0 * pi / 3.0);
        rep.max_rel_error = rep.max_abs_error / (4.0 * pi / 3.0);
        rep.pass = rep.max_abs_error < rep.tolerance;
        reports.push_back(rep);
    }
    {  // circle spectral derivative of sin(3 theta)
        OracleReport rep;
        rep.name = "circle derivative sin(3t)";
        rep.resolution = "n = 64";
        rep.tolerance = 1e-10;
        GridPtr g = build_grid(1, 0, 64);
        ScalarField u(g);
        for (int j = 0; j < g->n_lon; ++j) u.values[j] = std::sin(3.0 * g->theta[j]);
        VectorField du = gradient(u);
        for (int j = 0; j < g->n_lon; ++j)
            rep.max_abs_error = std::max(
                rep.max_abs_error,
                std::abs(du.comp1[j] - 3.0 * std::cos(3.0 * g->theta[j])));
        rep.max_rel_error = rep.max_abs_error / 3.0;
        rep.pass = rep.max_abs_error < rep.tolerance;
        reports.push_back(rep);
    }
    {  // covariant Hessian vs exact jet derivatives, degree-2 harmonic
        OracleReport rep;
        rep.name = "hessian vs autodiff, degree-2 harmonic";
        rep.resolution = "n_lat 32, n_lon 64";
        rep.tolerance = 1e-8;
        GridPtr g = build_grid(2, 32, 64);
        auto field = [](auto th, auto ph) {
            auto c = cos(th);
            return 0.5 * (3.0 * (c * c) - Jet2::constant(1.0)) +
                   0.2 * (sin(th) * sin(th) * cos(2.0 * ph + 0.3));
        };
        ScalarField u(g);
        for (int r = 0; r < g->n_lat; ++r)
            for (int j = 0; j < g->n_lon; ++j) {
                Jet2 v = field(Jet2::var_theta(g->theta[r]), Jet2::var_phi(g->phi[j]));
                u.values[g->node_index(r, j)] = v.v;
            }
        SymMatrixField H = covariant_hessian(u);
        for (int r = 0; r < g->n_lat; ++r)
            for (int j = 0; j < g->n_lon; j += 7) {
                std::size_t i = g->node_index(r, j);
                PointDerivatives d = exact_derivatives(field, g->theta[r], g->phi[j]);
                rep.max_abs_error = std::max(
                    {rep.max_abs_error, std::abs(H.a11[i] - d.hess11),
                     std::abs(H.a12[i] - d.hess12), std::abs(H.a22[i] - d.hess22)});
            }
        rep.max_rel_error = rep.max_abs_error / 3.0;
        rep.pass = rep.max_abs_error < rep.tolerance;
        reports.push_back(rep);
    }
    {  // axisymmetric ellipsoid: sigma_1 vs the 1-D reduction
        OracleReport rep;
        rep.name = "ellipsoid sigma_1 vs axisymmetric oracle";
        rep.resolution = "n_lat 64, oracle 4096";
        rep.tolerance = 1e-6;
        GridPtr g = build_grid(2, 64, 32);
        auto hfun = [](double th) {
            double s = std::sin(th), c = std::cos(th);
            return std::sqrt(s * s + 4.0 * c * c);
        };
        ScalarField h(g);
        for (int r = 0; r < g->n_lat; ++r)
            for (int j = 0; j < g->n_lon; ++j)
                h.values[g->node_index(r, j)] = hfun(g->theta[r]);
        CurvatureBundle cb = curvature_bundle(h, 1);
        const int m = 4096;
        std::vector<double> samples(m);
        for (int i = 0; i < m; ++i) samples[i] = hfun((i + 0.5) * pi / m);
        std::vector<double> sig = axisymmetric_sigma_k(samples, 1);
        for (int r = 0; r < g->n_lat; ++r) {
            double ref = interpolate_axisymmetric(sig, g->theta[r]);
            double got = cb.sigma_k.values[g->node_index(r, 0)];
            rep.max_abs_error = std::max(rep.max_abs_error, std::abs(got - ref));
            rep.max_rel_error =
                std::max(rep.max_rel_error, std::abs(got - ref) / std::abs(ref));
        }
        rep.pass = rep.max_rel_error < rep.tolerance;
        reports.push_back(rep);
    }
    {  // circle reference flow: limit radius from the conserved functional
        OracleReport rep;
        rep.name = "circle flow limit radius vs Phi-conservation";
        rep.resolution = "n = 256, dt = 1e-4";
        rep.tolerance = 1e-6;
        const int n = 256;
        std::vector<double> h0(n);
        for (int j = 0; j < n; ++j) h0[j] = 1.0 + 0.1 * std::cos(2.0 * (2.0 * pi * j / n));
        CircleFlowConfig cfg;
        cfg.model = OrliczModel::power(2.0);
        cfg.dt = 1e-4;
        cfg.t_end = 6.0;
        cfg.tol_stationary = 1e-10;
        cfg.record_every = 1000;
        CircleTrajectory traj = circle_reference_flow(h0, cfg);
        double J0 = 0.0;
        for (int j = 0; j < n; ++j) J0 += (2.0 * pi / n) * 0.5 * h0[j] * h0[j];
        double r_pred = std::sqrt(J0 / pi);
        const std::vector<double>& hf = traj.states.back();
        for (double v : hf)
            rep.max_abs_error = std::max(rep.max_abs_error, std::abs(v - r_pred));
        rep.max_rel_error = rep.max_abs_error / r_pred;
        rep.pass = rep.max_rel_error < rep.tolerance;
        reports.push_back(rep);
    }
    {  // refinement order of the Hessian on a degree-4 harmonic
        OracleReport rep;
        rep.name = "hessian refinement order, degree-4 harmonic";
        rep.resolution = "n_lat 16/32/64";
        rep.tolerance = 3.5;  // minimum observed order
        auto field = [](auto th, auto ph) {
            auto c = cos(th);
            auto c2 = c * c;
            return 0.125 * (35.0 * (c2 * c2) - 30.0 * c2 + Jet2::constant(3.0)) +
                   0.1 * (sin(th) * sin(th) * cos(2.0 * ph));
        };
        auto err_at = [&](int n_lat) {
            GridPtr g = build_grid(2, n_lat, 2 * n_lat);
            ScalarField u(g);
            for (int r = 0; r < g->n_lat; ++r)
                for (int j = 0; j < g->n_lon; ++j) {
                    Jet2 v =
                        field(Jet2::var_theta(g->theta[r]), Jet2::var_phi(g->phi[j]));
                    u.values[g->node_index(r, j)] = v.v;
                }
            SymMatrixField H = covariant_hessian(u);
            double e = 0.0;
            for (int r = 0; r < g->n_lat; ++r)
                for (int j = 0; j < g->n_lon; j += 5) {
                    std::size_t i = g->node_index(r, j);
                    PointDerivatives d = exact_derivatives(field, g->theta[r], g->phi[j]);
                    e = std::max({e, std::abs(H.a11[i] - d.hess11),
                                  std::abs(H.a12[i] - d.hess12),
                                  std::abs(H.a22[i] - d.hess22)});
                }
            return e;
        };
        RefinementResult rr = refinement_study(err_at, {16, 32, 64});
        rep.max_abs_error = rr.errors.back();
        rep.max_rel_error = rr.mean_order;
        rep.pass = rr.mean_order >= rep.tolerance && rr.monotone;
        reports.push_back(rep);
    }
    {  // evolution identity for rho^2/2 on a fine S^1 run
        OracleReport rep;
        rep.name = "rho^2/2 evolution identity on S^1";
        rep.resolution = "n = 256, dt = 1e-5";
        rep.tolerance = 1e-6;
        GridPtr g = build_grid(1, 0, 256);
        ScalarField h0(g);
        for (int j = 0; j < g->n_lon; ++j)
            h0.values[j] = 1.0 + 0.1 * std::cos(2.0 * g->theta[j]);
        FlowConfig cfg;
        cfg.k = 1;
        cfg.model = OrliczModel::power(2.0);
        cfg.f = ScalarField(g, 1.0);
        cfg.dt0 = cfg.dt_max = 1e-5;
        cfg.dt_min = 1e-6;
        FlowState st;
        st.h = h0;
        st.dt = cfg.dt0;
        FlowState st2 = step(st, cfg);
        rep.max_abs_error =
            identity_check_rho(st.h, st2.h, st2.t - st.t, cfg.f, cfg.model, cfg.k);
        rep.max_rel_error = rep.max_abs_error;
        rep.pass = rep.max_abs_error < rep.tolerance;
        reports.push_back(rep);
    }
    return reports;
}

inline int validate_command(std::ostream& os) {
    std::vector<OracleReport> reports = run_validation_suite();
    bool all = true;
    for (const auto& r : reports) {
        os << "[" << (r.pass ? "pass" : "FAIL") << "] " << r.name << " (" << r.resolution
           << "): max abs " << r.max_abs_error << ", max rel/order " << r.max_rel_error
           << ", tolerance " << r.tolerance << "\n";
        all = all && r.pass;
    }
    return all ? exit_ok : exit_check_failed;
}

}  // namespace ocmflow
