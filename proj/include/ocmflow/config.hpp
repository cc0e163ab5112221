#pragma once

// Run configuration: a line-based "key = value" text format with '#'
// comments. Unknown keys are rejected; every rejection carries the line and
// key it refers to.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocmflow/flow.hpp"
#include "ocmflow/grid.hpp"
#include "ocmflow/io.hpp"
#include "ocmflow/orlicz.hpp"

namespace ocmflow {

struct ConfigError : std::runtime_error {
    int line;
    std::string key;
    ConfigError(int line_, std::string key_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) +
                             (key_.empty() ? "" : ", key '" + key_ + "'") + ": " + what),
          line(line_),
          key(std::move(key_)) {}
};

struct RunSetup {
    GridPtr grid;
    FlowConfig flow;
    ScalarField h0;
    std::string output_dir = "out";
    long output_every = 100;
    std::string config_text;   // raw echo for the manifest
    HypothesisMode check_mode = HypothesisMode::thm1;
};

namespace detail {

struct ConfigEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct RawConfig {
    std::map<std::string, ConfigEntry> entries;
    std::string text;

    bool has(const std::string& key) const { return entries.count(key) > 0; }

    const ConfigEntry* get(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    std::string require(const std::string& key) {
        const ConfigEntry* e = get(key);
        if (!e) throw ConfigError(0, key, "required key is missing");
        return e->value;
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const ConfigEntry* e = get(key);
        if (!e) {
            if (fallback) return *fallback;
            throw ConfigError(0, key, "required key is missing");
        }
        try {
            std::size_t pos = 0;
            double v = std::stod(e->value, &pos);
            while (pos < e->value.size() && std::isspace(e->value[pos])) ++pos;
            if (pos != e->value.size()) throw std::invalid_argument("trailing text");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(e->line, key, "expected a number, got '" + e->value + "'");
        }
    }

    long integer(const std::string& key, std::optional<long> fallback = std::nullopt) {
        const ConfigEntry* e = get(key);
        if (!e) {
            if (fallback) return *fallback;
            throw ConfigError(0, key, "required key is missing");
        }
        try {
            std::size_t pos = 0;
            long v = std::stol(e->value, &pos);
            while (pos < e->value.size() && std::isspace(e->value[pos])) ++pos;
            if (pos != e->value.size()) throw std::invalid_argument("trailing text");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(e->line, key, "expected an integer, got '" + e->value + "'");
        }
    }

    bool boolean(const std::string& key, bool fallback) {
        const ConfigEntry* e = get(key);
        if (!e) return fallback;
        if (e->value == "true" || e->value == "1") return true;
        if (e->value == "false" || e->value == "0") return false;
        throw ConfigError(e->line, key, "expected true/false, got '" + e->value + "'");
    }
};

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline RawConfig parse_raw(std::istream& is) {
    static const std::set<std::string> known = {
        "dim",          "n_lat",          "n_lon",        "k",
        "phi.kind",     "phi.p",          "phi.a",        "phi.alpha",
        "phi.epsilon",  "phi.s0",         "f.kind",       "f.params",
        "h0.kind",      "h0.params",      "dt0",          "dt_min",
        "dt_max",       "step_cap_delta", "tol_stationary", "t_max",
        "step_max",     "output.dir",     "output.every", "polar_filter",
        "dealias",      "check.mode"};
    RawConfig raw;
    std::string line;
    int lineno = 0;
    std::ostringstream echo;
    while (std::getline(is, line)) {
        ++lineno;
        echo << line << "\n";
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "", "expected 'key = value', got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "", "empty key");
        if (!known.count(key)) throw ConfigError(lineno, key, "unknown key");
        if (raw.entries.count(key))
            throw ConfigError(lineno, key, "duplicate key (first on line " +
                                               std::to_string(raw.entries[key].line) + ")");
        raw.entries[key] = ConfigEntry{value, lineno, false};
    }
    raw.text = echo.str();
    return raw;
}

inline std::vector<double> number_list(const std::string& value, int line,
                                       const std::string& key) {
    std::vector<double> out;
    std::istringstream ls(value);
    std::string tok;
    while (ls >> tok) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError(line, key, "expected numbers, got '" + tok + "'");
        }
    }
    return out;
}

// real surface harmonic P_l^m(cos theta) cos(m phi + phase) on S^2,
// cos(l theta + phase) on S^1
inline ScalarField harmonic_sum_field(GridPtr grid, double base,
                                      const std::vector<double>& terms, int line,
                                      const std::string& key) {
    if (terms.size() % 4 != 0)
        throw ConfigError(line, key,
                          "expected quadruples 'l m amp phase' after the constant");
    ScalarField out(grid, base);
    for (std::size_t t = 0; t < terms.size(); t += 4) {
        int l = static_cast<int>(terms[t]);
        int m = static_cast<int>(terms[t + 1]);
        double amp = terms[t + 2], phase = terms[t + 3];
        if (l < 0 || m < 0 || (grid->dim == 2 && m > l))
            throw ConfigError(line, key, "harmonic term needs 0 <= m <= l");
        if (grid->dim == 1) {
            for (int j = 0; j < grid->n_lon; ++j)
                out.values[j] += amp * std::cos(l * grid->theta[j] + phase);
        } else {
            for (int r = 0; r < grid->n_lat; ++r) {
                double plm = std::assoc_legendre(static_cast<unsigned>(l),
                                                 static_cast<unsigned>(m),
                                                 std::cos(grid->theta[r]));
                for (int j = 0; j < grid->n_lon; ++j)
                    out.values[grid->node_index(r, j)] +=
                        amp * plm * std::cos(m * grid->phi[j] + phase);
            }
        }
    }
    return out;
}

}  // namespace detail

inline RunSetup parse_config(std::istream& is) {
    detail::RawConfig raw = detail::parse_raw(is);
    RunSetup setup;
    setup.config_text = raw.text;

    long dim = raw.integer("dim");
    if (dim != 1 && dim != 2)
        throw ConfigError(raw.entries["dim"].line, "dim", "dim must be 1 or 2");
    long n_lon = raw.integer("n_lon");
    long n_lat = (dim == 2) ? raw.integer("n_lat") : raw.integer("n_lat", 0);

    GridOptions gopt;
    gopt.polar_filter = raw.boolean("polar_filter", true);
    gopt.dealias = raw.boolean("dealias", false);
    try {
        setup.grid = build_grid(static_cast<int>(dim), static_cast<int>(n_lat),
                                static_cast<int>(n_lon), gopt);
    } catch (const std::invalid_argument& e) {
        int line = raw.entries.count("n_lon") ? raw.entries["n_lon"].line : 0;
        throw ConfigError(line, dim == 2 ? "n_lat/n_lon" : "n_lon", e.what());
    }

    long k = raw.integer("k");
    if (k < 1 || k > dim)
        throw ConfigError(raw.entries["k"].line, "k",
                          "need 1 <= k <= n-1 = " + std::to_string(dim));
    setup.flow.k = static_cast<int>(k);

    // phi
    std::string phi_kind = raw.require("phi.kind");
    if (phi_kind != "power")
        throw ConfigError(raw.entries["phi.kind"].line, "phi.kind",
                          "only the 'power' family is configurable; custom models are "
                          "assembled through the library API");
    OrliczModel model = OrliczModel::power(raw.number("phi.p"));
    if (raw.has("phi.a")) model.a = raw.number("phi.a");
    if (raw.has("phi.alpha")) model.alpha = raw.number("phi.alpha");
    if (raw.has("phi.epsilon")) model.epsilon = raw.number("phi.epsilon");
    if (raw.has("phi.s0")) model.s0 = raw.number("phi.s0");
    setup.flow.model = model;

    // f
    std::string f_kind = raw.require("f.kind");
    int f_line = raw.entries["f.kind"].line;
    if (f_kind == "constant") {
        auto params = detail::number_list(raw.require("f.params"),
                                          raw.entries["f.params"].line, "f.params");
        if (params.size() != 1)
            throw ConfigError(raw.entries["f.params"].line, "f.params",
                              "constant f takes exactly one number");
        setup.flow.f = ScalarField(setup.grid, params[0]);
    } else if (f_kind == "harmonic_sum") {
        int line = raw.entries["f.params"].line;
        auto params = detail::number_list(raw.require("f.params"), line, "f.params");
        if (params.empty())
            throw ConfigError(line, "f.params", "expected 'c0 [l m amp phase]...'");
        setup.flow.f = detail::harmonic_sum_field(
            setup.grid, params[0], {params.begin() + 1, params.end()}, line, "f.params");
    } else if (f_kind == "file") {
        std::string path = raw.require("f.params");
        try {
            setup.flow.f = field_from_dump(read_field_file(path), setup.grid);
        } catch (const std::runtime_error& e) {
            throw ConfigError(raw.entries["f.params"].line, "f.params", e.what());
        }
    } else {
        throw ConfigError(f_line, "f.kind",
                          "expected one of: constant, harmonic_sum, file");
    }
    for (std::size_t i = 0; i < setup.flow.f.size(); ++i)
        if (!(setup.flow.f.values[i] > 0.0))
            throw ConfigError(f_line, "f.kind", "f must be strictly positive at every node");

    // h0
    std::string h_kind = raw.require("h0.kind");
    int h_line = raw.entries["h0.kind"].line;
    if (h_kind == "sphere") {
        auto params = detail::number_list(raw.require("h0.params"),
                                          raw.entries["h0.params"].line, "h0.params");
        if (params.size() != 1 || !(params[0] > 0.0))
            throw ConfigError(raw.entries["h0.params"].line, "h0.params",
                              "sphere takes exactly one positive radius");
        setup.h0 = ScalarField(setup.grid, params[0]);
    } else if (h_kind == "harmonic_perturbed_sphere") {
        int line = raw.entries["h0.params"].line;
        auto params = detail::number_list(raw.require("h0.params"), line, "h0.params");
        if (params.empty() || !(params[0] > 0.0))
            throw ConfigError(line, "h0.params", "expected 'r [l m amp phase]...' with r > 0");
        setup.h0 = detail::harmonic_sum_field(
            setup.grid, params[0], {params.begin() + 1, params.end()}, line, "h0.params");
    } else if (h_kind == "file") {
        std::string path = raw.require("h0.params");
        try {
            setup.h0 = field_from_dump(read_field_file(path), setup.grid);
        } catch (const std::runtime_error& e) {
            throw ConfigError(raw.entries["h0.params"].line, "h0.params", e.what());
        }
    } else {
        throw ConfigError(h_line, "h0.kind",
                          "expected one of: sphere, harmonic_perturbed_sphere, file");
    }
    for (std::size_t i = 0; i < setup.h0.size(); ++i)
        if (!(setup.h0.values[i] > 0.0))
            throw ConfigError(h_line, "h0.kind", "h0 must be strictly positive at every node");

    // stepping controls
    setup.flow.dt_min = raw.number("dt_min", 1e-12);
    setup.flow.dt_max = raw.number("dt_max", 0.25);
    setup.flow.dt0 = raw.number("dt0", std::min(1e-3, setup.flow.dt_max));
    setup.flow.step_cap_delta = raw.number("step_cap_delta", 1e-3);
    setup.flow.tol_stationary = raw.number("tol_stationary", 1e-9);
    setup.flow.t_max = raw.number("t_max", std::numeric_limits<double>::infinity());
    setup.flow.step_max = raw.integer("step_max", 5'000'000);
    if (!(setup.flow.dt_min <= setup.flow.dt0 && setup.flow.dt0 <= setup.flow.dt_max)) {
        int line = raw.entries.count("dt0") ? raw.entries["dt0"].line : 0;
        throw ConfigError(line, "dt0", "need dt_min <= dt0 <= dt_max");
    }

    setup.output_dir = raw.has("output.dir") ? raw.get("output.dir")->value : "out";
    setup.output_every = raw.integer("output.every", 100);
    if (setup.output_every < 0)
        throw ConfigError(raw.entries["output.every"].line, "output.every",
                          "must be non-negative");

    if (raw.has("check.mode")) {
        std::string mode = raw.get("check.mode")->value;
        if (mode == "thm1")
            setup.check_mode = HypothesisMode::thm1;
        else if (mode == "thm2")
            setup.check_mode = HypothesisMode::thm2;
        else
            throw ConfigError(raw.entries["check.mode"].line, "check.mode",
                              "expected thm1 or thm2");
    }

    return setup;
}

inline RunSetup parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(0, "", "cannot open config file: " + path);
    return parse_config(is);
}

}  // namespace ocmflow
