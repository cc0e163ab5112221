#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ocmflow/config.hpp"
#include "ocmflow/io.hpp"
#include "ocmflow/runner.hpp"

using namespace ocmflow;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "ocmflow_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_temp(const std::string& name, const std::string& text) {
    auto path = temp_dir() / name;
    std::ofstream os(path);
    os << text;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* minimal_cfg =
    "dim = 2\n"
    "n_lat = 32\n"
    "n_lon = 64\n"
    "k = 1\n"
    "phi.kind = power\n"
    "phi.p = 2\n"
    "f.kind = constant\n"
    "f.params = 1\n"
    "h0.kind = sphere\n"
    "h0.params = 1\n";

}  // namespace

TEST_CASE("field dump round-trips bit-exactly") {
    GridPtr g = build_grid(2, 16, 32);
    ScalarField h(g);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.5, 2.0);
    for (auto& v : h.values) v = dist(rng);

    std::ostringstream os;
    write_field(os, h, "test");
    std::istringstream is(os.str());
    FieldDump dump = read_field_dump(is, "mem");
    ScalarField back = field_from_dump(dump, g);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(back.values[i] == h.values[i]);

    SUBCASE("resolution mismatch is rejected") {
        GridPtr g2 = build_grid(2, 16, 16);
        CHECK_THROWS_AS(field_from_dump(dump, g2), std::runtime_error);
    }
}

TEST_CASE("series CSV header is pinned") {
    CHECK(std::string(series_csv_header()) ==
          "t,dt,J,V,eta,h_min,h_max,grad_h_max,rho_min,rho_max,sigma_min,sigma_max,"
          "min_radius,kappa_max,residual_sup,residual_l2,holder_gap");
    DiagnosticsRecord r;
    r.t = 0.5;
    std::string row = series_csv_row(r);
    CHECK(row.substr(0, 4) == "0.5,");
    // 17 columns
    CHECK(std::count(row.begin(), row.end(), ',') == 16);
}

TEST_CASE("config parsing: minimal, defaults, and validation") {
    std::istringstream is(minimal_cfg);
    RunSetup s = parse_config(is);
    CHECK(s.grid->dim == 2);
    CHECK(s.grid->n_lat == 32);
    CHECK(s.grid->n_lon == 64);
    CHECK(s.flow.k == 1);
    CHECK(s.flow.step_cap_delta == 1e-3);
    CHECK(s.flow.tol_stationary == 1e-9);
    CHECK(s.output_dir == "out");
    CHECK(s.h0.values[0] == 1.0);
}

TEST_CASE("config rejections carry line and key") {
    SUBCASE("k out of range") {
        std::string text = std::string(minimal_cfg);
        text.replace(text.find("k = 1"), 5, "k = 3");
        std::istringstream is(text);
        try {
            parse_config(is);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(e.key == "k");
            CHECK(e.line == 4);
            CHECK(std::string(e.what()).find("line 4") != std::string::npos);
        }
    }
    SUBCASE("unknown key") {
        std::string text = std::string(minimal_cfg) + "mystery = 4\n";
        std::istringstream is(text);
        try {
            parse_config(is);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(e.key == "mystery");
            CHECK(e.line == 11);
        }
    }
    SUBCASE("bad number") {
        std::string text = std::string(minimal_cfg);
        text.replace(text.find("phi.p = 2"), 9, "phi.p = x");
        std::istringstream is(text);
        CHECK_THROWS_AS(parse_config(is), ConfigError);
    }
    SUBCASE("duplicate key") {
        std::string text = std::string(minimal_cfg) + "k = 2\n";
        std::istringstream is(text);
        try {
            parse_config(is);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(e.key == "k");
            CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
        }
    }
    SUBCASE("odd n_lat") {
        std::string text = std::string(minimal_cfg);
        text.replace(text.find("n_lat = 32"), 10, "n_lat = 31");
        std::istringstream is(text);
        CHECK_THROWS_AS(parse_config(is), ConfigError);
    }
    SUBCASE("negative f") {
        std::string text = std::string(minimal_cfg);
        text.replace(text.find("f.params = 1"), 12, "f.params = -1");
        std::istringstream is(text);
        CHECK_THROWS_AS(parse_config(is), ConfigError);
    }
}

TEST_CASE("harmonic_sum fields evaluate the stated basis") {
    std::string text = std::string(minimal_cfg);
    text.replace(text.find("h0.kind = sphere"), 16,
                 "h0.kind = harmonic_perturbed_sphere");
    text.replace(text.find("h0.params = 1"), 13, "h0.params = 1 2 0 0.1 0");
    std::istringstream is(text);
    RunSetup s = parse_config(is);
    // h0 = 1 + 0.1 P_2(cos theta)
    for (int r = 0; r < s.grid->n_lat; ++r) {
        double c = std::cos(s.grid->theta[r]);
        double expect = 1.0 + 0.1 * (3 * c * c - 1) / 2.0;
        CHECK(s.h0.values[s.grid->node_index(r, 0)] ==
              doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("f loaded from a dump file round-trips bit-exactly") {
    GridPtr g = build_grid(2, 32, 64);
    ScalarField f(g);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    for (auto& v : f.values) v = dist(rng);
    std::string path = (temp_dir() / "f_dump.field").string();
    write_field_file(path, f, "f for round trip");

    std::string text = std::string(minimal_cfg);
    text.replace(text.find("f.kind = constant"), 17, "f.kind = file");
    text.replace(text.find("f.params = 1"), 12, "f.params = " + path);
    std::istringstream is(text);
    RunSetup s = parse_config(is);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(s.flow.f.values[i] == f.values[i]);
}

TEST_CASE("run_command: stationary sphere writes one CSV row and a manifest") {
    auto out = temp_dir() / "run_stationary";
    std::filesystem::remove_all(out);
    std::string cfg = std::string(minimal_cfg) + "output.dir = " + out.string() + "\n";
    std::string path = write_temp("stationary.cfg", cfg);

    std::ostringstream log;
    int code = run_command(path, log);
    CHECK(code == exit_ok);

    std::string series = slurp((out / "series.csv").string());
    std::istringstream ss(series);
    std::string line;
    int rows = 0;
    std::string first_row;
    while (std::getline(ss, line))
        if (!line.empty()) {
            if (rows == 1) first_row = line;
            ++rows;
        }
    CHECK(rows == 2);  // header + one record
    // residual_sup is the 15th column
    {
        std::istringstream rs(first_row);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(rs, tok, ',')) cols.push_back(tok);
        REQUIRE(cols.size() == 17);
        CHECK(std::abs(std::stod(cols[14])) <= 1e-12);
    }

    std::string manifest = slurp((out / "manifest").string());
    CHECK(manifest.find("status converged") != std::string::npos);
    CHECK(manifest.find("sha256:") != std::string::npos);
    CHECK(manifest.find("series.csv") != std::string::npos);

    SUBCASE("rerun produces byte-identical series.csv") {
        std::string before = series;
        auto out2 = temp_dir() / "run_stationary2";
        std::filesystem::remove_all(out2);
        std::string cfg2 = std::string(minimal_cfg) + "output.dir = " + out2.string() + "\n";
        std::string path2 = write_temp("stationary2.cfg", cfg2);
        std::ostringstream log2;
        CHECK(run_command(path2, log2) == exit_ok);
        CHECK(slurp((out2 / "series.csv").string()) == before);
    }
}

TEST_CASE("run_command exit codes: invalid config") {
    std::string path = write_temp("bad.cfg", "dim = 5\n");
    std::ostringstream log;
    CHECK(run_command(path, log) == exit_invalid_config);
    CHECK(check_command(path, log) == exit_invalid_config);
}

TEST_CASE("check_command: p = 1.5 thm2 fails with a printed witness") {
    std::string cfg =
        "dim = 2\nn_lat = 16\nn_lon = 16\nk = 1\n"
        "phi.kind = power\nphi.p = 1.5\n"
        "f.kind = constant\nf.params = 1\n"
        "h0.kind = sphere\nh0.params = 1\n"
        "check.mode = thm2\n";
    std::string path = write_temp("check_fail.cfg", cfg);
    std::ostringstream log;
    int code = check_command(path, log);
    CHECK(code == exit_check_failed);
    CHECK(log.str().find("witness") != std::string::npos);

    SUBCASE("p = 3 with a = 2 passes thm1") {
        std::string good =
            "dim = 2\nn_lat = 16\nn_lon = 16\nk = 1\n"
            "phi.kind = power\nphi.p = 3\nphi.a = 2\n"
            "f.kind = constant\nf.params = 1\n"
            "h0.kind = sphere\nh0.params = 1\n";
        std::string gpath = write_temp("check_ok.cfg", good);
        std::ostringstream glog;
        CHECK(check_command(gpath, glog) == exit_ok);
    }
}

TEST_CASE("export_mesh: unit sphere vertices at distance 1") {
    GridPtr g = build_grid(2, 16, 32);
    ScalarField h(g, 1.0);
    std::string fpath = (temp_dir() / "unit.field").string();
    write_field_file(fpath, h);
    std::string mpath = (temp_dir() / "unit.obj").string();
    std::ostringstream log;
    CHECK(export_mesh_command(fpath, mpath, log) == exit_ok);

    std::ifstream is(mpath);
    std::string tag;
    int vertices = 0, faces = 0;
    while (is >> tag) {
        if (tag == "v") {
            double x, y, z;
            is >> x >> y >> z;
            CHECK(std::abs(std::sqrt(x * x + y * y + z * z) - 1.0) <= 1e-12);
            ++vertices;
        } else if (tag == "f") {
            int a, b, c, d;
            is >> a >> b >> c >> d;
            CHECK(a >= 1);
            CHECK(d <= static_cast<int>(g->n_nodes()));
            ++faces;
        } else {
            std::string rest;
            std::getline(is, rest);
        }
    }
    CHECK(vertices == static_cast<int>(g->n_nodes()));
    CHECK(faces == (g->n_lat - 1) * g->n_lon);
}

TEST_CASE("environment variable overrides the output directory") {
    auto out = temp_dir() / "env_dir";
    std::filesystem::remove_all(out);
    std::string cfg = std::string(minimal_cfg) + "output.dir = should_not_be_used\n";
    std::string path = write_temp("env.cfg", cfg);
    setenv("OCMFLOW_OUTPUT_DIR", out.string().c_str(), 1);
    std::ostringstream log;
    int code = run_command(path, log);
    unsetenv("OCMFLOW_OUTPUT_DIR");
    CHECK(code == exit_ok);
    CHECK(std::filesystem::exists(out / "series.csv"));
    CHECK(!std::filesystem::exists("should_not_be_used"));
}

TEST_CASE("sha256 known answers") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("circle run through the cli pipeline") {
    auto out = temp_dir() / "run_circle";
    std::filesystem::remove_all(out);
    std::string cfg =
        "dim = 1\n"
        "n_lon = 64\n"
        "k = 1\n"
        "phi.kind = power\nphi.p = 2\n"
        "f.kind = constant\nf.params = 1\n"
        "h0.kind = harmonic_perturbed_sphere\n"
        "h0.params = 1 2 0 0.05 0\n"
        "output.dir = " + out.string() + "\n" +
        "output.every = 0\n";
    std::string path = write_temp("circle.cfg", cfg);
    std::ostringstream log;
    CHECK(run_command(path, log) == exit_ok);
    std::string manifest = slurp((out / "manifest").string());
    CHECK(manifest.find("status converged") != std::string::npos);
}
