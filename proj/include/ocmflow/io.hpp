#pragma once

// Text serialization: field dumps (reload-exact decimal text), the per-step
// diagnostics CSV, Wavefront-style mesh export of the embedding, and the run
// manifest with content digests.

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocmflow/convex_geometry.hpp"
#include "ocmflow/diagnostics.hpp"
#include "ocmflow/grid.hpp"

namespace ocmflow {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- field dump -----------------------------------------------------------------
// '#' metadata lines, then one row per node: angles then value.

inline void write_field(std::ostream& os, const ScalarField& field,
                        const std::string& note = "") {
    const SphericalGrid& g = *field.grid;
    os << "# ocmflow field\n";
    os << "# dim " << g.dim << "\n";
    if (g.dim == 2) os << "# n_lat " << g.n_lat << "\n";
    os << "# n_lon " << g.n_lon << "\n";
    if (!note.empty()) os << "# " << note << "\n";
    if (g.dim == 1) {
        for (int j = 0; j < g.n_lon; ++j)
            os << format_double(g.theta[j]) << " " << format_double(field.values[j])
               << "\n";
    } else {
        for (int r = 0; r < g.n_lat; ++r)
            for (int j = 0; j < g.n_lon; ++j)
                os << format_double(g.theta[r]) << " " << format_double(g.phi[j]) << " "
                   << format_double(field.values[g.node_index(r, j)]) << "\n";
    }
}

inline void write_field_file(const std::string& path, const ScalarField& field,
                             const std::string& note = "") {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_field(os, field, note);
}

struct FieldDump {
    int dim = 0;
    int n_lat = 0;
    int n_lon = 0;
    std::vector<double> values;
};

inline FieldDump read_field_dump(std::istream& is, const std::string& origin) {
    FieldDump dump;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            long v;
            if (key == "dim" && (ls >> v)) dump.dim = static_cast<int>(v);
            if (key == "n_lat" && (ls >> v)) dump.n_lat = static_cast<int>(v);
            if (key == "n_lon" && (ls >> v)) dump.n_lon = static_cast<int>(v);
            continue;
        }
        std::istringstream ls(line);
        std::vector<double> nums;
        double x;
        while (ls >> x) nums.push_back(x);
        if (nums.empty()) continue;
        if (!ls.eof())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": malformed node row");
        if (dump.dim != 1 && dump.dim != 2)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": node row before the '# dim' header");
        std::size_t expect_cols = (dump.dim == 1) ? 2 : 3;
        if (nums.size() != expect_cols)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(expect_cols) + " columns, found " +
                                     std::to_string(nums.size()));
        dump.values.push_back(nums.back());
    }
    if (dump.dim != 1 && dump.dim != 2)
        throw std::runtime_error(origin + ": missing or invalid '# dim' header");
    std::size_t expect = (dump.dim == 1)
                             ? static_cast<std::size_t>(dump.n_lon)
                             : static_cast<std::size_t>(dump.n_lat) * dump.n_lon;
    if (dump.values.size() != expect)
        throw std::runtime_error(origin + ": expected " + std::to_string(expect) +
                                 " node rows, found " + std::to_string(dump.values.size()));
    return dump;
}

inline FieldDump read_field_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open field file: " + path);
    return read_field_dump(is, path);
}

inline ScalarField field_from_dump(const FieldDump& dump, GridPtr grid) {
    if (dump.dim != grid->dim ||
        (dump.dim == 2 && dump.n_lat != grid->n_lat) || dump.n_lon != grid->n_lon)
        throw std::runtime_error("field dump resolution does not match the grid");
    ScalarField f(grid);
    f.values = dump.values;
    return f;
}

// --- diagnostics CSV --------------------------------------------------------------

inline const char* series_csv_header() {
    return "t,dt,J,V,eta,h_min,h_max,grad_h_max,rho_min,rho_max,sigma_min,sigma_max,"
           "min_radius,kappa_max,residual_sup,residual_l2,holder_gap";
}

inline std::string series_csv_row(const DiagnosticsRecord& r) {
    std::string out;
    const double vals[] = {r.t,        r.dt,        r.J,          r.V,
                           r.eta,      r.h_min,     r.h_max,      r.grad_h_max,
                           r.rho_min,  r.rho_max,   r.sigma_min,  r.sigma_max,
                           r.min_radius, r.kappa_max, r.residual_sup, r.residual_l2,
                           r.holder_gap};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
        if (i) out += ",";
        out += format_double(vals[i]);
    }
    return out;
}

// --- mesh export ------------------------------------------------------------------
// Wavefront-style text mesh of the embedding X = grad h + h x; quad faces
// between adjacent latitude rings for the sphere, a closed polyline for the
// circle.

inline void export_mesh(std::ostream& os, const ScalarField& h) {
    const SphericalGrid& g = *h.grid;
    BodyGeometry geo = body_geometry(h);
    os << "# ocmflow mesh, dim " << g.dim << "\n";
    if (g.dim == 1) {
        for (int j = 0; j < g.n_lon; ++j)
            os << "v " << format_double(geo.embedding[2 * j]) << " "
               << format_double(geo.embedding[2 * j + 1]) << " 0\n";
        for (int j = 0; j < g.n_lon; ++j)
            os << "l " << (j + 1) << " " << ((j + 1) % g.n_lon) + 1 << "\n";
        return;
    }
    for (std::size_t i = 0; i < g.n_nodes(); ++i)
        os << "v " << format_double(geo.embedding[3 * i]) << " "
           << format_double(geo.embedding[3 * i + 1]) << " "
           << format_double(geo.embedding[3 * i + 2]) << "\n";
    for (int r = 0; r + 1 < g.n_lat; ++r)
        for (int j = 0; j < g.n_lon; ++j) {
            int jn = (j + 1) % g.n_lon;
            os << "f " << (g.node_index(r, j) + 1) << " " << (g.node_index(r, jn) + 1)
               << " " << (g.node_index(r + 1, jn) + 1) << " "
               << (g.node_index(r + 1, j) + 1) << "\n";
        }
}

// --- SHA-256 ----------------------------------------------------------------------

namespace detail {

class Sha256 {
public:
    Sha256() { reset(); }

    void reset() {
        state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                  0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
        length_ = 0;
        buffer_len_ = 0;
    }

    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        length_ += len;
        while (len > 0) {
            std::size_t take = std::min(len, std::size_t(64) - buffer_len_);
            std::memcpy(buffer_ + buffer_len_, p, take);
            buffer_len_ += take;
            p += take;
            len -= take;
            if (buffer_len_ == 64) {
                process(buffer_);
                buffer_len_ = 0;
            }
        }
    }

    std::string hex_digest() {
        std::uint64_t bits = length_ * 8;
        unsigned char pad[72] = {0x80};
        std::size_t padlen = (buffer_len_ < 56) ? 56 - buffer_len_ : 120 - buffer_len_;
        unsigned char lenbuf[8];
        for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update_raw(pad, padlen);
        update_raw(lenbuf, 8);
        static const char* hexd = "0123456789abcdef";
        std::string out;
        for (std::uint32_t w : state_)
            for (int i = 28; i >= 0; i -= 4) out += hexd[(w >> i) & 0xF];
        return out;
    }

private:
    void update_raw(const unsigned char* p, std::size_t len) {
        while (len > 0) {
            std::size_t take = std::min(len, std::size_t(64) - buffer_len_);
            std::memcpy(buffer_ + buffer_len_, p, take);
            buffer_len_ += take;
            p += take;
            len -= take;
            if (buffer_len_ == 64) {
                process(buffer_);
                buffer_len_ = 0;
            }
        }
    }

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void process(const unsigned char* chunk) {
        static const std::uint32_t K[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(chunk[4 * i]) << 24) | (std::uint32_t(chunk[4 * i + 1]) << 16) |
                   (std::uint32_t(chunk[4 * i + 2]) << 8) | std::uint32_t(chunk[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
        std::uint32_t e = state_[4], f = state_[5], g = state_[6], h = state_[7];
        for (int i = 0; i < 64; ++i) {
            std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = h + S1 + ch + K[i] + w[i];
            std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t mj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = S0 + mj;
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        state_[0] += a;
        state_[1] += b;
        state_[2] += c;
        state_[3] += d;
        state_[4] += e;
        state_[5] += f;
        state_[6] += g;
        state_[7] += h;
    }

    std::array<std::uint32_t, 8> state_;
    std::uint64_t length_ = 0;
    unsigned char buffer_[64];
    std::size_t buffer_len_ = 0;
};

}  // namespace detail

inline std::string sha256_hex(const std::string& data) {
    detail::Sha256 h;
    h.update(data.data(), data.size());
    return h.hex_digest();
}

inline std::string sha256_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for digest: " + path);
    detail::Sha256 h;
    char buf[8192];
    while (is.read(buf, sizeof buf) || is.gcount() > 0)
        h.update(buf, static_cast<std::size_t>(is.gcount()));
    return h.hex_digest();
}

}  // namespace ocmflow
