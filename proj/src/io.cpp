#include "plsm/io.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plsm {

namespace {

// Compact SHA-256 (FIPS 180-4).
struct Sha256 {
    std::array<std::uint32_t, 8> h{0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                                   0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    std::array<std::uint8_t, 64> buf{};
    std::uint64_t total = 0;
    size_t fill = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void block(const std::uint8_t* p) {
        static constexpr std::uint32_t K[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, hh] = h;
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = S0 + maj;
            hh = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const void* data, size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        total += len;
        while (len > 0) {
            const size_t take = std::min(len, buf.size() - fill);
            std::memcpy(buf.data() + fill, p, take);
            fill += take;
            p += take;
            len -= take;
            if (fill == buf.size()) {
                block(buf.data());
                fill = 0;
            }
        }
    }

    std::string hex() {
        const std::uint64_t bits = total * 8;
        const std::uint8_t pad = 0x80;
        update(&pad, 1);
        const std::uint8_t zero = 0;
        while (fill != 56) update(&zero, 1);
        std::uint8_t len_be[8];
        for (int i = 0; i < 8; ++i) len_be[i] = std::uint8_t(bits >> (56 - 8 * i));
        update(len_be, 8);
        char out[65];
        for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
        return std::string(out, 64);
    }
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Sha256 s;
    s.update(bytes.data(), bytes.size());
    return s.hex();
}

std::string sha256_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sha256_file_hex: cannot open " + path);
    Sha256 s;
    char chunk[65536];
    while (in.read(chunk, sizeof chunk) || in.gcount() > 0) s.update(chunk, size_t(in.gcount()));
    return s.hex();
}

void write_complex_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m,
                              const std::string& header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_complex_matrix_csv: cannot open " + path);
    out << "# " << header << "\n";
    out << "# rows=" << m.rows() << " cols=" << m.cols() << " layout=re,im row-major\n";
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", m(i, j).real(), m(i, j).imag());
            out << buf << (j + 1 < m.cols() ? "," : "");
        }
        out << "\n";
    }
}

Eigen::MatrixXcd read_complex_matrix_csv(const std::string& path, std::string* header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_complex_matrix_csv: cannot open " + path);
    std::string line;
    Eigen::Index rows = -1, cols = -1;
    std::vector<std::vector<Complex>> data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (header && line.find("rows=") == std::string::npos) *header = line.substr(2);
            const auto rp = line.find("rows=");
            if (rp != std::string::npos) {
                rows = std::stoll(line.substr(rp + 5));
                const auto cp = line.find("cols=");
                cols = std::stoll(line.substr(cp + 5));
            }
            continue;
        }
        std::vector<Complex> row;
        const char* p = line.c_str();
        char* end = nullptr;
        while (*p) {
            const double re = std::strtod(p, &end);
            if (end == p) break;
            p = *end == ',' ? end + 1 : end;
            const double im = std::strtod(p, &end);
            p = *end == ',' ? end + 1 : end;
            row.emplace_back(re, im);
        }
        data.push_back(std::move(row));
    }
    if (data.empty()) throw std::runtime_error("read_complex_matrix_csv: no data in " + path);
    Eigen::MatrixXcd m(Eigen::Index(data.size()), Eigen::Index(data[0].size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (Eigen::Index(data[i].size()) != m.cols())
            throw std::runtime_error("read_complex_matrix_csv: ragged rows in " + path);
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = data[size_t(i)][size_t(j)];
    }
    if (rows >= 0 && (rows != m.rows() || cols != m.cols()))
        throw std::runtime_error("read_complex_matrix_csv: header dimensions disagree with data");
    return m;
}

void write_indicator_csv(const std::string& path, const IndicatorMap& map) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_indicator_csv: cannot open " + path);
    out << "x,y,value\n";
    char buf[96];
    for (int iy = 0; iy < map.grid.ny; ++iy)
        for (int ix = 0; ix < map.grid.nx; ++ix) {
            const Point2 p = map.grid.node(ix, iy);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", p.x, p.y,
                          map.values[map.grid.index(ix, iy)]);
            out << buf << "\n";
        }
}

void write_indicator_pgm(const std::string& path, const IndicatorMap& map) {
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (int iy = 0; iy < map.grid.ny; ++iy)
        for (int ix = 0; ix < map.grid.nx; ++ix) {
            const Point2 p = map.grid.node(ix, iy);
            if (p.norm() > map.grid.mask_radius) continue;
            const double v = map.values[map.grid.index(ix, iy)];
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    if (!(vmax > vmin)) vmax = vmin + 1.0;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_indicator_pgm: cannot open " + path);
    out << "P2\n" << map.grid.nx << " " << map.grid.ny << "\n255\n";
    for (int iy = map.grid.ny - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < map.grid.nx; ++ix) {
            const double v = map.values[map.grid.index(ix, iy)];
            const int g = int(255.0 * (v - vmin) / (vmax - vmin) + 0.5);
            out << std::clamp(g, 0, 255) << (ix + 1 < map.grid.nx ? " " : "");
        }
        out << "\n";
    }
}

void write_rate_fits_csv(const std::string& path, std::span<const RateFit> fits) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_rate_fits_csv: cannot open " + path);
    out << "quantity,slope,intercept,r_squared,eps_norm_pairs\n";
    char buf[64];
    for (const RateFit& f : fits) {
        out << f.quantity;
        std::snprintf(buf, sizeof buf, ",%.12g,%.12g,%.12g", f.slope, f.intercept, f.r_squared);
        out << buf;
        for (size_t i = 0; i < f.eps_values.size(); ++i) {
            std::snprintf(buf, sizeof buf, ",%.12g:%.12g", f.eps_values[i], f.norms[i]);
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace plsm
