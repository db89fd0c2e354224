// SPDX-License-Identifier: Apache-2.0
//
// Field snapshot container. Header carries (n_max, seed, t); payload is the
// stored half-spectrum as (k, Re u_k, Im u_k) triples in lexicographic k
// order. Two interchangeable encodings: a line-oriented text form using
// shortest round-trip decimals and a packed binary form. Both round-trip
// bit-exactly.

#pragma once

#include <charconv>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgns/spectral_field.hpp"
#include "sgns/truncation.hpp"

namespace sgns {

struct SnapshotMeta {
    int n_max = 0;
    std::uint64_t seed = 0;
    double t = 0.0;
};

enum class SnapshotFormat { text, binary };

namespace detail {

inline constexpr char kSnapshotMagic[9] = "SGNSNAP1"; // 8 payload bytes
inline constexpr const char* kSnapshotTextTag = "sgns-snapshot v1";

inline void append_double(std::string& s, double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc())
        throw std::runtime_error("snapshot: double formatting failed");
    s.append(buf, p);
}

inline double parse_double(const std::string& tok, const char* what) {
    double x = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw std::runtime_error(std::string("snapshot: bad ") + what + " value '" + tok + "'");
    return x;
}

template <class T>
void put_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_raw(std::istream& is, const char* what) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error(std::string("snapshot: truncated ") + what);
    return v;
}

} // namespace detail

inline void write_snapshot(std::ostream& os, const SpectralField& f, const SnapshotMeta& meta,
                           SnapshotFormat fmt) {
    const ModeTable& t = f.table();
    if (meta.n_max != t.n_max())
        throw std::invalid_argument("write_snapshot: meta.n_max disagrees with field truncation");
    if (fmt == SnapshotFormat::binary) {
        os.write(detail::kSnapshotMagic, 8);
        detail::put_raw(os, static_cast<std::int32_t>(t.n_max()));
        detail::put_raw(os, meta.seed);
        detail::put_raw(os, meta.t);
        detail::put_raw(os, static_cast<std::int32_t>(t.half_count()));
        for (int i = 0; i < t.half_count(); ++i) {
            const WaveVector& k = t.half_mode(i);
            detail::put_raw(os, static_cast<std::int32_t>(k[0]));
            detail::put_raw(os, static_cast<std::int32_t>(k[1]));
            detail::put_raw(os, static_cast<std::int32_t>(k[2]));
            const Vec3c& c = f.coeffs()[static_cast<std::size_t>(i)];
            for (int j = 0; j < 3; ++j) detail::put_raw(os, c[static_cast<std::size_t>(j)].real());
            for (int j = 0; j < 3; ++j) detail::put_raw(os, c[static_cast<std::size_t>(j)].imag());
        }
    } else {
        std::string out;
        out += detail::kSnapshotTextTag;
        out += '\n';
        out += "n_max " + std::to_string(t.n_max()) + '\n';
        out += "seed " + std::to_string(meta.seed) + '\n';
        out += "t ";
        detail::append_double(out, meta.t);
        out += '\n';
        out += "modes " + std::to_string(t.half_count()) + '\n';
        for (int i = 0; i < t.half_count(); ++i) {
            const WaveVector& k = t.half_mode(i);
            out += std::to_string(k[0]) + ' ' + std::to_string(k[1]) + ' ' + std::to_string(k[2]);
            const Vec3c& c = f.coeffs()[static_cast<std::size_t>(i)];
            for (int j = 0; j < 3; ++j) {
                out += ' ';
                detail::append_double(out, c[static_cast<std::size_t>(j)].real());
            }
            for (int j = 0; j < 3; ++j) {
                out += ' ';
                detail::append_double(out, c[static_cast<std::size_t>(j)].imag());
            }
            out += '\n';
        }
        os << out;
    }
    if (!os) throw std::runtime_error("write_snapshot: stream write failed");
}

inline SpectralField read_snapshot(std::istream& is, SnapshotMeta* meta_out = nullptr) {
    char magic[8] = {};
    is.read(magic, 8);
    if (!is) throw std::runtime_error("read_snapshot: stream too short for header");
    SnapshotMeta meta;
    std::shared_ptr<const ModeTable> table;
    std::vector<Vec3c> coeffs;
    if (std::memcmp(magic, detail::kSnapshotMagic, 8) == 0) {
        const auto n = detail::get_raw<std::int32_t>(is, "n_max");
        if (n < 1) throw std::runtime_error("read_snapshot: invalid n_max");
        meta.n_max = n;
        meta.seed = detail::get_raw<std::uint64_t>(is, "seed");
        meta.t = detail::get_raw<double>(is, "t");
        const auto count = detail::get_raw<std::int32_t>(is, "mode count");
        table = ModeTable::get(n);
        if (count != table->half_count())
            throw std::runtime_error("read_snapshot: mode count disagrees with n_max");
        coeffs.resize(static_cast<std::size_t>(count));
        for (std::int32_t i = 0; i < count; ++i) {
            WaveVector k{detail::get_raw<std::int32_t>(is, "k"),
                         detail::get_raw<std::int32_t>(is, "k"),
                         detail::get_raw<std::int32_t>(is, "k")};
            if (!(k == table->half_mode(i)))
                throw std::runtime_error("read_snapshot: mode " + std::to_string(i) +
                                         " out of lexicographic order");
            double re[3], im[3];
            for (double& x : re) x = detail::get_raw<double>(is, "coefficient");
            for (double& x : im) x = detail::get_raw<double>(is, "coefficient");
            coeffs[static_cast<std::size_t>(i)] = {std::complex<double>(re[0], im[0]),
                                                   std::complex<double>(re[1], im[1]),
                                                   std::complex<double>(re[2], im[2])};
        }
    } else {
        // Text form: re-read from the start through a line scanner.
        std::string rest(std::istreambuf_iterator<char>(is), {});
        std::string all(magic, 8);
        all += rest;
        std::istringstream ls(all);
        std::string line;
        auto next_line = [&](const char* what) {
            if (!std::getline(ls, line))
                throw std::runtime_error(std::string("read_snapshot: missing ") + what);
            return line;
        };
        if (next_line("format tag") != detail::kSnapshotTextTag)
            throw std::runtime_error("read_snapshot: unrecognized snapshot format");
        auto header_field = [&](const char* key) {
            next_line(key);
            std::istringstream ts(line);
            std::string k, v;
            if (!(ts >> k >> v) || k != key)
                throw std::runtime_error(std::string("read_snapshot: expected '") + key +
                                         "' header line, got '" + line + "'");
            return v;
        };
        meta.n_max = std::stoi(header_field("n_max"));
        if (meta.n_max < 1) throw std::runtime_error("read_snapshot: invalid n_max");
        meta.seed = std::stoull(header_field("seed"));
        meta.t = detail::parse_double(header_field("t"), "t");
        const int count = std::stoi(header_field("modes"));
        table = ModeTable::get(meta.n_max);
        if (count != table->half_count())
            throw std::runtime_error("read_snapshot: mode count disagrees with n_max");
        coeffs.resize(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            next_line("mode row");
            std::istringstream ts(line);
            int kx, ky, kz;
            if (!(ts >> kx >> ky >> kz))
                throw std::runtime_error("read_snapshot: bad mode row '" + line + "'");
            if (!(WaveVector{kx, ky, kz} == table->half_mode(i)))
                throw std::runtime_error("read_snapshot: mode " + std::to_string(i) +
                                         " out of lexicographic order");
            double val[6];
            for (double& x : val) {
                std::string tok;
                if (!(ts >> tok))
                    throw std::runtime_error("read_snapshot: short mode row '" + line + "'");
                x = detail::parse_double(tok, "coefficient");
            }
            coeffs[static_cast<std::size_t>(i)] = {std::complex<double>(val[0], val[3]),
                                                   std::complex<double>(val[1], val[4]),
                                                   std::complex<double>(val[2], val[5])};
        }
    }
    if (meta_out) *meta_out = meta;
    return SpectralField::from_coeffs(std::move(table), std::move(coeffs));
}

inline void save_snapshot(const std::string& path, const SpectralField& f,
                          const SnapshotMeta& meta, SnapshotFormat fmt) {
    std::ofstream os(path, fmt == SnapshotFormat::binary
                               ? std::ios::binary | std::ios::trunc
                               : std::ios::trunc);
    if (!os) throw std::runtime_error("save_snapshot: cannot open '" + path + "'");
    write_snapshot(os, f, meta, fmt);
}

inline SpectralField load_snapshot(const std::string& path, SnapshotMeta* meta_out = nullptr) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_snapshot: cannot open '" + path + "'");
    return read_snapshot(is, meta_out);
}

} // namespace sgns
