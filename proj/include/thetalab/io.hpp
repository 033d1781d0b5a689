#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "grid.hpp"
#include "version.hpp"

namespace thetalab::io {

/// Reads a real matrix from text. Entries are separated by commas and/or
/// whitespace, one row per line; blank lines and lines starting with '#'
/// are skipped.
inline Eigen::MatrixXd parse_matrix(std::istream& in, const std::string& source = "<stream>")
{
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t' || c == '\r') c = ' ';
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || used == 0)
                throw ValidationError(source + ":" + std::to_string(lineno) + ": cannot parse '" + tok + "' as a number");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(rows.front().size()) + " entries, found " +
                                  std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(source + ": no matrix entries found");
    Eigen::MatrixXd M(Eigen::Index(rows.size()), Eigen::Index(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) M(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
    return M;
}

inline Eigen::MatrixXd read_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix file '" + path + "'");
    return parse_matrix(in, path);
}

// ---------------------------------------------------------------------------
// Field files
//
// Binary layout, all little-endian:
//   offset 0   4 bytes   magic "TLGF"
//   offset 4   uint32    format version (1)
//   offset 8   uint32    dimension n
//   offset 12  uint32    points per axis N
//   offset 16  float64   half-width L
//   offset 24  float64   re, im of each value in row-major order (2 N^n doubles)
//
// CSV layout (selected by a ".csv" extension): comment lines starting with
// '#', then the header "n,N,L", one line with those values, the header
// "re,im" and N^n value lines in row-major order.

inline constexpr std::uint32_t kFieldFormatVersion = 1;

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v)
{
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f64(std::ostream& out, double d)
{
    const auto v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t get_u32(std::istream& in)
{
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw ValidationError("field file: unexpected end of data");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

inline double get_f64(std::istream& in)
{
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw ValidationError("field file: unexpected end of data");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return std::bit_cast<double>(v);
}

inline bool has_csv_extension(const std::string& path)
{
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

} // namespace detail

inline void write_field_binary(std::ostream& out, const GridField& f)
{
    const GridMeta& m = f.meta();
    out.write("TLGF", 4);
    detail::put_u32(out, kFieldFormatVersion);
    detail::put_u32(out, std::uint32_t(m.n));
    detail::put_u32(out, std::uint32_t(m.N));
    detail::put_f64(out, m.L);
    for (std::size_t i = 0; i < f.size(); ++i) {
        detail::put_f64(out, f[i].real());
        detail::put_f64(out, f[i].imag());
    }
}

inline GridField read_field_binary(std::istream& in)
{
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "TLGF", 4) != 0)
        throw ValidationError("field file: bad magic, expected TLGF");
    const std::uint32_t version = detail::get_u32(in);
    if (version != kFieldFormatVersion)
        throw ValidationError("field file: unsupported format version " + std::to_string(version));
    const std::uint32_t n = detail::get_u32(in), N = detail::get_u32(in);
    const double L = detail::get_f64(in);
    if (n < 1 || n > 8 || N < 2 || N > (1u << 20)) throw ValidationError("field file: implausible grid header");
    const GridMeta meta(int(n), int(N), L);
    GridField f(meta);
    for (std::size_t i = 0; i < meta.size(); ++i) {
        const double re = detail::get_f64(in);
        const double im = detail::get_f64(in);
        f[i] = cplx(re, im);
    }
    return f;
}

inline void write_field_csv(std::ostream& out, const GridField& f)
{
    const GridMeta& m = f.meta();
    out << "# thetalab " << version << " field\n";
    out << "n,N,L\n" << m.n << ',' << m.N << ',' << detail::format_double(m.L) << '\n';
    out << "re,im\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        out << detail::format_double(f[i].real()) << ',' << detail::format_double(f[i].imag()) << '\n';
}

inline GridField read_field_csv(std::istream& in, const std::string& source = "<stream>")
{
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return line;
        }
        throw ValidationError(source + ": unexpected end of field data");
    };
    auto fail = [&](const std::string& what) {
        return ValidationError(source + ":" + std::to_string(lineno) + ": " + what);
    };
    if (next() != "n,N,L") throw fail("expected header 'n,N,L'");
    std::istringstream head(next());
    int n = 0, N = 0;
    double L = 0.0;
    char c1 = 0, c2 = 0;
    if (!(head >> n >> c1 >> N >> c2 >> L) || c1 != ',' || c2 != ',') throw fail("malformed grid header");
    const GridMeta meta(n, N, L);
    if (next() != "re,im") throw fail("expected header 're,im'");
    GridField f(meta);
    for (std::size_t i = 0; i < meta.size(); ++i) {
        std::istringstream row(next());
        double re = 0.0, im = 0.0;
        char c = 0;
        if (!(row >> re >> c >> im) || c != ',') throw fail("malformed value line");
        f[i] = cplx(re, im);
    }
    return f;
}

/// Reads a field, choosing the CSV layout for a ".csv" extension.
inline GridField read_field(const std::string& path)
{
    const bool csv = detail::has_csv_extension(path);
    std::ifstream in(path, csv ? std::ios::in : std::ios::binary);
    if (!in) throw ValidationError("cannot open field file '" + path + "'");
    return csv ? read_field_csv(in, path) : read_field_binary(in);
}

inline void write_field(const std::string& path, const GridField& f)
{
    const bool csv = detail::has_csv_extension(path);
    std::ofstream out(path, csv ? std::ios::out : std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    if (csv) write_field_csv(out, f);
    else write_field_binary(out, f);
    if (!out) throw Error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Tables

/// A CSV table: a comment line with the version and seed, a header row and
/// numeric rows in %.16e format.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write_table(std::ostream& out, const Table& t, std::uint64_t seed)
{
    out << "# thetalab " << version << " seed=" << seed << '\n';
    for (std::size_t j = 0; j < t.header.size(); ++j) out << (j ? "," : "") << t.header[j];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << detail::format_double(row[j]);
        out << '\n';
    }
}

} // namespace thetalab::io
