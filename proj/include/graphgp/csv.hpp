#pragma once

#include "graphgp/common.hpp"
#include "graphgp/rng.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// CSV / text artifact helpers. Numbers are formatted with std::to_chars
// (shortest round-trip, '.' decimal separator, locale independent) so that
// artifacts are byte-identical across runs. All files use LF line endings.

namespace graphgp {

inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) {
        append_row_raw(header);
    }

    void append_row_raw(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

/// Cell builder: accepts doubles, integers and strings.
struct Cell {
    std::string text;
    Cell(double v) : text(format_double(v)) {}
    Cell(int v) : text(format_int(v)) {}
    Cell(long v) : text(format_int(v)) {}
    Cell(long long v) : text(format_int(v)) {}
    Cell(std::size_t v) : text(format_int(static_cast<long long>(v))) {}
    Cell(const char* s) : text(s) {}
    Cell(std::string s) : text(std::move(s)) {}
};

inline std::vector<std::string> row(std::initializer_list<Cell> cells) {
    std::vector<std::string> r;
    r.reserve(cells.size());
    for (const auto& c : cells) r.push_back(c.text);
    return r;
}

/// Dense matrix as CSV with a c0..c{n-1} header row.
inline std::string matrix_to_csv(const Matrix& m) {
    std::vector<std::string> header;
    header.reserve(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back("c" + format_int(j));
    CsvWriter w(header);
    std::vector<std::string> cells(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            cells[static_cast<std::size_t>(j)] = format_double(m(i, j));
        w.append_row_raw(cells);
    }
    return w.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty()
                                            ? std::filesystem::path(".")
                                            : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("csv.write_text_file", "cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("csv.read_text_file", "cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string checksum_hex(const std::string& bytes) {
    std::uint64_t h = fnv1a64(bytes);
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

} // namespace graphgp
