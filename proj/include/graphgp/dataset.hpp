#pragma once

#include "graphgp/graph.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

// Plain-text dataset ingestion. Formats (all UTF-8, LF or CRLF tolerated):
//   edges:    one edge per line, two 0-based node ids separated by whitespace,
//             lines starting with '#' ignored
//   features: CSV, row i = features of node i
//   labels:   one integer per line, row i = class of node i
//   splits:   three lines "train:", "val:", "test:" each followed by
//             comma-separated 0-based indices

namespace graphgp {

/// Disjoint train/val/test node index sets.
struct SplitIndices {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;

    void validate(int n) const {
        if (train.empty())
            throw InvalidParameterError("gp_inference.SplitIndices", "train split must be nonempty");
        std::set<int> seen;
        auto check = [&](const std::vector<int>& idx, const char* name) {
            for (int i : idx) {
                if (i < 0 || i >= n)
                    throw InvalidParameterError("gp_inference.SplitIndices",
                                                std::string(name) + " index " + std::to_string(i) +
                                                    " out of range [0, " + std::to_string(n) + ")");
                if (!seen.insert(i).second)
                    throw InvalidParameterError("gp_inference.SplitIndices",
                                                "splits overlap at index " + std::to_string(i));
            }
        };
        check(train, "train");
        check(val, "val");
        check(test, "test");
    }
};

namespace detail {

inline std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline long parse_long(const std::string& token, const std::string& where, int line_no) {
    long value = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw ParseError(where, "line " + std::to_string(line_no) + ": not an integer: '" + token + "'");
    return value;
}

inline double parse_double(const std::string& token, const std::string& where, int line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(where, "line " + std::to_string(line_no) + ": not a number: '" + token + "'");
    }
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path,
                                           const std::string& where) {
    std::ifstream in(path);
    if (!in) throw ParseError(where, "cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

} // namespace detail

/// Features CSV -> n x d matrix. Rows must be rectangular.
inline Matrix load_feature_csv(const std::filesystem::path& path) {
    const std::string where = "graph_core.load_dataset(features)";
    auto lines = detail::read_lines(path, where);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string t = detail::trimmed(lines[i]);
        if (t.empty() || t[0] == '#') continue;
        std::vector<double> r;
        for (const auto& tok : detail::split_on(t, ','))
            r.push_back(detail::parse_double(detail::trimmed(tok), where, static_cast<int>(i + 1)));
        if (!rows.empty() && r.size() != rows.front().size())
            throw ParseError(where, "line " + std::to_string(i + 1) + ": row has " +
                                        std::to_string(r.size()) + " columns, expected " +
                                        std::to_string(rows.front().size()));
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ParseError(where, "no feature rows in " + path.string());
    Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return x;
}

inline SplitIndices load_split_file(const std::filesystem::path& path) {
    const std::string where = "graph_core.load_dataset(splits)";
    auto lines = detail::read_lines(path, where);
    SplitIndices splits;
    bool have_train = false, have_val = false, have_test = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string t = detail::trimmed(lines[i]);
        if (t.empty() || t[0] == '#') continue;
        auto colon = t.find(':');
        if (colon == std::string::npos)
            throw ParseError(where, "line " + std::to_string(i + 1) + ": expected 'name: indices'");
        std::string name = detail::trimmed(t.substr(0, colon));
        std::vector<int>* target = nullptr;
        if (name == "train") { target = &splits.train; have_train = true; }
        else if (name == "val") { target = &splits.val; have_val = true; }
        else if (name == "test") { target = &splits.test; have_test = true; }
        else
            throw ParseError(where, "line " + std::to_string(i + 1) + ": unknown split '" + name + "'");
        std::string rest = detail::trimmed(t.substr(colon + 1));
        if (rest.empty()) continue;
        for (const auto& tok : detail::split_on(rest, ','))
            target->push_back(static_cast<int>(
                detail::parse_long(detail::trimmed(tok), where, static_cast<int>(i + 1))));
    }
    if (!have_train || !have_val || !have_test)
        throw ParseError(where, "split file must contain train:, val: and test: lines");
    return splits;
}

/// Loads a node-classification dataset from the four text files. The feature
/// file defines n; edges are deduplicated and symmetrized; splits must be
/// disjoint and in range.
inline std::pair<Graph, SplitIndices> load_dataset(const std::filesystem::path& edge_path,
                                                   const std::filesystem::path& feature_path,
                                                   const std::filesystem::path& label_path,
                                                   const std::filesystem::path& split_path) {
    const std::string where = "graph_core.load_dataset";
    Graph g;
    g.features = load_feature_csv(feature_path);
    g.n = static_cast<int>(g.features.rows());

    // labels
    {
        auto lines = detail::read_lines(label_path, where + "(labels)");
        std::vector<int> labels;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::string t = detail::trimmed(lines[i]);
            if (t.empty() || t[0] == '#') continue;
            long v = detail::parse_long(t, where + "(labels)", static_cast<int>(i + 1));
            if (v < 0)
                throw ParseError(where + "(labels)",
                                 "line " + std::to_string(i + 1) + ": negative class id");
            labels.push_back(static_cast<int>(v));
        }
        if (static_cast<int>(labels.size()) != g.n)
            throw ParseError(where + "(labels)", "expected " + std::to_string(g.n) +
                                                     " labels, found " + std::to_string(labels.size()));
        IntVector lv(g.n);
        for (int i = 0; i < g.n; ++i) lv(i) = labels[static_cast<std::size_t>(i)];
        g.labels = lv;
    }

    // edges
    g.adjacency = Matrix::Zero(g.n, g.n);
    {
        auto lines = detail::read_lines(edge_path, where + "(edges)");
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::string t = detail::trimmed(lines[i]);
            if (t.empty() || t[0] == '#') continue;
            std::istringstream in(t);
            std::string ta, tb, extra;
            if (!(in >> ta >> tb))
                throw ParseError(where + "(edges)",
                                 "line " + std::to_string(i + 1) + ": expected two node ids");
            if (in >> extra)
                throw ParseError(where + "(edges)",
                                 "line " + std::to_string(i + 1) + ": trailing tokens");
            long a = detail::parse_long(ta, where + "(edges)", static_cast<int>(i + 1));
            long b = detail::parse_long(tb, where + "(edges)", static_cast<int>(i + 1));
            if (a < 0 || a >= g.n || b < 0 || b >= g.n)
                throw ParseError(where + "(edges)", "line " + std::to_string(i + 1) +
                                                        ": node id out of range [0, " +
                                                        std::to_string(g.n) + ")");
            if (a == b) continue; // self-loops in files are dropped
            g.adjacency(a, b) = 1.0;
            g.adjacency(b, a) = 1.0;
        }
    }

    SplitIndices splits = load_split_file(split_path);
    splits.validate(g.n);
    g.check_invariants();
    return {std::move(g), std::move(splits)};
}

} // namespace graphgp
