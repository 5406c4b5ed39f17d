#include "graphgp/dataset.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace graphgp;

namespace {

const std::filesystem::path kDataDir = GRAPHGP_TEST_DATA_DIR;

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / ("graphgp_test_" + name);
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
};

} // namespace

TEST_CASE("toy dataset loads") {
    auto [g, splits] = load_dataset(kDataDir / "toy_edges.txt", kDataDir / "toy_features.csv",
                                    kDataDir / "toy_labels.txt", kDataDir / "toy_splits.txt");
    REQUIRE(g.n == 3);
    // duplicate edge 1-0 deduplicates; 2 undirected edges
    REQUIRE(g.adjacency.sum() == 4.0);
    REQUIRE(g.adjacency(0, 1) == 1.0);
    REQUIRE(g.adjacency(1, 2) == 1.0);
    REQUIRE(g.adjacency(0, 2) == 0.0);
    REQUIRE(g.adjacency == g.adjacency.transpose().eval());
    REQUIRE(g.features.rows() == 3);
    REQUIRE(g.features.cols() == 2);
    REQUIRE(g.features(1, 0) == -0.25);
    REQUIRE((*g.labels)(1) == 1);
    REQUIRE(splits.train == std::vector<int>{0, 1});
    REQUIRE(splits.val.empty());
    REQUIRE(splits.test == std::vector<int>{2});
}

TEST_CASE("dataset error paths") {
    std::string features = "1.0,2.0\n3.0,4.0\n5.0,6.0\n";
    std::string labels = "0\n1\n0\n";
    std::string splits = "train: 0\nval: 1\ntest: 2\n";

    SECTION("edge index out of range") {
        TempFile e("edges_oob.txt", "0 7\n");
        TempFile f("feat1.csv", features);
        TempFile l("lab1.txt", labels);
        TempFile s("spl1.txt", splits);
        REQUIRE_THROWS_AS(load_dataset(e.path, f.path, l.path, s.path), ParseError);
    }
    SECTION("non-rectangular feature rows") {
        TempFile e("edges_ok.txt", "0 1\n");
        TempFile f("feat_ragged.csv", "1.0,2.0\n3.0\n5.0,6.0\n");
        TempFile l("lab2.txt", labels);
        TempFile s("spl2.txt", splits);
        REQUIRE_THROWS_AS(load_dataset(e.path, f.path, l.path, s.path), ParseError);
    }
    SECTION("overlapping splits") {
        TempFile e("edges_ok2.txt", "0 1\n1 2\n");
        TempFile f("feat2.csv", features);
        TempFile l("lab3.txt", labels);
        TempFile s("spl_overlap.txt", "train: 0,2\nval: 1\ntest: 2\n");
        REQUIRE_THROWS_AS(load_dataset(e.path, f.path, l.path, s.path), InvalidParameterError);
    }
    SECTION("label count mismatch") {
        TempFile e("edges_ok3.txt", "0 1\n");
        TempFile f("feat3.csv", features);
        TempFile l("lab_short.txt", "0\n1\n");
        TempFile s("spl3.txt", splits);
        REQUIRE_THROWS_AS(load_dataset(e.path, f.path, l.path, s.path), ParseError);
    }
    SECTION("garbage edge token") {
        TempFile e("edges_bad.txt", "0 x\n");
        TempFile f("feat4.csv", features);
        TempFile l("lab4.txt", labels);
        TempFile s("spl4.txt", splits);
        REQUIRE_THROWS_AS(load_dataset(e.path, f.path, l.path, s.path), ParseError);
    }
}
