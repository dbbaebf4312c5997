/**
 * Fixed-point geometry, filtration schedules, clique complexes, and simplex
 * encodings, pinned against exact hand-computed values for the fixed
 * pentagon and square configurations.
 */

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qtda/qtda.hpp"

using namespace qtda;

namespace {

PointCloud pentagon() {
    return make_point_cloud({{0, 0}, {3, 0}, {3, -2}, {0, -2}, {1.5, -3}},
                            FixedPointFormat{32, 12}, {"A", "B", "C", "D", "E"});
}

}  // namespace

TEST_CASE("fixed-point quantization round trip") {
    const FixedPointFormat fmt{32, 12};
    for (double v : {0.0, 1.0, -2.0, 1.5, 3.0, -3.0, 0.000244140625}) {
        const std::int64_t raw = quantize(v, fmt);
        CHECK(dequantize(raw, fmt) == v);  // representable values are exact
    }
    CHECK_THROWS_AS(quantize(1e9, FixedPointFormat{16, 12}), ConfigError);
}

TEST_CASE("pentagon filtration schedule matches hand computation") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    CHECK(dm.value(0, 1) == 9.0);   // AB^2
    CHECK(dm.value(1, 2) == 4.0);   // BC^2
    CHECK(dm.value(0, 2) == 13.0);  // AC^2

    const FiltrationSchedule fs = filtration_scales(dm);
    REQUIRE(fs.size() == 6);
    const double expect[] = {0.0, std::sqrt(3.25), 2.0, 3.0, std::sqrt(11.25),
                             std::sqrt(13.0)};
    for (int i = 0; i < 6; ++i) CHECK_THAT(fs.mu(i), Catch::Matchers::WithinAbs(expect[i], 1e-12));
}

TEST_CASE("pentagon complexes at the two working scales") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);

    const CliqueComplex at_mu1 = build_clique_complex(dm, fs, 2, 3);  // mu = 2
    CHECK(at_mu1.count(0) == 5);
    CHECK(at_mu1.count(1) == 4);  // AD, BC, CE, DE
    CHECK(at_mu1.count(2) == 0);

    const CliqueComplex at_mu2 = build_clique_complex(dm, fs, 3, 3);  // mu = 3
    CHECK(at_mu2.count(0) == 5);
    CHECK(at_mu2.count(1) == 6);  // AB, AD, BC, CD, CE, DE
    CHECK(at_mu2.count(2) == 1);  // CDE
    CHECK(at_mu2.count(3) == 0);
    CHECK(at_mu2.label_of({2, 3, 4}) == "CDE");
}

TEST_CASE("clique complexes are flag complexes closed under faces") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 5);
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < n; ++i) pts.push_back({uni(rng), uni(rng), uni(rng)});
        const DistanceMatrix dm = pairwise_distances(make_point_cloud(pts, FixedPointFormat{32, 12}));
        const FiltrationSchedule fs = filtration_scales(dm);
        const int s = static_cast<int>(rng() % fs.size());
        const CliqueComplex cx = build_clique_complex(dm, fs, s, 3);
        for (int k = 1; k <= 3; ++k) {
            for (const Simplex& simp : cx.simplices(k)) {
                // Every facet must be present (face closure).
                for (std::size_t drop = 0; drop < simp.size(); ++drop) {
                    Simplex face;
                    for (std::size_t t = 0; t < simp.size(); ++t)
                        if (t != drop) face.push_back(simp[t]);
                    CHECK(membership(face, cx));
                }
                // Every pair of vertices must satisfy the scale threshold (flag property).
                for (std::size_t a = 0; a < simp.size(); ++a)
                    for (std::size_t b = a + 1; b < simp.size(); ++b)
                        CHECK(dm.sq_raw[simp[a]][simp[b]] <= cx.sq_scale_raw);
            }
        }
    }
}

TEST_CASE("complexes grow monotonically along the filtration") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    for (int i = 0; i + 1 < fs.size(); ++i) {
        const CliqueComplex a = build_clique_complex(dm, fs, i, 3);
        const CliqueComplex b = build_clique_complex(dm, fs, i + 1, 3);
        for (int k = 0; k <= 3; ++k)
            for (const Simplex& s : a.simplices(k)) CHECK(membership(s, b));
    }
}

TEST_CASE("direct and compact simplex encodings round-trip") {
    // Edge {2, 4} of 7 vertices: one-hot mask with positions 2 and 4 set.
    const SimplexEncoding direct = encode_simplex({2, 4}, SimplexEncoding::Kind::direct, 7);
    CHECK(direct.to_string() == "0101000");
    CHECK(decode_simplex(direct) == std::vector<int>{2, 4});

    // Triangle {3, 5, 7} of 7 vertices: three 3-bit registers.
    const SimplexEncoding compact = encode_simplex({3, 5, 7}, SimplexEncoding::Kind::compact, 7);
    CHECK(compact.register_bits == 3);
    CHECK(compact.to_string() == "011 101 111");
    CHECK(decode_simplex(compact) == std::vector<int>{3, 5, 7});

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 30);
        std::vector<int> tuple;
        for (int v = 1; v <= n; ++v)
            if (rng() % 3 == 0) tuple.push_back(v);
        if (tuple.empty()) tuple.push_back(1 + static_cast<int>(rng() % n));
        for (auto kind : {SimplexEncoding::Kind::direct, SimplexEncoding::Kind::compact})
            CHECK(decode_simplex(encode_simplex(tuple, kind, n)) == tuple);
    }
}

TEST_CASE("invalid encodings are rejected") {
    CHECK_THROWS_AS(encode_simplex({}, SimplexEncoding::Kind::direct, 5), ConfigError);
    CHECK_THROWS_AS(encode_simplex({3, 2}, SimplexEncoding::Kind::compact, 5), ConfigError);
    CHECK_THROWS_AS(encode_simplex({0, 2}, SimplexEncoding::Kind::compact, 5), ConfigError);
    CHECK_THROWS_AS(encode_simplex({2, 6}, SimplexEncoding::Kind::direct, 5), ConfigError);

    SimplexEncoding enc = encode_simplex({1, 3}, SimplexEncoding::Kind::compact, 5);
    enc.registers = {0, 3};  // all-zero register marks padding, invalid inside a simplex
    CHECK_THROWS_AS(decode_simplex(enc), ConfigError);
}

TEST_CASE("point-cloud files load identically from CSV and JSON") {
    const PointCloud a = load_point_cloud(std::string(DATA_DIR) + "/pentagon.csv", "csv", 32, 12);
    const PointCloud b = load_point_cloud(std::string(DATA_DIR) + "/pentagon.json", "json", 32, 12);
    REQUIRE(a.size() == 5);
    REQUIRE(b.size() == 5);
    CHECK(a.labels == b.labels);
    CHECK(a.coords == b.coords);
    CHECK(a.labels[4] == "E");
    CHECK_THROWS_AS(load_point_cloud("/nonexistent/file.csv", "csv", 32, 12), IoError);
}

TEST_CASE("complex and matrix serialization shapes") {
    const DistanceMatrix dm = pairwise_distances(pentagon());
    const FiltrationSchedule fs = filtration_scales(dm);
    const CliqueComplex cx = build_clique_complex(dm, fs, 3, 2);
    const nlohmann::json cj = complex_to_json(cx);
    CHECK(cj.contains("scale_index"));
    CHECK(cj["simplices"]["1"].size() == 6);

    const nlohmann::json mj = matrix_to_json(boundary_matrix(cx, 1), FieldTag::rational());
    CHECK(mj["rows"].size() == 5);
    CHECK(mj["cols"].size() == 6);
    CHECK(mj["field"] == "Q");
    for (const auto& e : mj["entries"]) {
        REQUIRE(e.size() == 3);
        CHECK(e[2].is_string());
    }
}
