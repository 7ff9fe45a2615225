#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "nnrank/errors.hpp"
#include "nnrank/nonneg_rank.hpp"
#include "nnrank/tensor.hpp"
#include "nnrank/tensor_io.hpp"
#include "test_support.hpp"

using namespace nnrank;

TEST_CASE("shape derived quantities") {
    const Shape s{2, 3, 4};
    CHECK(s.order() == 3);
    CHECK(s.total() == 24);
    CHECK(s.dim_sum() == 9);
    CHECK(s.fiber_mode() == 2);
    CHECK(s.slice_bound() == 6);

    // Ties pick the last maximal mode; order does not matter for the bound.
    CHECK(Shape{3, 2, 3}.fiber_mode() == 2);
    CHECK(Shape{4, 2, 3}.fiber_mode() == 0);
    CHECK(Shape{4, 2, 3}.slice_bound() == 6);
    CHECK(Shape{5}.slice_bound() == 1);

    CHECK_THROWS_AS(Shape({2, 0}), InvalidArgument);
    CHECK_THROWS_AS(Shape(std::vector<std::size_t>{}), InvalidArgument);
}

TEST_CASE("row-major layout, last index fastest") {
    const Shape s{2, 3, 4};
    const std::size_t idx[] = {1, 2, 3};
    CHECK(s.offset(idx) == 1 * 12 + 2 * 4 + 3);
    for (std::size_t off = 0; off < s.total(); ++off) CHECK(s.offset(s.unravel(off)) == off);
    const std::size_t bad[] = {2, 0, 0};
    CHECK_THROWS_AS((void)s.offset(bad), InvalidArgument);
}

TEST_CASE("outer product") {
    SUBCASE("basis vectors") {
        const Rank1Term term{{{1, 0}, {1, 0}, {1, 0}}};
        const DenseTensor t = outer(term, Shape{2, 2, 2});
        CHECK(t.at({0, 0, 0}) == 1.0);
        CHECK(std::accumulate(t.values().begin(), t.values().end(), 0.0) == 1.0);
    }
    SUBCASE("all ones") {
        const DenseTensor t = outer(Rank1Term{{{1, 1}, {1, 1}}}, Shape{2, 2});
        CHECK(std::all_of(t.values().begin(), t.values().end(), [](double v) { return v == 1.0; }));
    }
    SUBCASE("entrywise products") {
        const Rank1Term term{{{2, 0}, {0, 3}, {1, 1}}};
        const Shape shape{2, 2, 2};
        const DenseTensor t = outer(term, shape);
        // Hand evaluation: only i_1 = 1, i_2 = 2 survive, giving 2*3*1.
        for (std::size_t off = 0; off < 8; ++off) {
            const auto i = shape.unravel(off);
            const double expected = (i[0] == 0 && i[1] == 1) ? 6.0 : 0.0;
            CHECK(t[off] == expected);
        }
    }
    SUBCASE("zero iff some factor is zero") {
        CHECK(outer(Rank1Term{{{0, 0}, {1, 2}}}, Shape{2, 2}).is_zero());
        CHECK_FALSE(outer(Rank1Term{{{0, 1}, {1, 2}}}, Shape{2, 2}).is_zero());
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(outer(Rank1Term{{{1, 1}, {1, 1, 1}}}, Shape{2, 2}), ShapeMismatch);
        CHECK_THROWS_AS(outer(Rank1Term{{{1, 1}}}, Shape{2, 2}), ShapeMismatch);
    }
}

TEST_CASE("eval_cp") {
    const Shape shape{2, 2, 2};
    CHECK(eval_cp(Decomposition(shape)).is_zero());

    const Decomposition dec(shape, {Rank1Term{{{1, 0}, {1, 0}, {1, 0}}}, Rank1Term{{{0, 1}, {0, 1}, {0, 1}}}});
    const DenseTensor t = eval_cp(dec);
    CHECK(t.at({0, 0, 0}) == 1.0);
    CHECK(t.at({1, 1, 1}) == 1.0);
    CHECK(t.norm() == doctest::Approx(std::sqrt(2.0)));

    CHECK_THROWS_AS(Decomposition(shape, {Rank1Term{{{1, 0}, {1, 0}}}}), ShapeMismatch);
}

TEST_CASE("eval_cp reproduces the slice decomposition of random tensors") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const DenseTensor t = testing::random_nonnegative(testing::random_shape(rng, 4, 4), rng);
        const DenseTensor back = eval_cp(canonical_decomposition(t));
        CHECK(frobenius_distance(back, t) <= 1e-12 * std::max(1.0, t.norm()));
    }
}

TEST_CASE("frobenius distance") {
    const DenseTensor ones(Shape{2, 2}, {1, 1, 1, 1});
    CHECK(frobenius_distance(ones, ones) == 0.0);
    CHECK(frobenius_distance(zero_matrix(2, 2), ones) == 2.0);

    DenseTensor t0(Shape{2, 2, 2}, {0, 1, 1, 0, 1, 0, 0, 1});
    DenseTensor bumped = t0;
    bumped.at({0, 0, 0}) += 0.01;
    CHECK(frobenius_distance(t0, bumped) == doctest::Approx(0.01).epsilon(1e-14));

    CHECK_THROWS_AS(frobenius_distance(ones, t0), ShapeMismatch);
}

TEST_CASE("flatten") {
    const DenseTensor m = make_matrix(2, 2, {1, 2, 3, 4});
    const std::size_t first[] = {0};
    CHECK(flatten(m, first) == m);

    DenseTensor e(Shape{2, 2, 2});
    e.at({0, 0, 0}) = 1.0;
    const DenseTensor f = flatten(e, first);
    CHECK(f.shape() == Shape{2, 4});
    CHECK(f(0, 0) == 1.0);
    CHECK(f.is_nonnegative());
    CHECK(std::count(f.values().begin(), f.values().end(), 1.0) == 1);

    const std::size_t none[] = {0, 1, 2};
    CHECK_THROWS_AS(flatten(e, std::span<const std::size_t>{}), InvalidArgument);
    CHECK_THROWS_AS(flatten(e, none), InvalidArgument);
}

TEST_CASE("flattenings of rank-1 tensors have matrix rank 1") {
    const Shape shape{2, 2, 2};
    const DenseTensor t = outer(Rank1Term{{{1, 2}, {1, 1}, {3, 0}}}, shape);
    for (const auto& modes : std::vector<std::vector<std::size_t>>{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
        CHECK(matrix_rank(flatten(t, modes)) == 1);
    }
}

TEST_CASE("flatten preserves the multiset of entries") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseTensor t = testing::random_nonnegative(testing::random_shape(rng, 4, 4, 2), rng);
        std::vector<double> a(t.values().begin(), t.values().end());
        std::sort(a.begin(), a.end());
        for (std::size_t j = 0; j < t.shape().order(); ++j) {
            const std::size_t modes[] = {j};
            const DenseTensor f = flatten(t, modes);
            std::vector<double> b(f.values().begin(), f.values().end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
        }
    }
}

TEST_CASE("matrix rank") {
    CHECK(matrix_rank(identity_matrix(3), 1e-9) == 3);
    CHECK(matrix_rank(zero_matrix(2, 5)) == 0);
    CHECK(matrix_rank(testing::fooling4x4()) == 3);
    CHECK(matrix_rank(make_matrix(2, 3, {1, 2, 3, 2, 4, 6})) == 1);
    CHECK_THROWS_AS(matrix_rank(DenseTensor(Shape{2, 2, 2})), ShapeMismatch);
}

TEST_CASE("multilinearity: eval_cp of a concatenation is the sum") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Shape shape = testing::random_shape(rng, 4, 4);
        const Decomposition a = testing::random_decomposition(shape, 1 + rng() % 3, rng);
        const Decomposition b = testing::random_decomposition(shape, rng() % 3, rng);
        const DenseTensor lhs = eval_cp(a.concatenated(b));
        const DenseTensor rhs = eval_cp(a) + eval_cp(b);
        CHECK(frobenius_distance(lhs, rhs) <= 1e-12 * std::max(1.0, lhs.norm()));
    }
}

TEST_CASE("mode permutation commutes with eval_cp") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const Shape shape = testing::random_shape(rng, 4, 4);
        std::vector<std::size_t> perm(shape.order());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const Decomposition dec = testing::random_decomposition(shape, 3, rng);
        const DenseTensor lhs = eval_cp(dec.permuted(perm));
        const DenseTensor rhs = eval_cp(dec).permuted(perm);
        REQUIRE(lhs.shape() == rhs.shape());
        CHECK(frobenius_distance(lhs, rhs) <= 1e-12 * std::max(1.0, lhs.norm()));
    }
}

TEST_CASE("triangle inequality on random triples") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const Shape shape = testing::random_shape(rng, 3, 4);
        const DenseTensor a = testing::random_nonnegative(shape, rng);
        const DenseTensor b = testing::random_nonnegative(shape, rng);
        const DenseTensor c = testing::random_nonnegative(shape, rng);
        CHECK(frobenius_distance(a, c) <= frobenius_distance(a, b) + frobenius_distance(b, c) + 1e-12);
        CHECK(frobenius_distance(a, b) == frobenius_distance(b, a));
    }
}

TEST_CASE("tensor JSON") {
    const DenseTensor t(Shape{2, 3}, {0, 1, 2, 3, 4, 5.5});
    CHECK(tensor_from_json(tensor_to_json(t)) == t);

    using nlohmann::json;
    CHECK_THROWS_AS(tensor_from_json(json::parse(R"({"dims":[2,2],"values":[1,2,3]})")), FormatError);
    CHECK_THROWS_AS(tensor_from_json(json::parse(R"({"dims":[2,0],"values":[]})")), FormatError);
    CHECK_THROWS_AS(tensor_from_json(json::parse(R"({"values":[1]})")), FormatError);
    const auto negative = json::parse(R"({"dims":[2],"values":[1,-1]})");
    CHECK_NOTHROW(tensor_from_json(negative));
    CHECK_THROWS_AS(tensor_from_json(negative, Nonnegativity::required), NegativeEntry);

    const auto path = std::filesystem::temp_directory_path() / "nnrank_tensor_io_test.json";
    write_tensor_file(path, t);
    CHECK(read_tensor_file(path) == t);
    std::filesystem::remove(path);
}

TEST_CASE("shape parsing") {
    CHECK(parse_shape("2,2,3") == Shape{2, 2, 3});
    CHECK(parse_shape(" 4 , 2 ") == Shape{4, 2});
    CHECK_THROWS_AS(parse_shape("2,,3"), InvalidArgument);
    CHECK_THROWS_AS(parse_shape("2,x"), InvalidArgument);
    CHECK_THROWS_AS(parse_shape("2,0"), InvalidArgument);
    CHECK(format_shape(Shape{2, 3}) == "2x3");
}
