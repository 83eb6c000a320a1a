#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace circnet;
using circnet::testing::fixture;
using circnet::testing::q;

TEST_CASE("validation of the seven-node response matrix")
{
    const auto m = read_matrix_file<Rational>(fixture("mats_M.txt"));
    const auto r = validate_response(m);
    CHECK(r.valid());
    CHECK(r.connected);
    REQUIRE(r.cut_points.size() == 1);
    CHECK(r.cut_points[0].terminal == 3);
    auto comps = r.cut_points[0].components;
    std::sort(comps.begin(), comps.end());
    CHECK(comps == std::vector<std::vector<int>>{{1, 4, 5}, {2}});
}

TEST_CASE("validation failures")
{
    auto bad = read_matrix_file<Rational>(fixture("mats_M.txt"));
    bad(0, 0) = 1;
    const auto r = validate_response(bad);
    CHECK_FALSE(r.valid());
    CHECK(std::find(r.failures.begin(), r.failures.end(), "sign pattern") != r.failures.end());

    CHECK_FALSE(validate_response(Matrix<Rational>::from_rows({{-1}})).valid());

    auto asym = read_matrix_file<Rational>(fixture("mats_M.txt"));
    asym(0, 2) += q("1/100");
    CHECK_FALSE(validate_response(asym).symmetric);

    auto split = Matrix<Rational>::from_rows({{-1, 1, 0, 0}, {1, -1, 0, 0}, {0, 0, -2, 2}, {0, 0, 2, -2}});
    CHECK_FALSE(validate_response(split).connected);
}

TEST_CASE("printed ten-terminal response matrix does not have zero row sums")
{
    // Entries are rounded fractions; the rows miss zero by up to about 1.4.
    const auto m = read_matrix_file<Rational>(fixture("big_M.txt"));
    const auto r = validate_response(m);
    CHECK(r.symmetric);
    CHECK(r.sign_pattern);
    CHECK_FALSE(r.zero_row_sums);
}

TEST_CASE("float validation symmetrizes small asymmetries")
{
    auto m = read_matrix_file<double>(fixture("big_S.txt"));
    m(0, 1) += 1e-13;
    const auto r = validate_response(m, Tolerance{1e-3, 1e-12});
    CHECK(r.symmetric);
    CHECK(r.symmetrized);
    const auto s = symmetrized(m);
    CHECK(s(0, 1) == s(1, 0));
}

TEST_CASE("resistance from response")
{
    const auto m = read_matrix_file<Rational>(fixture("mats_M.txt"));
    const auto w = w_from_m(m);
    CHECK(w == read_matrix_file<Rational>(fixture("mats_W.txt")));
    CHECK(w(0, 4) == q("17/12"));

    for (const char* c : {"1", "5/2", "1/9"}) {
        const auto two = Matrix<Rational>::from_rows({{-q(c), q(c)}, {q(c), -q(c)}});
        CHECK(w_from_m(two)(0, 1) == 1 / q(c));
    }
}

TEST_CASE("response from resistance")
{
    CHECK(m_from_w(read_matrix_file<Rational>(fixture("mats_W.txt"))) ==
          read_matrix_file<Rational>(fixture("mats_M.txt")));
    const auto m = m_from_w(read_matrix_file<Rational>(fixture("counter_W.txt")));
    CHECK(m == read_matrix_file<Rational>(fixture("counter_M.txt")));
    CHECK(m(0, 1) == 2);
}

TEST_CASE("response/resistance round trip on random networks")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto m = response_matrix<Rational>(random_circular_planar(6, 3, seed));
        CHECK(m_from_w(w_from_m(m)) == m);
    }
}

TEST_CASE("restriction of resistances")
{
    const auto r = read_matrix_file<Rational>(fixture("mats_R.txt"));
    const std::vector<int> five{1, 2, 3, 4, 5};
    CHECK(restrict_resistance(r, five) == read_matrix_file<Rational>(fixture("mats_W.txt")));
    const std::vector<int> all{1, 2, 3, 4, 5, 6, 7};
    CHECK(restrict_resistance(r, all) == r);
    const std::vector<int> pair{5, 2};
    const auto sub = restrict_resistance(r, pair);
    CHECK(sub.labels() == pair);
    CHECK(sub(0, 1) == 2);
}

TEST_CASE("restriction commutes with Kron reduction")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto m = response_matrix<Rational>(random_circular_planar(6, 2, seed));
        const auto w = w_from_m(m);
        const std::vector<int> subset{1, 3, 4, 6};
        const std::vector<std::size_t> keep{0, 2, 3, 5};
        CHECK(m_from_w(restrict_resistance(w, subset)) == schur_complement(m, keep));
    }
}

TEST_CASE("resistance validation")
{
    CHECK(validate_resistance(read_matrix_file<Rational>(fixture("mats_W.txt"))).valid());
    auto w = read_matrix_file<Rational>(fixture("mats_W.txt"));
    w(0, 1) = w(1, 0) = 10;
    CHECK_FALSE(validate_resistance(w).triangle);
    w(0, 1) = w(1, 0) = 0;
    CHECK_FALSE(validate_resistance(w).positive_off_diagonal);
    CHECK_THROWS_AS(m_from_w(Matrix<Rational>::from_rows({{0}})), NotResistanceError);
}

TEST_CASE("clique components follow nonzero entries")
{
    auto split = Matrix<Rational>::from_rows({{-1, 1, 0, 0}, {1, -1, 0, 0}, {0, 0, -2, 2}, {0, 0, 2, -2}});
    auto comps = clique_components(split);
    std::sort(comps.begin(), comps.end());
    CHECK(comps == std::vector<std::vector<int>>{{1, 2}, {3, 4}});
}
