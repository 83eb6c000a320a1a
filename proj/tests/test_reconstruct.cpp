#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace circnet;
using circnet::testing::connection_set;
using circnet::testing::fixture;
using circnet::testing::positive_pairs;
using circnet::testing::q;

namespace {

const Tolerance big_tol{2e-6, 1e-12};

Network single_edge(const Rational& c)
{
    Network net;
    net.add_node(1, true);
    net.add_node(2, true);
    net.add_edge(1, 2, c);
    return net;
}

// MR straight from its definition: scan every circular pair and keep those
// whose two sides sit strictly inside / strictly outside the cut arc.
template <Scalar T>
IntMatrix brute_max_respected(const Matrix<T>& m, const Tolerance& tol)
{
    const std::size_t n = m.size();
    const CutFrame frame(n);
    IntMatrix out(2 * n, std::vector<int>(2 * n, 0));
    const auto pairs = enumerate_circular_pairs(CircularOrder::counting(n), n / 2);
    std::vector<int> sign(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) sign[p] = minor_sign(m, pairs[p], tol);
    for (std::size_t i = 1; i <= 2 * n; ++i)
        for (std::size_t j = i + 1; j <= 2 * n; ++j)
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                if (sign[p] <= 0) continue;
                auto all = [&](const std::vector<int>& side, bool in) {
                    return std::all_of(side.begin(), side.end(), [&](int t) {
                        const auto pos = static_cast<std::size_t>(t);
                        return in ? frame.inside(i, j, pos) : frame.outside(i, j, pos);
                    });
                };
                const auto& pr = pairs[p];
                if ((all(pr.p, true) && all(pr.q, false)) || (all(pr.q, true) && all(pr.p, false)))
                    out[i - 1][j - 1] = std::max(out[i - 1][j - 1], static_cast<int>(pr.p.size()));
            }
    return out;
}

IntMatrix brute_reentrants(const StrandMatching& matching)
{
    const std::size_t s = 2 * matching.terminals();
    IntMatrix out(s, std::vector<int>(s, 0));
    for (std::size_t i = 1; i <= s; ++i)
        for (std::size_t j = i + 1; j <= s; ++j)
            for (auto [a, b] : matching.pairs())
                if (static_cast<std::size_t>(a) >= i && static_cast<std::size_t>(b) <= j - 1) ++out[i - 1][j - 1];
    return out;
}

bool kalmanson_for_some_order(const Matrix<Rational>& w)
{
    std::vector<std::size_t> perm(w.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        const auto n = perm.size();
        for (std::size_t a = 0; a < n && ok; ++a)
            for (std::size_t b = a + 1; b < n && ok; ++b)
                for (std::size_t c = b + 1; c < n && ok; ++c)
                    for (std::size_t d = c + 1; d < n && ok; ++d) {
                        auto dist = [&](std::size_t x, std::size_t y) { return w(perm[x], perm[y]); };
                        const Rational diag = dist(a, c) + dist(b, d);
                        ok = diag >= dist(a, b) + dist(c, d) && diag >= dist(a, d) + dist(b, c);
                    }
        if (ok) return true;
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return false;
}

} // namespace

TEST_CASE("terminals between cut points")
{
    const auto nt = num_terminals(6);
    const std::vector<int> row1{0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5};
    const std::vector<int> row2{0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4};
    CHECK(nt[0] == row1);
    CHECK(nt[1] == row2);
    CHECK(num_terminals(2)[0] == std::vector<int>{0, 0, 1, 1});

    const CutFrame frame(6);
    for (std::size_t i = 1; i <= 12; ++i)
        for (std::size_t j = i + 1; j <= 12; ++j) {
            int count = 0;
            for (std::size_t t = 1; t <= 6; ++t) count += frame.inside(i, j, t);
            CHECK(nt[i - 1][j - 1] == count);
        }
}

TEST_CASE("max respected on the six-terminal blob")
{
    const auto s = read_matrix_file<double>(fixture("big_S.txt"));
    const auto mr = max_respected(s);
    CHECK(mr[0][6] == 3);
    CHECK(mr[1][7] == 2);
    CHECK(mr[2][8] == 2);
    CHECK(mr == brute_max_respected(s, Tolerance{}));

    // the full-size witness for MR(1,7)
    const auto exact = read_matrix_file<Rational>(fixture("big_S.txt"));
    const double minor = circular_minor(exact, CircularPair{{1, 2, 3}, {6, 5, 4}}).get_d();
    CHECK(minor == doctest::Approx(16.0 / 18659).epsilon(1e-5));
}

TEST_CASE("max respected on small networks matches the definition")
{
    const auto m2 = response_matrix<Rational>(single_edge(2));
    const auto mr2 = max_respected(m2);
    CHECK(mr2 == brute_max_respected(m2, Tolerance{}));
    CHECK(mr2[0][2] == 1);
    int ones = 0;
    for (const auto& row : mr2) ones += std::count(row.begin(), row.end(), 1);
    CHECK(ones == 1);

    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto net = random_circular_planar(5, 2, seed);
        const auto m = response_matrix<Rational>(net);
        CHECK(max_respected(m) == brute_max_respected(m, Tolerance{}));
    }
}

TEST_CASE("reentrants match their definition")
{
    const StrandMatching mats(5, {{1, 7}, {2, 8}, {3, 5}, {4, 9}, {6, 10}});
    CHECK(reentrants(mats) == brute_reentrants(mats));
    const StrandMatching edge(2, {{1, 3}, {2, 4}});
    CHECK(reentrants(edge) == brute_reentrants(edge));
}

TEST_CASE("strand matching from a response matrix")
{
    const auto mats = read_network_file(fixture("mats.net"));
    const auto m = response_matrix<Rational>(mats);
    const StrandMatching expected(5, {{1, 7}, {2, 8}, {3, 5}, {4, 9}, {6, 10}});
    CHECK(strand_matching_from_response(m) == expected);
    CHECK(medial_strand_matching(mats).matching == expected);

    CHECK(strand_matching_from_response(response_matrix<Rational>(single_edge(1))) ==
          StrandMatching(2, {{1, 3}, {2, 4}}));

    const auto s = read_matrix_file<double>(fixture("big_S.txt"));
    CHECK(strand_matching_from_response(s) == StrandMatching(6, {{1, 7}, {2, 9}, {3, 8}, {4, 10}, {5, 11}, {6, 12}}));
    const auto t = read_matrix_file<double>(fixture("big_T.txt"));
    CHECK(strand_matching_from_response(t) == StrandMatching(4, {{1, 5}, {2, 6}, {3, 7}, {4, 8}}));
}

TEST_CASE("strand matching agrees with the medial graph on minimal networks")
{
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 25 && seed < 400; ++seed) {
        const std::size_t n = 3 + seed % 4;
        const auto g = circnet::testing::random_minimal_network(n, 5, seed);
        if (!g) continue;
        const auto m = response_matrix<Rational>(g->net);
        INFO("seed " << seed << " matching " << g->matching.to_string());
        CHECK(medial_strand_matching(g->net).matching == g->matching);
        CHECK(strand_matching_from_response(m) == g->matching);
        ++checked;
    }
    CHECK(checked == 25);
}

TEST_CASE("graph from a strand matching")
{
    const auto edge = matching_to_graph(StrandMatching(2, {{1, 3}, {2, 4}}));
    CHECK(edge.edges().size() == 1);
    CHECK(edge.interior().empty());

    const auto apart = matching_to_graph(StrandMatching(2, {{1, 2}, {3, 4}}));
    CHECK(apart.edges().empty());

    const auto mats_graph = matching_to_graph(StrandMatching(5, {{1, 7}, {2, 8}, {3, 5}, {4, 9}, {6, 10}}));
    CHECK_NOTHROW(mats_graph.validate_embedding());
    const auto m = response_matrix<Rational>(read_network_file(fixture("mats.net")));
    CHECK(connection_set(mats_graph, 2) == positive_pairs(m, 2));
    CHECK(medial_strand_matching(mats_graph).minimal());
}

TEST_CASE("bridge verification")
{
    const auto cut = read_network_file(fixture("cutvertex.net"));
    const auto m = response_matrix<Rational>(cut);
    const auto order = CircularOrder::counting(8);
    const auto check = verify_bridge(m, order, {5, 6, 7, 8});
    CHECK_FALSE(check.verified);
    REQUIRE(check.blocking);
    CHECK(check.blocking->to_string() == "(4,5;1,8)");
    // both one-sided halves connect, the union does not
    const auto conns = connection_set(cut, 2);
    CHECK(conns.count(*check.blocking) == 0);
    CHECK(conns.count(CircularPair{{4}, {1}}) == 1);
    CHECK(conns.count(CircularPair{{5}, {8}}) == 1);

    const auto mats_m = response_matrix<Rational>(read_network_file(fixture("mats.net")));
    CHECK(verify_bridge(mats_m, CircularOrder::counting(5), {2, 3}).verified);

    const auto big = read_matrix_file<Rational>(fixture("big_M.txt"));
    const auto ten = CircularOrder::counting(10);
    CHECK(verify_bridge(big, ten, {2, 3, 4}).verified);
    CHECK(verify_bridge(big, ten, {5, 6, 7}).verified);
    CHECK(circular_minor(big, CircularPair{{1, 2, 5}, {9, 8, 7}}) > 0);
}

TEST_CASE("blob resistance submatrices")
{
    const auto wd = read_matrix_file<double>(fixture("big_W.txt"));
    const auto order = CircularOrder::counting(10);
    const auto s = split_decomposition(wd, order, big_tol);
    const auto d = decompose(s);
    REQUIRE(d.blobs.size() == 2);

    const auto w = read_matrix_file<Rational>(fixture("big_W.txt"));
    const auto p = read_matrix_file<Rational>(fixture("big_P.txt"));
    const auto qm = read_matrix_file<Rational>(fixture("big_Q.txt"));
    bool saw_p = false, saw_q = false;
    for (const auto& blob : d.blobs) {
        const auto [sub, reps] = blob_submatrix(w, blob, order);
        CHECK(reps == representatives(blob, order));
        if (reps == p.labels()) {
            CHECK(sub == p);
            CHECK(sub(0, 1) == q("2414/813"));
            saw_p = true;
        } else if (reps == qm.labels()) {
            CHECK(sub == qm);
            CHECK(sub(1, 2) == q("47/154"));
            saw_q = true;
        }
    }
    CHECK(saw_p);
    CHECK(saw_q);
}

TEST_CASE("a single-blob submatrix is the whole matrix")
{
    const auto w = read_matrix_file<Rational>(fixture("counter_W.txt"));
    const auto order = CircularOrder::counting(5);
    const auto d = decompose(split_decomposition(w, order));
    REQUIRE(d.blobs.size() == 1);
    const auto [sub, reps] = blob_submatrix(w, d.blobs[0], order);
    CHECK(reps == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(sub == w);
}

TEST_CASE("pipeline gates")
{
    SUBCASE("non-planar counterexample stops at planarity")
    {
        const auto m = read_matrix_file<Rational>(fixture("counter_M.txt"));
        const auto r = reconstruct_pipeline(m);
        REQUIRE(r.failure);
        CHECK(r.failure->step == 2);
        CHECK(r.failure->gate == "planarity");
        CHECK(r.failure->witness.find("(1,2;4,3)") != std::string::npos);
    }
    SUBCASE("single terminal is rejected")
    {
        const auto m = Matrix<Rational>::from_rows({{0}});
        const auto r = reconstruct_pipeline(m);
        REQUIRE(r.failure);
        CHECK(r.failure->step == 1);
    }
    SUBCASE("bad sign pattern is rejected")
    {
        const auto m = Matrix<Rational>::from_rows({{-1, 2, -1}, {2, -1, -1}, {-1, -1, 2}});
        const auto r = reconstruct_pipeline(m);
        REQUIRE(r.failure);
        CHECK(r.failure->step == 1);
        CHECK(r.failure->gate == "validation");
    }
    SUBCASE("given order that is not Kalmanson")
    {
        const auto w = read_matrix_file<Rational>(fixture("mats_W.txt"));
        PipelineOptions opt;
        opt.input_is_resistance = true;
        opt.order = CircularOrder({1, 4, 2, 3, 5}); // splits {4,5} from its arc
        const auto r = reconstruct_pipeline(w, opt);
        REQUIRE(r.failure);
        CHECK(r.failure->step == 2);
        CHECK(r.failure->gate == "kalmanson");
    }
    SUBCASE("no Kalmanson order at all")
    {
        const auto w = read_matrix_file<Rational>(fixture("k5_W.txt"));
        CHECK(w == w_from_m(response_matrix<Rational>(read_network_file(fixture("k5.net")))));
        REQUIRE_FALSE(kalmanson_for_some_order(w));
        PipelineOptions opt;
        opt.input_is_resistance = true;
        const auto r = reconstruct_pipeline(w, opt);
        REQUIRE(r.failure);
        CHECK(r.failure->step == 2);
        CHECK(r.failure->gate == "order");
    }
}

TEST_CASE("pipeline on the ten-terminal resistances")
{
    const auto w = read_matrix_file<double>(fixture("big_W.txt"));
    PipelineOptions opt;
    opt.input_is_resistance = true;
    opt.tol = big_tol;
    const auto r = reconstruct_pipeline(w, opt);
    REQUIRE(r.ok());
    const auto& plan = *r.plan;
    CHECK(plan.order.equivalent(CircularOrder::counting(10)));
    CHECK(plan.splits.splits.size() == 24);
    CHECK(plan.blobs.size() == 2);
    REQUIRE(plan.bridges.size() == 3);
    for (const auto& b : plan.bridges) CHECK(b.check.verified);
    CHECK_FALSE(plan.obstruction);
    // k <= 2 agrees exactly; larger k is limited by the precision of the data
    CHECK(connection_set(plan.network, 2) == positive_pairs(plan.m, 2, big_tol));
}

TEST_CASE("tree-like responses are rebuilt exactly")
{
    Network tree;
    for (int t = 1; t <= 4; ++t) tree.add_node(t, true);
    tree.add_node(5, false);
    tree.add_node(6, false);
    tree.add_edge(1, 5, q("2"));
    tree.add_edge(2, 5, q("1/3"));
    tree.add_edge(5, 6, q("5/2"));
    tree.add_edge(6, 3, q("1"));
    tree.add_edge(6, 4, q("4"));
    const auto m = response_matrix<Rational>(tree);
    const auto r = reconstruct_pipeline(m);
    REQUIRE(r.ok());
    const auto& plan = *r.plan;
    CHECK(plan.blobs.empty());
    for (const auto& e : plan.network.edges()) CHECK(e.conductance.has_value());
    CHECK(w_from_m(response_matrix<Rational>(plan.network)) == w_from_m(m));
}

TEST_CASE("single blob reassembly keeps the blob graph")
{
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 10 && seed < 300; ++seed) {
        const auto g = circnet::testing::random_minimal_network(4 + seed % 3, 4, seed);
        if (!g) continue;
        const auto m = response_matrix<Rational>(g->net);
        const auto r = reconstruct_pipeline(m);
        REQUIRE(r.ok());
        const auto& plan = *r.plan;
        INFO("seed " << seed);
        const std::size_t k = m.size() / 2 + 1;
        CHECK(connection_set(plan.network, k) == connection_set(g->net, k));
        if (plan.blobs.size() == 1 && plan.blobs[0].blob.groups.size() == m.size())
            CHECK(plan.network.edges().size() == plan.blobs[0].graph.edges().size());
        ++checked;
    }
    CHECK(checked == 10);
}

TEST_CASE("plan text is stable")
{
    const auto m = response_matrix<Rational>(read_network_file(fixture("mats.net")));
    const auto r = reconstruct_pipeline(m);
    REQUIRE(r.ok());
    std::ostringstream a, b;
    write_plan(a, *r.plan);
    write_plan(b, *reconstruct_pipeline(m).plan);
    CHECK(a.str() == b.str());

    std::ifstream golden(fixture("mats_plan.txt"));
    REQUIRE(golden);
    std::stringstream expected;
    expected << golden.rdbuf();
    CHECK(a.str() == expected.str());

    for (const char* section : {"ORDER\n", "SPLITS\n", "BRIDGES\n", "OBSTRUCTION\n", "BLOB 1\n", "NETWORK\n"})
        CHECK(a.str().find(section) != std::string::npos);
}
