// One line per acceptance criterion. Exit status is nonzero when a criterion
// fails for a reason other than the known defects of the printed ten-terminal
// data listed in `known_red`.
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace circnet;
using circnet::testing::connection_set;
using circnet::testing::fixture;
using circnet::testing::positive_pairs;
using circnet::testing::q;

namespace {

// Tolerances pinned for the float-mode parts of criterion 4.
const Tolerance default_tol{};              // 1e-9 relative, 1e-12 floor
const Tolerance big_w_tol{2e-6, 1e-12};     // printed W carries ~4-5 significant digits

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    std::vector<std::string> known; // failing parts attributed to the printed data

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void known_red(bool ok, const std::string& what, const std::string& analysis)
    {
        if (!ok) known.push_back(what + ": " + analysis);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
Outcome guarded(F&& body)
{
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.notes.push_back(std::string("exception: ") + e.what());
    }
    return o;
}

Rational at(const Matrix<Rational>& m, int a, int b)
{
    const auto& l = m.labels();
    const auto i = static_cast<std::size_t>(std::find(l.begin(), l.end(), a) - l.begin());
    const auto j = static_cast<std::size_t>(std::find(l.begin(), l.end(), b) - l.begin());
    return m(i, j);
}

double max_abs_diff(const Matrix<Rational>& a, const Matrix<Rational>& b)
{
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(Rational(a(i, j) - b(i, j)).get_d()));
    return d;
}

Outcome criterion1()
{
    return guarded([](Outcome& o) {
        const auto t0 = Clock::now();
        const auto net = read_network_file(fixture("mats.net"));
        const auto l = laplacian<Rational>(net);
        const auto m = response_matrix<Rational>(net);
        const auto r = resistance_matrix<Rational>(net);
        const auto w = w_from_m(m);
        o.require(l == read_matrix_file<Rational>(fixture("mats_L.txt")), "L(N)");
        o.require(m == read_matrix_file<Rational>(fixture("mats_M.txt")), "M(N)");
        o.require(r == read_matrix_file<Rational>(fixture("mats_R.txt")), "R(N)");
        o.require(w == read_matrix_file<Rational>(fixture("mats_W.txt")), "W(N)");
        o.require(at(m, 5, 5) == q("-27/13"), "M55 = -27/13");
        o.require(at(w, 1, 5) == q("17/12"), "W15 = 17/12");
        o.require(at(r, 1, 2) == q("11/4"), "R12 = 11/4");
        const double s = seconds_since(t0);
        o.require(s < 1.0, "runtime < 1 s");
        o.notes.push_back("runtime " + std::to_string(s) + " s");
    });
}

Outcome criterion2()
{
    return guarded([](Outcome& o) {
        const auto t0 = Clock::now();
        const auto m = read_matrix_file<Rational>(fixture("mats_M.txt"));
        o.require(circular_minor(m, CircularPair{{1, 3}, {5, 4}}) == q("39/169"), "(1,3;5,4) = 39/169");
        o.require(circular_minor(m, CircularPair{{2, 3}, {1, 4}}) == 0, "(2,3;1,4) = 0");
        const auto c = read_matrix_file<Rational>(fixture("counter_M.txt"));
        o.require(circular_minor(c, CircularPair{{1, 2}, {4, 3}}) == -1, "counterexample (1,2;4,3) = -1");
        const auto cv = is_circular_planar(c, CircularOrder::counting(5));
        o.require(!cv.planar, "counterexample non-planar");
        const auto mv = is_circular_planar(m, CircularOrder::counting(5), {}, 12, true);
        o.require(mv.planar && mv.negative_count == 0, "mats planar over all pair sizes");
        o.notes.push_back("mats minors checked " + std::to_string(mv.minors_checked));
        o.require(seconds_since(t0) < 1.0, "runtime < 1 s");
    });
}

Outcome criterion3()
{
    return guarded([](Outcome& o) {
        const auto w = read_matrix_file<Rational>(fixture("mats_W.txt"));
        const auto order = CircularOrder::counting(5);
        const auto s = split_decomposition(w, order);
        o.require(s.splits.size() == 7, "exactly 7 splits");
        auto weight = [&](std::vector<int> side) -> std::optional<Rational> {
            const auto i = s.find(side);
            if (!i) return std::nullopt;
            return s.splits[*i].weight;
        };
        o.require(weight({1, 5}) == q("1/6"), "{1,5}|{2,3,4} weight 1/6");
        o.require(weight({4}) == q("1/3"), "{4}|rest weight 1/3");
        o.require(weight({2, 3}) == q("1/2"), "{2,3}|rest weight 1/2");
        o.require(!weight({3}), "no trivial split at 3");
        o.require(split_metric(s, w.labels()) == w, "split metric round trip");
        std::multiset<Rational> separating;
        for (const auto& sp : s.splits) {
            const bool has1 = std::count(sp.part.begin(), sp.part.end(), 1) > 0;
            const bool has5 = std::count(sp.part.begin(), sp.part.end(), 5) > 0;
            if (has1 != has5) separating.insert(sp.weight);
        }
        o.require(separating == std::multiset<Rational>{q("1/6"), q("1/6"), q("13/12")}, "W15 = 1/6 + 1/6 + 13/12");
    });
}

Outcome criterion4()
{
    return guarded([](Outcome& o) {
        const auto t0 = Clock::now();
        const auto m = read_matrix_file<Rational>(fixture("big_M.txt"));
        const auto w = read_matrix_file<Rational>(fixture("big_W.txt"));
        const auto ten = CircularOrder::counting(10);

        // (a)
        try {
            const auto wm = w_from_m(m);
            const bool same = wm == w;
            std::ostringstream a;
            a << "W(M) differs from printed W by up to " << max_abs_diff(wm, w) << "; W23 = " << at(wm, 2, 3).get_d()
              << ", W24 = " << at(wm, 2, 4).get_d() << "; printed M row sums are not zero";
            o.known_red(same, "(a) W from printed M", a.str());
        } catch (const std::exception& e) {
            o.known_red(false, "(a) W from printed M", e.what());
        }
        o.require(at(w, 2, 3) == q("3/2") && at(w, 2, 4) == q("31/30"), "(a) printed W anchors");

        // (b)
        const auto wd = read_matrix_file<double>(fixture("big_W.txt"));
        const auto search = find_circular_order(wd, big_w_tol);
        o.require(search.status == OrderStatus::found && search.exhaustive, "(b) exhaustive order search");
        o.require(search.order && search.order->equivalent(ten), "(b) counting order");
        o.require(is_kalmanson(wd, ten, big_w_tol).kalmanson, "(b) Kalmanson for counting order");

        // (c)
        const auto mb = circular_minor(m, CircularPair{{1, 2, 5}, {9, 8, 7}});
        const auto ma = circular_minor(m, CircularPair{{10, 1, 2}, {8, 7, 4}});
        o.require(mb > 0 && ma > 0, "(c) bridge minors positive");
        o.require(verify_bridge(m, ten, {5, 6, 7}).verified && verify_bridge(m, ten, {2, 3, 4}).verified,
                  "(c) bridges a and b verified");
        const double rb = std::abs(mb.get_d() / (27.0 / 473351) - 1), ra = std::abs(ma.get_d() / (17.0 / 13246) - 1);
        o.require(rb < 1e-4 && ra < 1e-4, "(c) minors within 1e-4 relative of the printed values");
        std::ostringstream c;
        c << "exact minors are " << mb.get_d() << " and " << ma.get_d() << " (relative offsets " << rb << ", " << ra
          << "); the printed fractions are short approximations";
        o.known_red(mb == q("27/473351") && ma == q("17/13246"), "(c) exact equality", c.str());

        // (d)
        const auto s = read_matrix_file<double>(fixture("big_S.txt"));
        const CircularPair tiny{{2, 3, 4}, {1, 6, 5}};
        const double v = circular_minor(s, tiny);
        o.require(v < 0 && v > -1e-8, "(d) minor is about -2e-9");
        o.require(minor_sign(s, tiny, default_tol) == 0, "(d) classified as zero at default tolerance");

        // (e)
        const auto d = decompose(split_decomposition(wd, ten, big_w_tol));
        const auto p = read_matrix_file<Rational>(fixture("big_P.txt"));
        const auto qm = read_matrix_file<Rational>(fixture("big_Q.txt"));
        int matched = 0;
        for (const auto& blob : d.blobs) {
            const auto [sub, reps] = blob_submatrix(w, blob, ten);
            if (reps == p.labels() && sub == p) ++matched;
            if (reps == qm.labels() && sub == qm) ++matched;
        }
        o.require(d.blobs.size() == 2 && matched == 2, "(e) blob matrices P and Q");

        const double secs = seconds_since(t0);
        o.require(secs < 30.0, "runtime < 30 s");
        o.notes.push_back("runtime " + std::to_string(secs) + " s");
    });
}

Outcome criterion5()
{
    return guarded([](Outcome& o) {
        const auto m = response_matrix<Rational>(read_network_file(fixture("mats.net")));
        const StrandMatching expected(5, {{1, 7}, {2, 8}, {3, 5}, {4, 9}, {6, 10}});
        const auto got = strand_matching_from_response(m);
        o.require(got == expected, "matching " + got.to_string());
        const auto graph = matching_to_graph(got);
        o.require(connection_set(graph, 5) == positive_pairs(m, 5), "connection set equals positive minors");
    });
}

Outcome criterion6()
{
    return guarded([](Outcome& o) {
        const auto t0 = Clock::now();
        std::size_t failures = 0, minimal = 0;
        auto fail = [&](bool ok, std::uint64_t seed, const char* what) {
            if (ok) return;
            if (++failures <= 10) o.notes.push_back("seed " + std::to_string(seed) + ": " + what);
        };
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            const std::size_t n = 3 + seed % 4;
            const auto net = random_circular_planar(n, seed % 5, seed);
            const auto order = CircularOrder::counting(n);
            const auto m = response_matrix<Rational>(net);
            const auto v = is_circular_planar(m, order, {}, 12, true);
            fail(v.planar && v.negative_count == 0, seed, "(i) negative minor");
            fail(positive_pairs(m, n / 2) == connection_set(net, n / 2), seed, "(ii) minor/connection mismatch");
            const auto w = w_from_m(m);
            fail(is_kalmanson(w, order).kalmanson, seed, "(iii) not Kalmanson");
            fail(m_from_w(w) == m, seed, "(iv) round trip");
            const auto l = laplacian<Rational>(net);
            const auto r = resistance_matrix<Rational>(net);
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                std::vector<int> subset;
                for (std::size_t i = 0; i < n; ++i)
                    if (mask >> i & 1u) subset.push_back(static_cast<int>(i + 1));
                if (subset.size() < 2) continue;
                const auto kron = w_from_m(schur_complement_by_label(l, subset));
                fail(restrict_resistance(w, subset) == kron && r.principal_by_label(subset) == kron, seed,
                     "(v) restriction/Kron");
            }
            const auto medial = medial_strand_matching(net);
            if (medial.minimal()) {
                ++minimal;
                fail(strand_matching_from_response(m) == medial.matching, seed, "(vi) matching");
            }
            if (const auto g = circnet::testing::random_minimal_network(n, 4, seed)) {
                ++minimal;
                const auto gm = response_matrix<Rational>(g->net);
                fail(medial_strand_matching(g->net).matching == g->matching, seed, "(vi) medial of minimal");
                fail(strand_matching_from_response(gm) == g->matching, seed, "(vi) matching of minimal");
            }
        }
        const double secs = seconds_since(t0);
        o.require(failures == 0, std::to_string(failures) + " property failures");
        o.require(minimal >= 100, "at least 100 minimal instances for (vi)");
        o.require(secs < 300.0, "runtime < 5 min");
        o.notes.push_back("200 seeds, " + std::to_string(minimal) + " minimal instances, runtime " +
                          std::to_string(secs) + " s");
    });
}

Outcome criterion7()
{
    return guarded([](Outcome& o) {
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> num(1, 30), den(1, 9);
        auto draw = [&] {
            Rational v(num(rng), den(rng));
            v.canonicalize();
            return v;
        };
        int bad = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const Rational p = draw(), qq = draw(), r = draw(), x = draw(), y = draw(), z = draw();
            const auto w = w_from_m(response_matrix<Rational>(circnet::testing::k4_network(p, qq, r, x, y, z)));
            const Rational sigma = p * qq * r + p * qq * x + p * qq * z + p * r * y + qq * r * x + p * r * z +
                                   qq * r * y + p * x * y + p * x * z + qq * x * y + p * y * z + qq * x * z +
                                   r * x * y + qq * y * z + r * x * z + r * y * z;
            const bool first = w(0, 2) + w(1, 3) - w(0, 1) - w(2, 3) == 2 * qq * x * (r * y - p * z) / sigma;
            const bool second = w(0, 2) + w(1, 3) - w(1, 2) - w(0, 3) == 2 * p * z * (r * y - qq * x) / sigma;
            bad += !(first && second);
        }
        o.require(bad == 0, std::to_string(bad) + " of 100 tuples off");
    });
}

Outcome criterion8()
{
    return guarded([](Outcome& o) {
        int fired = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto net = circnet::testing::random_one_nested(9, seed);
            const auto n = net.boundary_order().size();
            const auto s = split_decomposition(w_from_m(response_matrix<Rational>(net)), CircularOrder::counting(n));
            fired += one_nested_obstruction(s).has_value();
        }
        o.require(fired == 0, "fired on " + std::to_string(fired) + " of 100 cactus networks");
        int found = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto pattern = circnet::testing::sym_pattern_system(seed);
            const auto witness = one_nested_obstruction(pattern.system);
            found += witness && circnet::testing::witness_consistent(pattern.system, *witness);
        }
        o.require(found == 20, "correct witness on " + std::to_string(found) + " of 20 patterns");
    });
}

} // namespace

int main()
{
    const std::vector<Outcome (*)()> criteria{criterion1, criterion2, criterion3, criterion4,
                                              criterion5, criterion6, criterion7, criterion8};
    int unexpected = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto o = criteria[k]();
        const bool ok = o.pass && o.known.empty();
        std::cout << "criterion " << k + 1 << ": " << (ok ? "PASS" : "FAIL");
        if (o.pass && !o.known.empty()) std::cout << " (printed-data defect only; everything else passes)";
        std::cout << "\n";
        for (const auto& n : o.notes) std::cout << "    " << n << "\n";
        for (const auto& n : o.known) std::cout << "    known red " << n << "\n";
        unexpected += !o.pass;
    }
    return unexpected == 0 ? 0 : 1;
}
