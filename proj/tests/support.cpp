#include "support.hpp"

#include <algorithm>
#include <functional>
#include <random>

namespace circnet::testing {

std::string fixture(const std::string& name) { return std::string(CIRCNET_FIXTURE_DIR) + "/" + name; }

Rational q(const char* text) { return parse_rational(text); }

Network with_random_conductances(const Network& net, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(1, 6), den(1, 3);
    Network out;
    for (int id : net.nodes()) out.add_node(id, net.is_boundary(id));
    for (const auto& e : net.edges()) {
        Rational c(num(rng), den(rng));
        c.canonicalize();
        out.add_edge(e.u, e.v, c);
    }
    if (net.has_embedding())
        for (int id : net.nodes()) out.set_rotation(id, net.rotation(id));
    return out;
}

std::optional<GeneratedNetwork> random_minimal_network(std::size_t n, std::size_t max_interior, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<int> stubs(2 * n);
    for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<int>(i + 1);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < stubs.size(); i += 2) pairs.emplace_back(stubs[i], stubs[i + 1]);
    StrandMatching matching(n, pairs);

    Network graph;
    try {
        graph = matching_to_graph(matching);
    } catch (const Error&) {
        return std::nullopt;
    }
    if (graph.interior().size() > max_interior || !graph.is_connected()) return std::nullopt;
    return GeneratedNetwork{with_random_conductances(graph, rng()), matching};
}

Network random_one_nested(std::size_t max_terminals, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> cond(1, 3);
    for (;;) {
        // children[v] lists blocks hanging off v in drawing order; a block is
        // a sequence of new nodes (size 1 = pendant edge, >= 2 = cycle through v)
        std::vector<std::vector<std::vector<std::size_t>>> children(1);
        std::size_t nodes = 1;
        const std::size_t target = 4 + rng() % (max_terminals + 1);
        while (nodes < target) {
            const std::size_t v = rng() % nodes;
            const std::size_t len = (rng() % 3 == 0) ? 1 : 2 + rng() % 3;
            std::vector<std::size_t> block;
            for (std::size_t i = 0; i < len; ++i) {
                block.push_back(nodes++);
                children.emplace_back();
            }
            children[v].push_back(block);
        }

        // pre-order walk of the outerplanar drawing fixes the circular order
        std::vector<std::size_t> walk;
        std::function<void(std::size_t)> visit = [&](std::size_t v) {
            walk.push_back(v);
            for (const auto& block : children[v])
                for (auto c : block) visit(c);
        };
        visit(0);

        std::vector<bool> terminal(nodes, false);
        std::size_t count = 0;
        for (std::size_t v = 0; v < nodes; ++v) {
            const bool leaf = children[v].empty();
            terminal[v] = leaf || rng() % 5 < 3;
            count += terminal[v];
        }
        if (count < 4 || count > max_terminals) continue;

        std::vector<int> id(nodes);
        int next = 1;
        for (auto v : walk)
            if (terminal[v]) id[v] = next++;
        for (auto v : walk)
            if (!terminal[v]) id[v] = next++;

        Network net;
        for (auto v : walk)
            if (terminal[v]) net.add_node(id[v], true);
        for (auto v : walk)
            if (!terminal[v]) net.add_node(id[v], false);
        for (std::size_t v = 0; v < nodes; ++v)
            for (const auto& block : children[v]) {
                std::size_t prev = v;
                for (auto c : block) {
                    net.add_edge(id[prev], id[c], Rational(cond(rng)));
                    prev = c;
                }
                if (block.size() >= 2) net.add_edge(id[prev], id[v], Rational(cond(rng)));
            }
        return net;
    }
}

template <Scalar T>
std::set<CircularPair> positive_pairs(const Matrix<T>& m, std::size_t max_k, const Tolerance& tol)
{
    std::set<CircularPair> out;
    for (const auto& p : enumerate_circular_pairs(CircularOrder(m.labels()), max_k))
        if (minor_sign(m, p, tol) > 0) out.insert(p);
    return out;
}

template std::set<CircularPair> positive_pairs(const Matrix<Rational>&, std::size_t, const Tolerance&);
template std::set<CircularPair> positive_pairs(const Matrix<double>&, std::size_t, const Tolerance&);

std::set<CircularPair> connection_set(const Network& net, std::size_t max_k)
{
    const auto v = enumerate_connections(net, max_k, 40);
    return {v.begin(), v.end()};
}

Network k4_network(const Rational& p, const Rational& q, const Rational& r, const Rational& x, const Rational& y,
                   const Rational& z)
{
    Network net;
    for (int i = 1; i <= 4; ++i) net.add_node(i, true);
    auto edge = [&](int a, int b, const Rational& res) {
        Rational c = 1 / res;
        net.add_edge(a, b, c);
    };
    edge(1, 2, p);
    edge(2, 3, q);
    edge(3, 4, z);
    edge(1, 4, x);
    edge(1, 3, r);
    edge(2, 4, y);
    return net;
}

PatternSystem sym_pattern_system(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const std::size_t n = 6 + rng() % 4;
    std::vector<std::size_t> sizes{1, 2, 1, 2};
    for (std::size_t extra = n - 6; extra > 0; --extra) ++sizes[rng() % 4];
    const std::size_t offset = rng() % n;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>((i + offset) % n + 1);

    PatternSystem out;
    std::vector<std::vector<int>*> arcs{&out.a, &out.b, &out.c, &out.d};
    std::size_t pos = 0;
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t i = 0; i < sizes[k]; ++i) arcs[k]->push_back(labels[pos++]);

    std::uniform_int_distribution<int> num(1, 12), den(1, 5);
    auto weight = [&] {
        Rational w(num(rng), den(rng));
        w.canonicalize();
        return w;
    };
    out.weight_a = weight();
    do {
        out.weight_b = weight();
    } while (out.weight_b == out.weight_a);

    auto& s = out.system;
    s.order = CircularOrder::counting(n);
    auto add = [&](std::vector<int> side, const Rational& w) {
        s.splits.push_back({canonical_part(side, s.order), w});
    };
    auto join = [](std::initializer_list<const std::vector<int>*> parts) {
        std::vector<int> r;
        for (auto* p : parts) r.insert(r.end(), p->begin(), p->end());
        return r;
    };
    add(join({&out.a, &out.b}), out.weight_a);
    add(join({&out.a, &out.d}), out.weight_a);
    add(out.d, out.weight_b);
    add(out.b, out.weight_b);
    for (std::size_t t = 1; t <= n; ++t)
        if (!s.find({static_cast<int>(t)})) add({static_cast<int>(t)}, weight());
    std::sort(s.splits.begin(), s.splits.end(),
              [](const auto& x, const auto& y) { return x.part < y.part; });
    return out;
}

bool witness_consistent(const WeightedSplitSystem<Rational>& s, const ObstructionWitness<Rational>& w)
{
    const auto& order = s.order;
    std::vector<int> all;
    for (const auto* arc : {&w.a, &w.b, &w.c, &w.d}) {
        if (arc->empty() || !is_arc(*arc, order)) return false;
        all.insert(all.end(), arc->begin(), arc->end());
    }
    std::sort(all.begin(), all.end());
    std::vector<int> labels = order.labels();
    std::sort(labels.begin(), labels.end());
    if (all != labels) return false;
    auto join = [](const std::vector<int>& x, const std::vector<int>& y) {
        std::vector<int> r = x;
        r.insert(r.end(), y.begin(), y.end());
        return r;
    };
    auto names = [&](std::size_t idx, const std::vector<int>& side) {
        return idx < s.splits.size() && s.find(side) == idx;
    };
    if (!names(w.cross1, join(w.a, w.b)) || !names(w.cross2, join(w.a, w.d))) return false;
    if (!names(w.flank1, w.d) || !names(w.flank2, w.b)) return false;
    if (w.b.size() < 2 || w.d.size() < 2) return false;
    // consecutive arcs: each neighbouring union is again an arc
    for (const auto& u : {join(w.a, w.b), join(w.b, w.c), join(w.c, w.d), join(w.d, w.a)})
        if (!is_arc(u, order)) return false;
    const auto& sp = s.splits;
    return sp[w.cross1].weight == w.weight_a && sp[w.cross2].weight == w.weight_a &&
           sp[w.flank1].weight == w.weight_b && sp[w.flank2].weight == w.weight_b && w.weight_a != w.weight_b &&
           splits_cross(sp[w.cross1], sp[w.cross2], order);
}

} // namespace circnet::testing
