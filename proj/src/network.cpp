#include "circnet/network.hpp"
#include "circnet/response.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace circnet {

// ---- model -----------------------------------------------------------------

void Network::add_node(int id, bool boundary)
{
    if (kind_.count(id)) throw Error("node " + std::to_string(id) + " declared twice");
    kind_[id] = boundary;
    (boundary ? boundary_ : interior_).push_back(id);
}

void Network::add_edge(int u, int v, std::optional<Rational> conductance)
{
    if (u == v) throw Error("self-loop at node " + std::to_string(u));
    if (!has_node(u) || !has_node(v))
        throw Error("edge " + std::to_string(u) + "-" + std::to_string(v) + " uses an undeclared node");
    if (conductance) conductance->canonicalize();
    if (conductance && sgn(*conductance) <= 0)
        throw Error("edge " + std::to_string(u) + "-" + std::to_string(v) + " needs a positive conductance");
    const auto key = std::minmax(u, v);
    if (auto it = edge_index_.find(key); it != edge_index_.end()) {
        auto& e = edges_[it->second];
        if (e.conductance && conductance)
            e.conductance = *e.conductance + *conductance;
        else
            e.conductance.reset();
        return;
    }
    edge_index_[key] = edges_.size();
    edges_.push_back(Edge{u, v, std::move(conductance)});
}

void Network::set_rotation(int id, std::vector<int> clockwise)
{
    if (!has_node(id)) throw Error("rotation for undeclared node " + std::to_string(id));
    rotation_[id] = std::move(clockwise);
}

bool Network::is_boundary(int id) const
{
    auto it = kind_.find(id);
    if (it == kind_.end()) throw Error("unknown node " + std::to_string(id));
    return it->second;
}

std::vector<int> Network::nodes() const
{
    std::vector<int> out = boundary_;
    out.insert(out.end(), interior_.begin(), interior_.end());
    return out;
}

std::vector<int> Network::neighbors(int id) const
{
    std::vector<int> out;
    for (const auto& e : edges_) {
        if (e.u == id) out.push_back(e.v);
        if (e.v == id) out.push_back(e.u);
    }
    return out;
}

const Edge* Network::find_edge(int u, int v) const
{
    auto it = edge_index_.find(std::minmax(u, v));
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

bool Network::is_connected() const
{
    const auto all = nodes();
    if (all.empty()) return true;
    std::map<int, std::vector<int>> adj;
    for (const auto& e : edges_) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::set<int> seen{all.front()};
    std::vector<int> stack{all.front()};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (seen.insert(v).second) stack.push_back(v);
    }
    return seen.size() == all.size();
}

bool Network::all_weights_known() const
{
    return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.conductance.has_value(); });
}

const std::vector<int>& Network::rotation(int id) const
{
    auto it = rotation_.find(id);
    if (it == rotation_.end()) throw Error("no rotation for node " + std::to_string(id));
    return it->second;
}

void Network::validate_embedding() const
{
    if (!has_embedding()) throw Error("network has no embedding");
    // Rotations must list each neighbour exactly once.
    for (int id : nodes()) {
        auto nb = neighbors(id);
        auto it = rotation_.find(id);
        std::vector<int> rot = it == rotation_.end() ? std::vector<int>{} : it->second;
        std::sort(nb.begin(), nb.end());
        std::sort(rot.begin(), rot.end());
        if (nb != rot) throw Error("rotation at node " + std::to_string(id) + " does not list its neighbours");
    }
    // Add a hub joined to every terminal, sitting in the outer gap of each
    // terminal's rotation. Seen from the hub the terminals run counterclockwise.
    const int hub = std::numeric_limits<int>::min();
    std::map<int, std::vector<int>> rot;
    for (int id : nodes()) rot[id] = rotation(id);
    for (int t : boundary_) rot[t].push_back(hub);
    rot[hub] = std::vector<int>(boundary_.rbegin(), boundary_.rend());

    std::size_t darts = 0;
    for (const auto& [id, r] : rot) darts += r.size();
    std::set<std::pair<int, int>> seen;
    std::size_t faces = 0;
    for (const auto& [id, r] : rot) {
        for (int v : r) {
            if (seen.count({id, v})) continue;
            ++faces;
            int a = id, b = v;
            while (seen.insert({a, b}).second) {
                const auto& rb = rot[b];
                const auto pos = static_cast<std::size_t>(std::find(rb.begin(), rb.end(), a) - rb.begin());
                const int c = rb[(pos + 1) % rb.size()];
                a = b;
                b = c;
            }
        }
    }
    // The augmented graph must be connected for Euler's formula to apply.
    std::set<int> reach{hub};
    std::vector<int> stack{hub};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : rot[u])
            if (reach.insert(v).second) stack.push_back(v);
    }
    if (reach.size() != rot.size()) throw Error("embedding: a component contains no terminal");
    const long v = static_cast<long>(rot.size());
    const long e = static_cast<long>(darts / 2);
    if (v - e + static_cast<long>(faces) != 2)
        throw Error("rotation system is not a plane embedding with the terminals on the outer face in order");
}

// ---- text format -----------------------------------------------------------

Network read_network(std::istream& in)
{
    Network net;
    std::string line;
    int lineno = 0;
    std::vector<std::pair<int, std::vector<int>>> rotations;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto fail = [&](const std::string& what) {
            throw ParseError("network line " + std::to_string(lineno) + ": " + what);
        };
        if (kw == "node") {
            int id;
            std::string kind;
            if (!(ls >> id >> kind)) fail("expected 'node <id> boundary|interior'");
            if (kind != "boundary" && kind != "interior") fail("node kind must be boundary or interior");
            net.add_node(id, kind == "boundary");
        } else if (kw == "edge") {
            int u, v;
            std::string c;
            if (!(ls >> u >> v >> c)) fail("expected 'edge <u> <v> <conductance>'");
            if (c == "?")
                net.add_edge(u, v, std::nullopt);
            else
                net.add_edge(u, v, parse_rational(c));
        } else if (kw == "rot") {
            int id;
            if (!(ls >> id)) fail("expected 'rot <id> <neighbours>'");
            std::vector<int> nb;
            int x;
            while (ls >> x) nb.push_back(x);
            rotations.emplace_back(id, std::move(nb));
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }
    for (auto& [id, nb] : rotations) net.set_rotation(id, std::move(nb));
    if (net.has_embedding()) net.validate_embedding();
    return net;
}

Network read_network_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_network(in);
}

void write_network(std::ostream& out, const Network& net)
{
    for (int b : net.boundary()) out << "node " << b << " boundary\n";
    for (int i : net.interior()) out << "node " << i << " interior\n";
    for (const auto& e : net.edges())
        out << "edge " << e.u << ' ' << e.v << ' ' << (e.conductance ? format_rational(*e.conductance) : "?") << '\n';
    if (net.has_embedding()) {
        for (int id : net.nodes()) {
            out << "rot " << id;
            for (int v : net.rotation(id)) out << ' ' << v;
            out << '\n';
        }
    }
}

// ---- forward simulation -----------------------------------------------------

template <Scalar T>
Matrix<T> laplacian(const Network& net)
{
    const auto ids = net.nodes();
    if (ids.empty()) throw Error("empty network");
    Matrix<T> l(ids.size(), ids);
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
    for (const auto& e : net.edges()) {
        if (!e.conductance)
            throw Error("edge " + std::to_string(e.u) + "-" + std::to_string(e.v) + " has unknown conductance");
        const T c = ScalarOps<T>::from_rational(*e.conductance);
        const std::size_t a = pos[e.u], b = pos[e.v];
        l(a, b) += c;
        l(b, a) += c;
        l(a, a) -= c;
        l(b, b) -= c;
    }
    return l;
}

template <Scalar T>
Matrix<T> response_matrix(const Network& net, const Tolerance& tol)
{
    if (!net.is_connected()) throw Error("network is disconnected; response matrix undefined");
    const auto l = laplacian<T>(net);
    std::vector<std::size_t> keep(net.boundary().size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
    return schur_complement(l, keep, tol);
}

template <Scalar T>
Matrix<T> resistance_matrix(const Network& net, const Tolerance& tol)
{
    if (!net.is_connected()) throw Error("network is disconnected; resistances undefined");
    return w_from_m(laplacian<T>(net), tol);
}

// ---- connections ---------------------------------------------------------

namespace {

struct PathSearch {
    std::vector<std::vector<std::size_t>> adj;
    std::vector<bool> interior;
    std::vector<bool> used;
    std::vector<std::size_t> src, dst;

    bool reachable(std::size_t from, std::size_t to) const
    {
        std::vector<bool> seen(adj.size(), false);
        std::vector<std::size_t> stack{from};
        seen[from] = true;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (auto v : adj[u]) {
                if (v == to) return true;
                if (!seen[v] && interior[v] && !used[v]) {
                    seen[v] = true;
                    stack.push_back(v);
                }
            }
        }
        return false;
    }

    bool route(std::size_t i)
    {
        if (i == src.size()) return true;
        for (std::size_t j = i; j < src.size(); ++j)
            if (!reachable(src[j], dst[j])) return false;
        return extend(i, src[i]);
    }

    bool extend(std::size_t i, std::size_t cur)
    {
        for (auto v : adj[cur]) {
            if (v == dst[i]) {
                if (route(i + 1)) return true;
            } else if (interior[v] && !used[v]) {
                used[v] = true;
                if (extend(i, v)) return true;
                used[v] = false;
            }
        }
        return false;
    }
};

PathSearch make_search(const Network& net)
{
    const auto ids = net.nodes();
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
    PathSearch s;
    s.adj.resize(ids.size());
    s.interior.resize(ids.size());
    s.used.assign(ids.size(), false);
    for (std::size_t i = 0; i < ids.size(); ++i) s.interior[i] = !net.is_boundary(ids[i]);
    for (const auto& e : net.edges()) {
        s.adj[pos[e.u]].push_back(pos[e.v]);
        s.adj[pos[e.v]].push_back(pos[e.u]);
    }
    return s;
}

bool connected_pair(PathSearch& s, const Network& net, const CircularPair& pair)
{
    const auto& b = net.boundary();
    auto index = [&](int label) {
        auto it = std::find(b.begin(), b.end(), label);
        if (it == b.end()) throw Error("terminal " + std::to_string(label) + " not in network boundary");
        return static_cast<std::size_t>(it - b.begin());
    };
    s.src.clear();
    s.dst.clear();
    for (int p : pair.p) s.src.push_back(index(p));
    for (int q : pair.q) s.dst.push_back(index(q));
    std::fill(s.used.begin(), s.used.end(), false);
    return s.route(0);
}

} // namespace

bool has_connection(const Network& net, const CircularPair& pair)
{
    auto s = make_search(net);
    return connected_pair(s, net, pair);
}

std::vector<CircularPair> enumerate_connections(const Network& net, std::size_t max_k, std::size_t max_nodes)
{
    if (net.node_count() > max_nodes)
        throw SizeGuardError("connection search on " + std::to_string(net.node_count()) + " nodes exceeds the bound of " +
                             std::to_string(max_nodes) + "; query circular minors of the response matrix instead");
    auto s = make_search(net);
    std::vector<CircularPair> out;
    for (const auto& pair : enumerate_circular_pairs(net.boundary_order(), max_k))
        if (connected_pair(s, net, pair)) out.push_back(pair);
    return out;
}

// ---- strand matchings --------------------------------------------------------

StrandMatching::StrandMatching(std::size_t n, std::vector<std::pair<int, int>> pairs) : n_(n), partner_(2 * n, 0)
{
    for (auto [a, b] : pairs) {
        const int top = static_cast<int>(2 * n);
        if (a < 1 || b < 1 || a > top || b > top || a == b) throw Error("strand matching: bad stub pair");
        if (partner_[static_cast<std::size_t>(a - 1)] || partner_[static_cast<std::size_t>(b - 1)])
            throw Error("strand matching: stub used twice");
        partner_[static_cast<std::size_t>(a - 1)] = b;
        partner_[static_cast<std::size_t>(b - 1)] = a;
    }
    for (int p : partner_)
        if (p == 0) throw Error("strand matching: not every stub is matched");
}

std::vector<std::pair<int, int>> StrandMatching::pairs() const
{
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < partner_.size(); ++i) {
        const int a = static_cast<int>(i + 1);
        if (a < partner_[i]) out.emplace_back(a, partner_[i]);
    }
    return out;
}

std::string StrandMatching::to_string() const
{
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (auto [a, b] : pairs()) {
        out << (first ? "" : ",") << '{' << a << ',' << b << '}';
        first = false;
    }
    out << '}';
    return out.str();
}

MedialResult medial_strand_matching(const Network& net)
{
    net.validate_embedding();
    const auto& b = net.boundary();
    const std::size_t n = b.size();
    std::map<int, std::size_t> tpos;
    for (std::size_t i = 0; i < n; ++i) tpos[b[i]] = i;
    std::map<std::pair<int, int>, std::size_t> eid;
    for (std::size_t k = 0; k < net.edges().size(); ++k)
        eid[std::minmax(net.edges()[k].u, net.edges()[k].v)] = k;

    // A strand passes through the midpoint of `edge` heading for node `to`;
    // it arrived through the corner on side `cw` and leaves through the
    // corner on the same side at `to`.
    struct State {
        int from, to;
        bool cw;
    };
    // Returns the stub reached, or 0 if the walk came back to its start.
    auto trace = [&](State s, std::vector<std::size_t>& visited) -> int {
        const State start = s;
        for (std::size_t guard = 0; guard < 8 * net.edges().size() + 8; ++guard) {
            visited.push_back(eid.at(std::minmax(s.from, s.to)));
            const auto& rot = net.rotation(s.to);
            const auto pos = static_cast<std::size_t>(std::find(rot.begin(), rot.end(), s.from) - rot.begin());
            const bool boundary = net.is_boundary(s.to);
            int next;
            if (s.cw) {
                if (boundary && pos + 1 == rot.size()) return static_cast<int>(2 * tpos[s.to] + 1);
                next = rot[(pos + 1) % rot.size()];
            } else {
                if (boundary && pos == 0) return static_cast<int>(2 * tpos[s.to] + 2);
                next = rot[(pos + rot.size() - 1) % rot.size()];
            }
            s = State{s.to, next, !s.cw};
            if (s.from == start.from && s.to == start.to && s.cw == start.cw) return 0;
        }
        throw Error("medial strand trace did not terminate");
    };

    MedialResult result;
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<std::size_t>> strand_edges;
    std::vector<int> done(2 * n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const int t = b[i];
        const auto& rot = net.rotation(t);
        for (int side = 0; side < 2; ++side) {
            const int stub = static_cast<int>(2 * i + 1 + side);
            if (done[static_cast<std::size_t>(stub)]) continue;
            std::vector<std::size_t> visited;
            int end;
            if (rot.empty()) {
                end = side == 0 ? stub + 1 : stub - 1;
            } else if (side == 0) {
                end = trace(State{t, rot.back(), true}, visited);
            } else {
                end = trace(State{t, rot.front(), false}, visited);
            }
            if (end <= 0) throw Error("medial strand from a stub did not return to the boundary");
            done[static_cast<std::size_t>(stub)] = done[static_cast<std::size_t>(end)] = 1;
            pairs.emplace_back(stub, end);
            strand_edges.push_back(std::move(visited));
        }
    }
    result.matching = StrandMatching(n, pairs);

    std::vector<int> visits(net.edges().size(), 0);
    std::vector<std::set<std::size_t>> sets;
    for (const auto& se : strand_edges) {
        std::set<std::size_t> s(se.begin(), se.end());
        if (s.size() != se.size()) result.self_crossing = true;
        for (auto e : se) ++visits[e];
        sets.push_back(std::move(s));
    }
    for (int v : visits)
        if (v < 2) result.closed_strands = true;
    for (std::size_t a = 0; a < sets.size() && !result.lens; ++a)
        for (std::size_t c = a + 1; c < sets.size(); ++c) {
            std::size_t shared = 0;
            for (auto e : sets[a]) shared += sets[c].count(e);
            if (shared > 1) {
                result.lens = true;
                break;
            }
        }
    return result;
}

// ---- random generator ------------------------------------------------------

namespace {

struct Pt {
    double x, y;
};

double cross(Pt o, Pt a, Pt b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Proper crossing of segments ab and cd (shared endpoints do not count).
bool segments_cross(Pt a, Pt b, Pt c, Pt d)
{
    const double d1 = cross(a, b, c), d2 = cross(a, b, d), d3 = cross(c, d, a), d4 = cross(c, d, b);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Clockwise angle swept from direction `from` to direction `to`, in [0, 2pi).
double cw_angle(double from, double to)
{
    double a = std::fmod(from - to, 2 * std::numbers::pi);
    if (a < 0) a += 2 * std::numbers::pi;
    return a;
}

} // namespace

Network random_circular_planar(std::size_t n, std::size_t interior, std::uint64_t seed)
{
    if (n < 3) throw Error("random network needs at least 3 terminals");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t m = n + interior;
    std::vector<Pt> pts(m);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = std::numbers::pi / 2 - 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        pts[i] = {std::cos(th), std::sin(th)};
    }
    for (std::size_t i = n; i < m; ++i) {
        const double r = 0.75 * std::sqrt(unit(rng));
        const double th = 2 * std::numbers::pi * unit(rng);
        pts[i] = {r * std::cos(th), r * std::sin(th)};
    }

    std::vector<std::pair<std::size_t, std::size_t>> cand;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t c = a + 1; c < m; ++c) cand.emplace_back(a, c);
    std::shuffle(cand.begin(), cand.end(), rng);
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    for (auto [a, c] : cand) {
        bool ok = true;
        for (auto [u, v] : chosen)
            if (u != a && u != c && v != a && v != c && segments_cross(pts[a], pts[c], pts[u], pts[v])) {
                ok = false;
                break;
            }
        if (ok) chosen.push_back({a, c});
    }

    auto connected_without = [&](std::size_t skip) {
        std::vector<std::vector<std::size_t>> adj(m);
        for (std::size_t k = 0; k < chosen.size(); ++k) {
            if (k == skip) continue;
            adj[chosen[k].first].push_back(chosen[k].second);
            adj[chosen[k].second].push_back(chosen[k].first);
        }
        std::vector<bool> seen(m, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            for (auto v : adj[u])
                if (!seen[v]) {
                    seen[v] = true;
                    ++count;
                    stack.push_back(v);
                }
        }
        return count == m;
    };
    std::shuffle(chosen.begin(), chosen.end(), rng);
    for (std::size_t k = 0; k < chosen.size();) {
        if (unit(rng) < 0.5 && connected_without(k))
            chosen.erase(chosen.begin() + static_cast<long>(k));
        else
            ++k;
    }

    Network net;
    for (std::size_t i = 0; i < m; ++i) net.add_node(static_cast<int>(i + 1), i < n);
    std::uniform_int_distribution<int> num(1, 4), den(1, 3);
    std::sort(chosen.begin(), chosen.end());
    for (auto [a, c] : chosen) net.add_edge(static_cast<int>(a + 1), static_cast<int>(c + 1), Rational(num(rng), den(rng)));

    for (std::size_t i = 0; i < m; ++i) {
        const int id = static_cast<int>(i + 1);
        auto nb = net.neighbors(id);
        // Terminals measure from the outward normal, interior nodes from +x.
        const double ref = i < n ? std::atan2(pts[i].y, pts[i].x) : 0.0;
        auto key = [&](int v) {
            const Pt& q = pts[static_cast<std::size_t>(v - 1)];
            return cw_angle(ref, std::atan2(q.y - pts[i].y, q.x - pts[i].x));
        };
        std::sort(nb.begin(), nb.end(), [&](int a, int c) { return key(a) < key(c); });
        net.set_rotation(id, nb);
    }
    net.validate_embedding();
    return net;
}

#define CIRCNET_INSTANTIATE(T)                                                 \
    template Matrix<T> laplacian<T>(const Network&);                           \
    template Matrix<T> response_matrix<T>(const Network&, const Tolerance&);   \
    template Matrix<T> resistance_matrix<T>(const Network&, const Tolerance&);

CIRCNET_INSTANTIATE(Rational)
CIRCNET_INSTANTIATE(double)

} // namespace circnet
