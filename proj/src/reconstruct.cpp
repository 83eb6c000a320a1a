#include "circnet/reconstruct.hpp"

#include "arrangement.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace circnet {

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// Calls f on every k-subset of `items`, keeping their order.
void for_each_subset(const std::vector<int>& items, std::size_t k, const std::function<bool(const std::vector<int>&)>& f)
{
    if (k > items.size()) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> pick(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) pick[i] = items[idx[i]];
        if (f(pick)) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Small-denominator rational within a relative 1e-9 of v, for printing
// float-mode conductances.
Rational approximate(double v)
{
    if (!std::isfinite(v)) throw Error("non-finite conductance");
    Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double x = v;
    for (int iter = 0; iter < 40; ++iter) {
        const double a = std::floor(x);
        const Integer ai(a);
        const Integer h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        const Rational r(h1, k1);
        if (std::fabs(r.get_d() - v) <= 1e-9 * std::fabs(v) || k1 > 1000000) break;
        if (x - a < 1e-15) break;
        x = 1 / (x - a);
    }
    Rational r(h1, k1);
    r.canonicalize();
    return r;
}

} // namespace

template <Scalar T>
BridgeCheck verify_bridge(const Matrix<T>& m, const CircularOrder& order, const std::vector<int>& side,
                          const Tolerance& tol)
{
    BridgeCheck out;
    const std::size_t n = order.size();
    for (const auto& pair : enumerate_circular_pairs(order, n / 2)) {
        if (pair.size() < 2) continue;
        CircularPair a, b;
        bool mixed = false;
        for (std::size_t i = 0; i < pair.size() && !mixed; ++i) {
            const bool p_in = contains(side, pair.p[i]), q_in = contains(side, pair.q[i]);
            if (p_in != q_in) mixed = true;
            auto& half = p_in ? a : b;
            half.p.push_back(pair.p[i]);
            half.q.push_back(pair.q[i]);
        }
        if (mixed || a.p.empty() || b.p.empty()) continue;
        ++out.pairs_checked;
        if (minor_sign(m, a, tol) > 0 && minor_sign(m, b, tol) > 0 && minor_sign(m, pair, tol) <= 0) {
            out.verified = false;
            out.blocking = pair;
            return out;
        }
    }
    return out;
}

std::vector<int> representatives(const Blob& blob, const CircularOrder& order)
{
    std::vector<int> reps;
    for (const auto& g : blob.groups) reps.push_back(*std::min_element(g.begin(), g.end()));
    std::sort(reps.begin(), reps.end(), [&](int a, int b) { return order.position(a) < order.position(b); });
    return reps;
}

template <Scalar T>
std::pair<Matrix<T>, std::vector<int>> blob_submatrix(const Matrix<T>& w, const Blob& blob, const CircularOrder& order)
{
    auto reps = representatives(blob, order);
    Matrix<T> sub = restrict_resistance(w, std::span<const int>(reps));
    std::vector<int> local(reps.size());
    std::iota(local.begin(), local.end(), 1);
    sub.set_labels(local);
    return {sub, reps};
}

IntMatrix num_terminals(std::size_t n)
{
    const CutFrame f(n);
    IntMatrix nt(f.cuts(), std::vector<int>(f.cuts(), 0));
    for (std::size_t i = 1; i <= f.cuts(); ++i)
        for (std::size_t j = i + 1; j <= f.cuts(); ++j)
            for (std::size_t t = 1; t <= n; ++t) nt[i - 1][j - 1] += f.inside(i, j, t) ? 1 : 0;
    return nt;
}

template <Scalar T>
IntMatrix max_respected(const Matrix<T>& m, const Tolerance& tol)
{
    const std::size_t n = m.size();
    const CutFrame f(n);
    IntMatrix mr(f.cuts(), std::vector<int>(f.cuts(), 0));
    for (std::size_t i = 1; i <= f.cuts(); ++i)
        for (std::size_t j = i + 1; j <= f.cuts(); ++j) {
            std::vector<int> in, out_after, out_before;
            for (std::size_t t = 1; t <= n; ++t) {
                const int l = m.label(t - 1);
                if (f.inside(i, j, t)) in.push_back(l);
                else if (f.outside(i, j, t)) (2 * t > j ? out_after : out_before).push_back(l);
            }
            // Outside terminals clockwise from x_j; Q runs the other way.
            std::vector<int> out = out_after;
            out.insert(out.end(), out_before.begin(), out_before.end());
            for (std::size_t k = std::min(in.size(), out.size()); k >= 1; --k) {
                bool found = false;
                for_each_subset(in, k, [&](const std::vector<int>& p) {
                    for_each_subset(out, k, [&](const std::vector<int>& qs) {
                        CircularPair pair{p, std::vector<int>(qs.rbegin(), qs.rend())};
                        found = minor_sign(m, pair, tol) > 0;
                        return found;
                    });
                    return found;
                });
                if (found) {
                    mr[i - 1][j - 1] = static_cast<int>(k);
                    break;
                }
            }
        }
    return mr;
}

IntMatrix reentrants(const StrandMatching& matching)
{
    const std::size_t c = 2 * matching.terminals();
    IntMatrix re(c, std::vector<int>(c, 0));
    for (auto [a, b] : matching.pairs())
        for (std::size_t i = 1; i <= c; ++i)
            for (std::size_t j = i + 1; j <= c; ++j)
                if (static_cast<std::size_t>(a) >= i && static_cast<std::size_t>(b) <= j - 1) ++re[i - 1][j - 1];
    return re;
}

template <Scalar T>
StrandMatching strand_matching_from_response(const Matrix<T>& m, const Tolerance& tol)
{
    const std::size_t n = m.size();
    if (n == 0) throw Error("empty response matrix");
    const std::size_t c = 2 * n;
    const auto nt = num_terminals(n);
    const auto mr = max_respected(m, tol);
    IntMatrix re(c, std::vector<int>(c, 0));
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) re[i][j] = nt[i][j] - mr[i][j];

    std::vector<int> partner(c + 1, 0);
    const std::vector<int> zeros(c, 0);
    for (std::size_t i = 1; i < c; ++i) {
        const auto& row = re[i - 1];
        const auto& next = i < c ? re[i] : zeros;
        for (std::size_t col = 1; col <= c; ++col) {
            if (row[col - 1] == next[col - 1]) continue;
            const std::size_t j = col - 1; // strand t_i - t_j
            if (j <= i || partner[i] || partner[j])
                throw InconsistentDataError("inconsistent re-entrant matrix at row " + std::to_string(i));
            partner[i] = static_cast<int>(j);
            partner[j] = static_cast<int>(i);
            break;
        }
    }
    std::vector<int> free;
    for (std::size_t s = 1; s <= c; ++s)
        if (!partner[s]) free.push_back(static_cast<int>(s));
    if (free.size() != 2 || free[1] != static_cast<int>(c))
        throw InconsistentDataError("inconsistent re-entrant matrix: " + std::to_string(free.size()) +
                                    " stubs left unmatched");
    partner[free[0]] = free[1];
    partner[free[1]] = free[0];

    std::vector<std::pair<int, int>> pairs;
    for (std::size_t s = 1; s <= c; ++s)
        if (static_cast<int>(s) < partner[s]) pairs.emplace_back(static_cast<int>(s), partner[s]);
    StrandMatching matching(n, pairs);
    if (reentrants(matching) != re) throw InconsistentDataError("inconsistent re-entrant matrix");
    return matching;
}

Network matching_to_graph(const StrandMatching& matching)
{
    const std::size_t n = matching.terminals();
    const std::size_t c = 2 * n;
    Network net;
    for (std::size_t i = 1; i <= n; ++i) net.add_node(static_cast<int>(i), true);
    if (n == 1) return net;

    std::vector<double> angles;
    for (std::size_t k = 1; k <= c; ++k)
        angles.push_back(detail::circle_angle(static_cast<double>(k) - 0.5, static_cast<double>(c), k));
    std::vector<std::pair<std::size_t, std::size_t>> chords;
    for (auto [a, b] : matching.pairs())
        chords.emplace_back(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
    const auto ar = detail::build_arrangement(angles, chords);

    // Two-colour the inner faces across chord segments.
    const std::size_t faces = ar.face_cycle.size();
    std::vector<int> colour(faces, -1);
    std::vector<std::size_t> queue{ar.arc_face(0)};
    colour[ar.arc_face(0)] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        const auto f = queue[h];
        const auto& cyc = ar.face_cycle[f];
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            const auto a = cyc[i], b = cyc[(i + 1) % cyc.size()];
            const auto g = ar.face_of(b, a);
            if (g == ar.outer_face) continue;
            if (colour[g] < 0) {
                colour[g] = 1 - colour[f];
                queue.push_back(g);
            } else if (colour[g] == colour[f]) {
                throw Error("strand arrangement is not two-colourable");
            }
        }
    }

    std::map<std::size_t, int> node_of_face;
    for (std::size_t i = 1; i <= n; ++i) {
        const auto f = ar.arc_face(2 * i - 2);
        if (colour[f] != 0) throw Error("terminal face is not shaded");
        if (node_of_face.count(f))
            throw Error("terminals " + std::to_string(node_of_face[f]) + " and " + std::to_string(i) + " share a face");
        node_of_face[f] = static_cast<int>(i);
    }
    int next_id = static_cast<int>(n) + 1;
    for (std::size_t f = 0; f < faces; ++f)
        if (f != ar.outer_face && colour[f] == 0 && !node_of_face.count(f)) {
            node_of_face[f] = next_id;
            net.add_node(next_id++, false);
        }

    // Each crossing joins the two shaded faces that meet there.
    auto shaded_across = [&](std::size_t f, std::size_t v) {
        for (auto w : ar.nbrs[v]) {
            const auto g = ar.face_of(v, w);
            if (g != f && colour[g] == 0) return g;
        }
        throw Error("crossing without an opposite shaded face");
    };
    for (const auto& x : ar.crossings) {
        std::vector<std::size_t> shaded;
        for (auto w : ar.nbrs[x.vertex]) {
            const auto g = ar.face_of(x.vertex, w);
            if (colour[g] == 0 && std::find(shaded.begin(), shaded.end(), g) == shaded.end()) shaded.push_back(g);
        }
        if (shaded.size() != 2) throw Error("crossing does not separate two shaded faces");
        net.add_edge(node_of_face.at(shaded[0]), node_of_face.at(shaded[1]), std::nullopt);
    }

    // Rotations: face cycles run counterclockwise, so reverse them. Terminal
    // faces start just after their boundary arc.
    std::map<int, std::vector<int>> rot;
    bool simple = true;
    for (auto [f, id] : node_of_face) {
        auto cyc = ar.face_cycle[f];
        if (id <= static_cast<int>(n)) {
            const std::size_t k = 2 * static_cast<std::size_t>(id) - 2;
            for (std::size_t i = 0; i < cyc.size(); ++i)
                if (cyc[i] == ar.boundary_points + k && cyc[(i + 1) % cyc.size()] == k) {
                    std::rotate(cyc.begin(), cyc.begin() + static_cast<long>((i + 1) % cyc.size()), cyc.end());
                    break;
                }
        }
        std::vector<int> order;
        for (auto v : cyc)
            if (ar.is_crossing(v)) order.push_back(node_of_face.at(shaded_across(f, v)));
        std::reverse(order.begin(), order.end());
        std::set<int> seen(order.begin(), order.end());
        if (seen.size() != order.size()) simple = false;
        rot[id] = order;
    }
    if (simple)
        for (auto& [id, r] : rot) net.set_rotation(id, r);
    return net;
}

template <Scalar T>
bool ReconstructionPlan<T>::bridge_verified(std::size_t split) const
{
    for (const auto& b : bridges)
        if (b.split == split) return b.check.verified;
    return true;
}

namespace {

struct UnionFind {
    std::map<int, int> up;
    int find(int x)
    {
        auto it = up.find(x);
        if (it == up.end() || it->second == x) return x;
        const int r = find(it->second);
        up[x] = r;
        return r;
    }
    void join(int a, int b)
    {
        a = find(a), b = find(b);
        if (a != b) up[std::max(a, b)] = std::min(a, b);
    }
};

bool strands_cross(const StrandMatching& m, int a, int c)
{
    const int b = m.partner(a), d = m.partner(c);
    if (b == c) return false;
    const int lo = std::min(a, b), hi = std::max(a, b);
    return (lo < c && c < hi) != (lo < d && d < hi);
}

} // namespace

template <Scalar T>
Network reassemble(const ReconstructionPlan<T>& plan)
{
    const auto& s = plan.splits;
    const auto& d = plan.decomposition;
    const auto& labels = plan.order.labels();
    const std::size_t n = labels.size();
    const auto tree = build_split_tree(s, d.bridge_candidates);

    std::map<std::size_t, std::size_t> blob_at;
    for (std::size_t b = 0; b < d.blobs.size(); ++b) {
        const auto v = blob_vertex(s, tree, d.blobs[b]);
        if (blob_at.count(v)) throw Error("two blobs collapse to the same tree vertex");
        blob_at[v] = b;
    }
    std::vector<std::vector<int>> terminals_at(tree.size());
    for (auto [t, v] : tree.terminal_at) terminals_at[v].push_back(t);
    std::vector<std::vector<std::size_t>> children(tree.size());
    for (std::size_t v = 1; v < tree.size(); ++v) children[tree.parent[v]].push_back(v);

    int next_id = *std::max_element(labels.begin(), labels.end()) + 1;
    UnionFind uf;
    struct PendingEdge {
        int u, v;
        std::optional<Rational> conductance;
    };
    std::vector<PendingEdge> edges;

    // Vertices on the tree path from a to b, both ends included.
    auto tree_path = [&](std::size_t a, std::size_t b) {
        auto up = [&](std::size_t v) {
            std::vector<std::size_t> chain{v};
            while (v != 0) chain.push_back(v = tree.parent[v]);
            return chain;
        };
        auto ua = up(a), ub = up(b);
        while (ua.size() > 1 && ub.size() > 1 && ua[ua.size() - 2] == ub[ub.size() - 2]) {
            ua.pop_back();
            ub.pop_back();
        }
        ub.pop_back(); // common ancestor kept once, in ua
        ua.insert(ua.end(), ub.rbegin(), ub.rend());
        return ua;
    };

    std::map<std::size_t, int> tree_node;
    auto node_of = [&](std::size_t v) {
        auto it = tree_node.find(v);
        if (it != tree_node.end()) return it->second;
        const auto& ts = terminals_at[v];
        if (ts.size() > 1)
            throw Error("terminals " + std::to_string(ts[0]) + " and " + std::to_string(ts[1]) +
                        " sit at zero distance");
        const int id = ts.empty() ? next_id++ : ts[0];
        tree_node[v] = id;
        return id;
    };

    // port[{v, split}]: node where the tree edge for `split` meets blob vertex v.
    std::map<std::pair<std::size_t, std::size_t>, int> port;
    std::set<std::size_t> absorbed; // trivial splits merged into a blob terminal

    for (auto [v, bi] : blob_at) {
        const auto& blob = d.blobs[bi];
        const auto it = std::find_if(plan.blobs.begin(), plan.blobs.end(),
                                     [&](const BlobPlan<T>& bp) { return bp.index == bi; });
        if (it == plan.blobs.end()) throw Error("blob " + std::to_string(bi + 1) + " has no reconstruction");
        const auto& bp = *it;

        struct Direction {
            std::vector<int> terms;
            std::optional<std::size_t> split; // tree edge, or a terminal sitting at v
            std::size_t far = 0;
        };
        std::vector<Direction> dirs;
        if (v != 0) {
            std::vector<int> rest;
            for (int l : labels)
                if (!std::binary_search(tree.part[v].begin(), tree.part[v].end(), l)) rest.push_back(l);
            dirs.push_back({rest, tree.split_of[v], tree.parent[v]});
        }
        for (auto c : children[v]) dirs.push_back({tree.part[c], tree.split_of[c], c});
        for (int t : terminals_at[v]) dirs.push_back({{t}, std::nullopt, 0});

        auto group_of = [&](int label) {
            for (std::size_t gi = 0; gi < blob.groups.size(); ++gi)
                if (contains(blob.groups[gi], label)) return gi;
            throw Error("terminal " + std::to_string(label) + " is in no group");
        };
        std::vector<std::vector<const Direction*>> by_group(blob.groups.size());
        for (const auto& dir : dirs) by_group[group_of(dir.terms.front())].push_back(&dir);

        // Anchor of a group: a terminal sitting at v, else the terminal just
        // across the group's only tree edge, else the representative. If the
        // group meets the blob at a terminal, that terminal is the anchor.
        std::vector<int> anchor(blob.groups.size());
        for (std::size_t gi = 0; gi < blob.groups.size(); ++gi) {
            const auto& gd = by_group[gi];
            anchor[gi] = *std::min_element(blob.groups[gi].begin(), blob.groups[gi].end());
            const auto at_v = std::find_if(gd.begin(), gd.end(), [](const Direction* dir) { return !dir->split; });
            if (at_v != gd.end()) anchor[gi] = (*at_v)->terms.front();
            else if (gd.size() == 1 && terminals_at[gd.front()->far].size() == 1)
                anchor[gi] = terminals_at[gd.front()->far].front();
        }
        std::vector<int> anchors = anchor;
        std::sort(anchors.begin(), anchors.end(),
                  [&](int a, int b) { return plan.order.position(a) < plan.order.position(b); });
        StrandMatching matching = bp.matching;
        if (anchors != bp.representatives) {
            Matrix<T> sub = restrict_resistance(plan.w, std::span<const int>(anchors));
            std::vector<int> local(anchors.size());
            std::iota(local.begin(), local.end(), 1);
            sub.set_labels(local);
            matching = strand_matching_from_response(m_from_w(sub, plan.tol), plan.tol);
        }
        auto local_of = [&](int label) {
            return static_cast<int>(std::find(anchors.begin(), anchors.end(), label) - anchors.begin()) + 1;
        };

        // Per group: keep the anchor as a blob terminal, or treat it as a
        // boundary spike standing in for the junction further in. The two
        // strands at an anchor cross exactly when such a spike can be pulled
        // out; uncrossing them contracts it, leaving the junction in its place.
        enum class Mode { keep, spike };
        std::vector<Mode> mode(blob.groups.size(), Mode::keep);
        std::vector<int> partner(2 * anchors.size() + 1);
        for (int st = 1; st <= static_cast<int>(2 * anchors.size()); ++st) partner[st] = matching.partner(st);
        for (std::size_t gi = 0; gi < blob.groups.size(); ++gi) {
            const auto& gd = by_group[gi];
            const int loc = local_of(anchor[gi]);
            if (blob.groups[gi].size() == 1 && gd.size() == 1) {
                const Direction& only = *gd.front();
                const bool leaf = only.split && !blob_at.count(only.far) &&
                                  children[only.far].size() + (only.far != 0 ? 1 : 0) == 1 &&
                                  terminals_at[only.far].size() == 1 && terminals_at[only.far][0] == anchor[gi];
                if (!only.split || leaf) {
                    if (leaf) absorbed.insert(*only.split);
                    continue;
                }
            }
            if (strands_cross(matching, 2 * loc - 1, 2 * loc)) {
                mode[gi] = Mode::spike;
                const int a = 2 * loc - 1, b = 2 * loc, pa = partner[a], pb = partner[b];
                partner[a] = pb, partner[pb] = a;
                partner[b] = pa, partner[pa] = b;
                continue;
            }
            // The anchor lies on the blob: the tree path out to it carries no edge.
            for (const Direction* dir : gd) {
                if (!dir->split || !contains(dir->terms, anchor[gi])) continue;
                const auto path = tree_path(v, tree.terminal_at.at(anchor[gi]));
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    const auto lo = tree.parent[path[i]] == path[i + 1] ? path[i] : path[i + 1];
                    if (i > 0 && blob_at.count(path[i]))
                        throw Error("attachment ambiguity: terminal " + std::to_string(anchor[gi]) + " lies on blob " +
                                    std::to_string(bi + 1) + " and beyond another blob");
                    absorbed.insert(tree.split_of[lo]);
                    if (i > 0) uf.join(anchor[gi], node_of(path[i]));
                }
                if (!blob_at.count(path.back())) uf.join(anchor[gi], node_of(path.back()));
            }
        }
        std::vector<std::pair<int, int>> pairs;
        for (int st = 1; st < static_cast<int>(partner.size()); ++st)
            if (st < partner[st]) pairs.emplace_back(st, partner[st]);
        const Network g = matching_to_graph(StrandMatching(anchors.size(), pairs));

        const int k = static_cast<int>(anchors.size());
        std::map<int, int> global; // local node -> global id
        std::vector<int> attach(blob.groups.size(), 0);
        for (std::size_t gi = 0; gi < blob.groups.size(); ++gi) {
            const int loc = local_of(anchor[gi]);
            global[loc] = mode[gi] == Mode::keep ? anchor[gi] : next_id++;
            attach[gi] = global[loc];
        }
        for (int node : g.nodes())
            if (node > k) global[node] = next_id++;
        for (const auto& e : g.edges()) edges.push_back({global.at(e.u), global.at(e.v), std::nullopt});
        for (std::size_t gi = 0; gi < blob.groups.size(); ++gi)
            for (const Direction* dir : by_group[gi]) {
                if (dir->split) port[{v, *dir->split}] = attach[gi];
                else uf.join(attach[gi], dir->terms.front());
            }
    }

    for (std::size_t c = 1; c < tree.size(); ++c) {
        const auto split = tree.split_of[c];
        if (absorbed.count(split)) continue;
        const auto p = tree.parent[c];
        const bool blob_c = blob_at.count(c) != 0, blob_p = blob_at.count(p) != 0;
        const int a = blob_c ? port.at({c, split}) : node_of(c);
        const int b = blob_p ? port.at({p, split}) : node_of(p);
        const bool trivial = s.splits[split].trivial(n);
        if (!trivial && !plan.bridge_verified(split)) {
            uf.join(a, b);
            continue;
        }
        std::optional<Rational> g;
        if (!blob_c && !blob_p) {
            const T& w = s.splits[split].weight;
            if constexpr (ScalarOps<T>::exact) g = Rational(1) / ScalarOps<T>::to_rational(w);
            else g = approximate(1.0 / ScalarOps<T>::to_double(w));
        }
        edges.push_back({a, b, g});
    }
    // Root and other edge-free vertices still need their node.
    for (std::size_t v = 0; v < tree.size(); ++v)
        if (!blob_at.count(v) && !terminals_at[v].empty()) node_of(v);

    // Collapse each class onto its terminal, if any.
    std::set<int> terminal_set(labels.begin(), labels.end());
    std::map<int, int> class_terminal;
    for (int t : labels) {
        const int r = uf.find(t);
        auto [it, fresh] = class_terminal.emplace(r, t);
        if (!fresh) throw Error("contraction merges terminals " + std::to_string(it->second) + " and " + std::to_string(t));
    }
    std::map<int, int> rename;
    int interior = *std::max_element(labels.begin(), labels.end()) + 1;
    auto final_id = [&](int id) {
        const int r = uf.find(id);
        auto ct = class_terminal.find(r);
        if (ct != class_terminal.end()) return ct->second;
        auto it = rename.find(r);
        if (it != rename.end()) return it->second;
        rename[r] = interior;
        return interior++;
    };

    Network net;
    for (int t : labels) net.add_node(t, true);
    std::vector<PendingEdge> mapped;
    for (const auto& e : edges) mapped.push_back({final_id(e.u), final_id(e.v), e.conductance});
    for (const auto& [old, id] : rename) net.add_node(id, false);
    for (const auto& e : mapped)
        if (e.u != e.v) net.add_edge(e.u, e.v, e.conductance);
    return net;
}

namespace {

template <Scalar T>
PipelineResult<T>& fail(PipelineResult<T>& r, int step, std::string gate, std::string message, std::string witness = {})
{
    r.failure = PipelineFailure{step, std::move(gate), std::move(message), std::move(witness)};
    return r;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

} // namespace

template <Scalar T>
PipelineResult<T> reconstruct_pipeline(const Matrix<T>& input, const PipelineOptions& options)
{
    PipelineResult<T> r;
    const auto& tol = options.tol;
    ReconstructionPlan<T> plan;
    plan.tol = tol;
    Matrix<T> m, w;

    // 1: validation
    try {
        if (options.input_is_resistance) {
            const auto rr = validate_resistance(input, tol);
            if (!rr.valid()) return fail(r, 1, "validation", "not a resistance matrix: " + join(rr.failures, ", "));
            w = input;
            m = m_from_w(w, tol);
            r.validation = validate_response(m, tol);
        } else {
            r.validation = validate_response(input, tol);
            if (!r.validation->valid())
                return fail(r, 1, "validation", "not a response matrix: " + join(r.validation->failures, ", "));
            m = r.validation->symmetrized ? symmetrized(input) : input;
            w = w_from_m(m, tol);
        }
    } catch (const Error& e) {
        return fail(r, 1, "validation", e.what());
    }

    // 2: circular order, Kalmanson condition, circular planarity
    auto quadruple = [](const KalmansonVerdict& v) {
        std::string q;
        for (int x : *v.witness) q += (q.empty() ? "" : ",") + std::to_string(x);
        return q;
    };
    try {
        if (options.order) {
            plan.order = *options.order;
            std::vector<int> a = plan.order.labels(), b = w.labels();
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b) return fail(r, 2, "order", "given order does not list the matrix labels");
            plan.consistent_orders = 0;
        } else {
            const auto search = find_circular_order(w, tol, options.max_n);
            plan.consistent_orders = search.consistent_orders;
            plan.order_count_capped = search.count_capped;
            if (search.status == OrderStatus::none) {
                // any order fails somewhere; report where the input's own order does
                const auto own = is_kalmanson(w, CircularOrder(w.labels()), tol);
                return fail(r, 2, "order", "no circular order makes the resistance matrix Kalmanson",
                            "input order fails at " + quadruple(own));
            }
            if (search.status == OrderStatus::undetermined)
                return fail(r, 2, "order", "heuristic order search found no Kalmanson order");
            plan.order = *search.order;
        }
        const auto kv = is_kalmanson(w, plan.order, tol);
        if (!kv.kalmanson)
            return fail(r, 2, "kalmanson", "resistance matrix is not Kalmanson for the order", quadruple(kv));
        if (plan.order.size() <= options.planarity_max_n) {
            const auto pv = is_circular_planar(m, plan.order, tol, options.planarity_max_n);
            if (!pv.planar)
                return fail(r, 2, "planarity", "negative circular minor",
                            pv.witness->to_string() + " = " + ScalarOps<T>::format(*pv.witness_value));
        }
        plan.m = reorder(m, plan.order);
        plan.w = reorder(w, plan.order);
    } catch (const Error& e) {
        return fail(r, 2, "order", e.what());
    }

    // 3: split system, blobs, bridge verification
    try {
        plan.splits = split_decomposition(plan.w, plan.order, tol);
        plan.decomposition = decompose(plan.splits);
        const std::size_t n = plan.order.size();
        for (auto c : plan.decomposition.bridge_candidates) {
            if (plan.splits.splits[c].trivial(n)) continue;
            plan.bridges.push_back({c, verify_bridge(plan.m, plan.order, plan.splits.splits[c].part, tol)});
        }
        plan.obstruction = one_nested_obstruction(plan.splits, tol);
    } catch (const Error& e) {
        return fail(r, 3, "splits", e.what());
    }

    // 4: one network per blob
    for (std::size_t b = 0; b < plan.decomposition.blobs.size(); ++b) {
        try {
            BlobPlan<T> bp;
            bp.index = b;
            bp.blob = plan.decomposition.blobs[b];
            auto [sub, reps] = blob_submatrix(plan.w, bp.blob, plan.order);
            bp.resistance = sub;
            bp.representatives = reps;
            bp.response = m_from_w(sub, tol);
            bp.matching = strand_matching_from_response(bp.response, tol);
            bp.graph = matching_to_graph(bp.matching);
            plan.blobs.push_back(std::move(bp));
        } catch (const Error& e) {
            return fail(r, 4, "blob", "blob " + std::to_string(b + 1) + ": " + e.what());
        }
    }

    // 5: reassembly
    try {
        plan.network = reassemble(plan);
    } catch (const Error& e) {
        r.plan = std::move(plan);
        return fail(r, 5, "reassembly", e.what());
    }
    r.plan = std::move(plan);
    return r;
}

template <Scalar T>
void write_plan(std::ostream& out, const ReconstructionPlan<T>& plan)
{
    const auto& s = plan.splits;
    out << "ORDER\n" << plan.order.to_string() << "\n";
    out << "consistent orders " << plan.consistent_orders << (plan.order_count_capped ? "+" : "") << "\n";
    out << "SPLITS\n" << split_table(s);
    out << "BRIDGES\n";
    for (const auto& b : plan.bridges) {
        out << split_to_string(s.splits[b.split].part, s.order) << "\t" << ScalarOps<T>::format(s.splits[b.split].weight)
            << "\t" << (b.check.verified ? "verified" : "rejected");
        if (b.check.blocking) out << " " << b.check.blocking->to_string();
        out << "\n";
    }
    out << "OBSTRUCTION\n";
    if (plan.obstruction) {
        const auto& o = *plan.obstruction;
        auto arc = [](const std::vector<int>& a) {
            std::string t;
            for (int x : a) t += (t.empty() ? "" : ",") + std::to_string(x);
            return t;
        };
        out << "A=" << arc(o.a) << " B=" << arc(o.b) << " C=" << arc(o.c) << " D=" << arc(o.d)
            << " a=" << ScalarOps<T>::format(o.weight_a) << " b=" << ScalarOps<T>::format(o.weight_b) << "\n";
    } else {
        out << "none found\n";
    }
    for (const auto& bp : plan.blobs) {
        out << "BLOB " << bp.index + 1 << "\n";
        out << "splits";
        for (auto si : bp.blob.splits) out << " [" << split_to_string(s.splits[si].part, s.order) << "]";
        out << "\ngroups";
        for (const auto& g : bp.blob.groups) {
            out << " {";
            for (std::size_t i = 0; i < g.size(); ++i) out << (i ? "," : "") << g[i];
            out << "}";
        }
        out << "\nrepresentatives";
        for (int x : bp.representatives) out << " " << x;
        out << "\nresistance\n";
        write_matrix(out, bp.resistance);
        out << "response\n";
        write_matrix(out, bp.response);
        out << "matching " << bp.matching.to_string() << "\n";
        out << "graph\n";
        write_network(out, bp.graph);
    }
    out << "NETWORK\n";
    write_network(out, plan.network);
}

std::string network_dot(const Network& net, const std::string& name)
{
    std::ostringstream o;
    o << "graph " << name << " {\n";
    for (int v : net.nodes())
        o << "  n" << v << " [label=\"" << v << "\"" << (net.is_boundary(v) ? ", shape=doublecircle" : ", shape=circle")
          << "];\n";
    for (const auto& e : net.edges())
        o << "  n" << e.u << " -- n" << e.v << " [label=\""
          << (e.conductance ? format_rational(*e.conductance) : std::string("?")) << "\"];\n";
    o << "}\n";
    return o.str();
}

#define CIRCNET_INSTANTIATE(T)                                                                                     \
    template BridgeCheck verify_bridge<T>(const Matrix<T>&, const CircularOrder&, const std::vector<int>&,        \
                                          const Tolerance&);                                                     \
    template std::pair<Matrix<T>, std::vector<int>> blob_submatrix<T>(const Matrix<T>&, const Blob&,              \
                                                                      const CircularOrder&);                     \
    template IntMatrix max_respected<T>(const Matrix<T>&, const Tolerance&);                                      \
    template StrandMatching strand_matching_from_response<T>(const Matrix<T>&, const Tolerance&);                 \
    template struct ReconstructionPlan<T>;                                                                        \
    template Network reassemble<T>(const ReconstructionPlan<T>&);                                                 \
    template PipelineResult<T> reconstruct_pipeline<T>(const Matrix<T>&, const PipelineOptions&);                 \
    template void write_plan<T>(std::ostream&, const ReconstructionPlan<T>&);

CIRCNET_INSTANTIATE(Rational)
CIRCNET_INSTANTIATE(double)

} // namespace circnet
