#include "circnet/splitsys.hpp"

#include "arrangement.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace circnet {

bool splits_cross(const std::vector<int>& part_a, const std::vector<int>& part_b, const CircularOrder& order)
{
    bool ab = false, a_notb = false, nota_b = false, neither = false;
    for (int l : order.labels()) {
        const bool in_a = std::find(part_a.begin(), part_a.end(), l) != part_a.end();
        const bool in_b = std::find(part_b.begin(), part_b.end(), l) != part_b.end();
        ab |= in_a && in_b;
        a_notb |= in_a && !in_b;
        nota_b |= !in_a && in_b;
        neither |= !in_a && !in_b;
    }
    return ab && a_notb && nota_b && neither;
}

bool BlobDecomposition::is_candidate(std::size_t split) const
{
    return std::find(bridge_candidates.begin(), bridge_candidates.end(), split) != bridge_candidates.end();
}

namespace {

bool subset_of(const std::vector<int>& a, const std::vector<int>& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<int> sorted(std::vector<int> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

template <Scalar T>
BlobDecomposition decompose(const WeightedSplitSystem<T>& s)
{
    const std::size_t k = s.splits.size();
    std::vector<std::vector<std::size_t>> adj(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (splits_cross(s.splits[i], s.splits[j], s.order)) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    BlobDecomposition d;
    std::vector<int> comp(k, -1);
    for (std::size_t i = 0; i < k; ++i) {
        if (adj[i].empty()) {
            d.bridge_candidates.push_back(i);
            continue;
        }
        if (comp[i] >= 0) continue;
        Blob blob;
        std::vector<std::size_t> stack{i};
        comp[i] = static_cast<int>(d.blobs.size());
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            blob.splits.push_back(u);
            for (auto v : adj[u])
                if (comp[v] < 0) {
                    comp[v] = comp[i];
                    stack.push_back(v);
                }
        }
        std::sort(blob.splits.begin(), blob.splits.end());
        d.blobs.push_back(std::move(blob));
    }

    const auto& order = s.order;
    const std::size_t n = order.size();
    for (auto& blob : d.blobs) {
        // Terminals with the same side pattern over the blob's splits share a group.
        std::map<std::vector<bool>, std::vector<int>> by_sig;
        std::vector<std::vector<bool>> sig_at(n);
        for (std::size_t p = 0; p < n; ++p) {
            const int l = order.labels()[p];
            std::vector<bool> sig;
            for (auto si : blob.splits) sig.push_back(std::binary_search(s.splits[si].part.begin(), s.splits[si].part.end(), l));
            sig_at[p] = sig;
        }
        // Walk the circle from a group boundary so each group is listed once, in order.
        std::size_t start = 0;
        for (std::size_t p = 0; p < n; ++p)
            if (sig_at[p] != sig_at[(p + n - 1) % n]) {
                start = p;
                break;
            }
        for (std::size_t q = 0; q < n; ++q) {
            const std::size_t p = (start + q) % n;
            if (q == 0 || sig_at[p] != sig_at[(p + n - 1) % n]) blob.groups.emplace_back();
            blob.groups.back().push_back(order.labels()[p]);
        }
        for (auto& g : blob.groups) std::sort(g.begin(), g.end());
    }

    for (const auto& blob : d.blobs) {
        std::vector<std::size_t> touching;
        for (auto c : d.bridge_candidates) {
            const auto& a = s.splits[c].part;
            const auto b = s.complement(s.splits[c]);
            for (const auto& g : blob.groups) {
                const std::vector<int>* side = subset_of(a, g) ? &a : subset_of(b, g) ? &b : nullptr;
                if (!side) continue;
                // Only the outermost candidate inside a group touches the blob.
                bool shadowed = false;
                for (auto c2 : d.bridge_candidates) {
                    if (c2 == c) continue;
                    for (const auto& side2 : {s.splits[c2].part, s.complement(s.splits[c2])})
                        if (side2.size() > side->size() && subset_of(*side, side2) && subset_of(side2, g)) shadowed = true;
                }
                if (!shadowed) touching.push_back(c);
                break;
            }
        }
        d.incidence.push_back(std::move(touching));
    }
    return d;
}

std::size_t SplitTree::vertex_of_split(std::size_t split) const
{
    for (std::size_t v = 1; v < size(); ++v)
        if (split_of[v] == split) return v;
    throw Error("split is not an edge of the tree");
}

template <Scalar T>
SplitTree build_split_tree(const WeightedSplitSystem<T>& s, const std::vector<std::size_t>& candidates)
{
    SplitTree t;
    t.parent.push_back(0);
    t.split_of.push_back(0);
    t.part.emplace_back();
    std::vector<std::size_t> by_size = candidates;
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](auto a, auto b) { return s.splits[a].part.size() > s.splits[b].part.size(); });
    for (auto c : by_size) {
        const auto& p = s.splits[c].part;
        std::size_t parent = 0;
        // Smallest existing part strictly containing p; larger parts were added first.
        for (std::size_t v = 1; v < t.size(); ++v)
            if (t.part[v].size() > p.size() && subset_of(p, t.part[v]) &&
                (parent == 0 || t.part[v].size() < t.part[parent].size()))
                parent = v;
        for (std::size_t v = 1; v < t.size(); ++v)
            if (t.part[v] != p && !subset_of(p, t.part[v]) && !subset_of(t.part[v], p)) {
                std::set<int> both(p.begin(), p.end());
                bool overlap = false;
                for (int l : t.part[v]) overlap |= both.count(l) != 0;
                if (overlap) throw Error("split tree: candidate splits are not compatible");
            }
        t.parent.push_back(parent);
        t.split_of.push_back(c);
        t.part.push_back(p);
    }
    for (int l : s.order.labels()) {
        std::size_t at = 0;
        for (std::size_t v = 1; v < t.size(); ++v)
            if (std::binary_search(t.part[v].begin(), t.part[v].end(), l) &&
                (at == 0 || t.part[v].size() < t.part[at].size()))
                at = v;
        t.terminal_at[l] = at;
    }
    return t;
}

template <Scalar T>
std::size_t blob_vertex(const WeightedSplitSystem<T>& s, const SplitTree& tree, const Blob& blob)
{
    const int smallest = *std::min_element(s.order.labels().begin(), s.order.labels().end());
    std::vector<int> below;
    for (const auto& g : blob.groups)
        if (!std::binary_search(g.begin(), g.end(), smallest)) below.insert(below.end(), g.begin(), g.end());
    below = sorted(below);
    std::size_t best = 0;
    for (std::size_t v = 1; v < tree.size(); ++v) {
        if (tree.part[v] == below) return v;
        if (subset_of(below, tree.part[v]) && (best == 0 || tree.part[v].size() < tree.part[best].size())) best = v;
    }
    return best;
}

template <Scalar T>
std::optional<ObstructionWitness<T>> one_nested_obstruction(const WeightedSplitSystem<T>& s, const Tolerance& tol)
{
    const std::size_t n = s.order.size();
    if (n < 6) return std::nullopt; // B and D need two terminals each, A and C one
    std::map<std::vector<int>, std::size_t> lookup;
    double scale = 0;
    for (std::size_t i = 0; i < s.splits.size(); ++i) {
        lookup[s.splits[i].part] = i;
        scale = std::max(scale, ScalarOps<T>::to_double(ScalarOps<T>::abs(s.splits[i].weight)));
    }
    auto find = [&](const std::vector<int>& side) -> std::optional<std::size_t> {
        auto it = lookup.find(canonical_part(side, s.order));
        if (it == lookup.end()) return std::nullopt;
        return it->second;
    };
    auto arc = [&](std::size_t from, std::size_t to) {
        std::vector<int> out;
        for (std::size_t p = from; p < to; ++p) out.push_back(s.order.at(static_cast<long>(p)));
        return out;
    };
    auto join = [](std::vector<int> a, const std::vector<int>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    for (std::size_t c0 = 0; c0 < n; ++c0)
        for (std::size_t c1 = c0 + 1; c1 < n; ++c1)
            for (std::size_t c2 = c1 + 1; c2 < n; ++c2)
                for (std::size_t c3 = c2 + 1; c3 < n; ++c3) {
                    const std::vector<int> x[4] = {arc(c0, c1), arc(c1, c2), arc(c2, c3), arc(c3, c0 + n)};
                    for (std::size_t r = 0; r < 4; ++r) {
                        const auto& A = x[r];
                        const auto& B = x[(r + 1) % 4];
                        const auto& C = x[(r + 2) % 4];
                        const auto& D = x[(r + 3) % 4];
                        if (B.size() < 2 || D.size() < 2) continue;
                        auto s1 = find(join(A, B)), s2 = find(join(A, D)), f1 = find(D), f2 = find(B);
                        if (!s1 || !s2 || !f1 || !f2) continue;
                        const T& a1 = s.splits[*s1].weight;
                        const T& a2 = s.splits[*s2].weight;
                        const T& b1 = s.splits[*f1].weight;
                        const T& b2 = s.splits[*f2].weight;
                        if (!ScalarOps<T>::equal(a1, a2, scale, tol) || !ScalarOps<T>::equal(b1, b2, scale, tol)) continue;
                        if (ScalarOps<T>::equal(a1, b1, scale, tol)) continue;
                        return ObstructionWitness<T>{sorted(A), sorted(B), sorted(C), sorted(D), *s1, *s2, *f1, *f2, a1, b1};
                    }
                }
    return std::nullopt;
}

namespace {

// Start position and length of a split's canonical part as an arc.
std::pair<std::size_t, std::size_t> arc_of(const std::vector<int>& part, const CircularOrder& order)
{
    const std::size_t n = order.size();
    std::vector<bool> in(n, false);
    for (int l : part) in[order.position(l)] = true;
    for (std::size_t p = 0; p < n; ++p)
        if (in[p] && !in[(p + n - 1) % n]) return {p, part.size()};
    throw Error("split is not an arc of the order");
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

} // namespace

template <Scalar T>
std::string render_dot(const WeightedSplitSystem<T>& s, DotStyle style)
{
    const auto& order = s.order;
    const std::size_t n = order.size();
    std::ostringstream out;
    std::map<std::size_t, std::size_t> trivial_at; // position -> split index
    std::vector<std::size_t> diagonals;
    for (std::size_t i = 0; i < s.splits.size(); ++i) {
        const auto& sp = s.splits[i];
        if (sp.trivial(n)) {
            const int l = sp.part.size() == 1 ? sp.part.front() : s.complement(sp).front();
            trivial_at[order.position(l)] = i;
        } else {
            diagonals.push_back(i);
        }
    }
    auto weight = [&](std::size_t i) { return ScalarOps<T>::format(s.splits[i].weight); };

    std::vector<double> angles;
    for (std::size_t k = 0; k < n; ++k) angles.push_back(detail::circle_angle(static_cast<double>(k), static_cast<double>(n), k));
    std::vector<std::pair<std::size_t, std::size_t>> chords;
    for (auto i : diagonals) {
        auto [p, len] = arc_of(s.splits[i].part, order);
        chords.emplace_back(p, (p + len) % n);
    }

    if (style == DotStyle::polygon) {
        out << "graph splits_polygon {\n  layout=neato;\n  node [shape=point];\n";
        for (std::size_t k = 0; k < n; ++k)
            out << "  v" << k << " [pos=\"" << 3 * std::cos(angles[k]) << ',' << 3 * std::sin(angles[k]) << "!\"];\n";
        for (std::size_t k = 0; k < n; ++k) {
            std::string label = std::to_string(order.labels()[k]);
            if (trivial_at.count(k)) label += " (" + weight(trivial_at[k]) + ")";
            out << "  v" << k << " -- v" << (k + 1) % n << " [label=" << quoted(label) << "];\n";
        }
        for (std::size_t c = 0; c < chords.size(); ++c)
            out << "  v" << chords[c].first << " -- v" << chords[c].second << " [style=dashed, label="
                << quoted(weight(diagonals[c])) << "];\n";
        out << "}\n";
        return out.str();
    }

    // Network style: cells of the polygon cut by its diagonals become
    // vertices; each diagonal piece between two cells becomes an edge of
    // that split's parallel class.
    out << "graph split_network {\n  node [shape=circle, label=\"\", width=0.08];\n";
    if (n < 2) {
        out << "}\n";
        return out.str();
    }
    const auto ar = detail::build_arrangement(angles, chords);
    std::set<std::size_t> cells;
    for (std::size_t f = 0; f < ar.face_cycle.size(); ++f)
        if (f != ar.outer_face) cells.insert(f);
    std::map<std::size_t, std::vector<int>> cell_terminals;
    for (std::size_t k = 0; k < n; ++k)
        if (!trivial_at.count(k)) cell_terminals[ar.arc_face(k)].push_back(order.labels()[k]);
    for (auto f : cells) {
        out << "  c" << f;
        if (cell_terminals.count(f)) {
            std::string label;
            for (int l : cell_terminals[f]) label += (label.empty() ? "" : ",") + std::to_string(l);
            out << " [shape=box, label=" << quoted(label) << ", width=0.3]";
        }
        out << ";\n";
    }
    for (std::size_t c = 0; c < chords.size(); ++c) {
        const auto& path = ar.chord_path[c];
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto f1 = ar.face_of(path[i], path[i + 1]);
            const auto f2 = ar.face_of(path[i + 1], path[i]);
            out << "  c" << f1 << " -- c" << f2 << " [label=" << quoted(weight(diagonals[c])) << ", split="
                << quoted(split_to_string(s.splits[diagonals[c]].part, order)) << "];\n";
        }
    }
    for (const auto& [k, i] : trivial_at) {
        const int l = order.labels()[k];
        out << "  t" << l << " [shape=box, label=" << quoted(std::to_string(l)) << ", width=0.3];\n";
        out << "  c" << ar.arc_face(k) << " -- t" << l << " [label=" << quoted(weight(i)) << "];\n";
    }
    out << "}\n";
    return out.str();
}

template <Scalar T>
std::string split_table(const WeightedSplitSystem<T>& s)
{
    std::ostringstream out;
    out << "# order " << s.order.to_string() << "\n# weight\tsplit\ttrivial\n";
    for (const auto& sp : s.splits)
        out << ScalarOps<T>::format(sp.weight) << '\t' << split_to_string(sp.part, s.order) << '\t'
            << (sp.trivial(s.order.size()) ? "yes" : "no") << '\n';
    return out.str();
}

#define CIRCNET_INSTANTIATE(T)                                                                                  \
    template BlobDecomposition decompose<T>(const WeightedSplitSystem<T>&);                                     \
    template SplitTree build_split_tree<T>(const WeightedSplitSystem<T>&, const std::vector<std::size_t>&);     \
    template std::size_t blob_vertex<T>(const WeightedSplitSystem<T>&, const SplitTree&, const Blob&);          \
    template std::optional<ObstructionWitness<T>> one_nested_obstruction<T>(const WeightedSplitSystem<T>&,      \
                                                                            const Tolerance&);                  \
    template std::string render_dot<T>(const WeightedSplitSystem<T>&, DotStyle);                                \
    template std::string split_table<T>(const WeightedSplitSystem<T>&);

CIRCNET_INSTANTIATE(Rational)
CIRCNET_INSTANTIATE(double)

} // namespace circnet
