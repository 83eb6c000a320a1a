#ifndef CIRCNET_SPLITSYS_HPP
#define CIRCNET_SPLITSYS_HPP

#include "circnet/kalmanson.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace circnet {

// All four intersections of the two bipartitions are nonempty.
bool splits_cross(const std::vector<int>& part_a, const std::vector<int>& part_b, const CircularOrder& order);

template <Scalar T>
bool splits_cross(const WeightedSplit<T>& a, const WeightedSplit<T>& b, const CircularOrder& order)
{
    return splits_cross(a.part, b.part, order);
}

struct Blob {
    std::vector<std::size_t> splits;         // indices into the system
    std::vector<std::vector<int>> groups;    // maximal arcs not separated by the blob's splits, circular order
};

struct BlobDecomposition {
    std::vector<std::size_t> bridge_candidates;     // splits crossing no other split, trivial ones included
    std::vector<Blob> blobs;                        // components of the crossing graph
    std::vector<std::vector<std::size_t>> incidence; // per blob: bridge candidates touching it

    bool is_candidate(std::size_t split) const;
};

template <Scalar T>
BlobDecomposition decompose(const WeightedSplitSystem<T>& s);

// Tree obtained by contracting every blob of the decomposition: one vertex
// per bridge candidate (the side of its canonical part) plus a root.
struct SplitTree {
    std::vector<std::size_t> parent;        // parent[0] unused (root)
    std::vector<std::size_t> split_of;      // split index of the edge to the parent; split_of[0] unused
    std::vector<std::vector<int>> part;     // canonical part below each vertex; empty for the root
    std::map<int, std::size_t> terminal_at; // vertex holding each terminal

    std::size_t size() const { return parent.size(); }
    std::size_t vertex_of_split(std::size_t split) const;
};

template <Scalar T>
SplitTree build_split_tree(const WeightedSplitSystem<T>& s, const std::vector<std::size_t>& candidates);

// Vertex of the contracted tree that a blob collapses to.
template <Scalar T>
std::size_t blob_vertex(const WeightedSplitSystem<T>& s, const SplitTree& tree, const Blob& blob);

template <Scalar T>
struct ObstructionWitness {
    std::vector<int> a, b, c, d;     // arcs A, B, C, D in circular order
    std::size_t cross1, cross2;      // (A u B)|(C u D) and (A u D)|(B u C), weight a
    std::size_t flank1, flank2;      // (A u B u C)|D and (A u D u C)|B, weight b
    T weight_a, weight_b;
};

// Searches every way of cutting the circle into arcs A,B,C,D for two crossing
// splits of equal weight a and two flanking non-crossing splits of equal
// weight b != a. A result certifies that no 1-nested network has this split
// system; an empty result only means no obstruction of this form was found.
template <Scalar T>
std::optional<ObstructionWitness<T>> one_nested_obstruction(const WeightedSplitSystem<T>& s,
                                                            const Tolerance& tol = {});

enum class DotStyle { network, polygon };

template <Scalar T>
std::string render_dot(const WeightedSplitSystem<T>& s, DotStyle style);

// One line per split: weight, the two sides, and whether it is trivial.
template <Scalar T>
std::string split_table(const WeightedSplitSystem<T>& s);

} // namespace circnet

#endif
