#ifndef CIRCNET_NETWORK_HPP
#define CIRCNET_NETWORK_HPP

#include "circnet/circular.hpp"
#include "circnet/matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace circnet {

struct Edge {
    int u = 0;
    int v = 0;
    std::optional<Rational> conductance; // empty = unknown weight
};

// Undirected network with circularly ordered boundary terminals. Parallel
// edges are merged on insertion (conductances add; unknown if either is).
// Rotation lists are clockwise; at a boundary node the list is linear and
// runs from the side facing the next terminal clockwise to the side facing
// the previous one.
class Network {
public:
    void add_node(int id, bool boundary);
    void add_edge(int u, int v, std::optional<Rational> conductance);
    void set_rotation(int id, std::vector<int> clockwise);

    bool has_node(int id) const { return kind_.count(id) != 0; }
    bool is_boundary(int id) const;
    // Boundary nodes in circular order, then interior nodes in insertion order.
    std::vector<int> nodes() const;
    const std::vector<int>& boundary() const { return boundary_; }
    const std::vector<int>& interior() const { return interior_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t node_count() const { return boundary_.size() + interior_.size(); }
    CircularOrder boundary_order() const { return CircularOrder(boundary_); }

    std::vector<int> neighbors(int id) const;
    const Edge* find_edge(int u, int v) const;
    bool is_connected() const;
    bool all_weights_known() const;

    bool has_embedding() const { return !rotation_.empty(); }
    const std::vector<int>& rotation(int id) const;

    // Checks that the rotation system is complete and describes a plane
    // embedding with all terminals on the outer face in boundary order.
    // Throws Error with the reason otherwise.
    void validate_embedding() const;

private:
    std::map<int, bool> kind_;
    std::vector<int> boundary_;
    std::vector<int> interior_;
    std::vector<Edge> edges_;
    std::map<std::pair<int, int>, std::size_t> edge_index_;
    std::map<int, std::vector<int>> rotation_;
};

// Lines: "node <id> boundary|interior", "edge <u> <v> <conductance|?>",
// "rot <id> <clockwise neighbours>"; '#' starts a comment.
Network read_network(std::istream& in);
Network read_network_file(const std::string& path);
void write_network(std::ostream& out, const Network& net);

// Rows/columns labelled by node id, ordered as Network::nodes().
template <Scalar T>
Matrix<T> laplacian(const Network& net);

template <Scalar T>
Matrix<T> response_matrix(const Network& net, const Tolerance& tol = {});

// Effective resistances between all pairs of nodes.
template <Scalar T>
Matrix<T> resistance_matrix(const Network& net, const Tolerance& tol = {});

// Whether vertex-disjoint paths p_i -> q_i exist whose intermediate nodes are
// all interior.
bool has_connection(const Network& net, const CircularPair& pair);

// Every circular pair of size <= max_k (under the boundary order) realised by
// a connection. Throws SizeGuardError when the network has more than max_nodes nodes.
std::vector<CircularPair> enumerate_connections(const Network& net, std::size_t max_k, std::size_t max_nodes = 16);

// Perfect matching on stubs 1..2n. Stub 2i-1 sits just counterclockwise of
// the i-th terminal (in boundary order) and stub 2i just clockwise of it.
class StrandMatching {
public:
    StrandMatching() = default;
    StrandMatching(std::size_t n, std::vector<std::pair<int, int>> pairs);

    std::size_t terminals() const { return n_; }
    int partner(int stub) const { return partner_.at(static_cast<std::size_t>(stub - 1)); }
    // Sorted pairs with the smaller stub first.
    std::vector<std::pair<int, int>> pairs() const;
    std::string to_string() const;

    friend bool operator==(const StrandMatching&, const StrandMatching&) = default;

private:
    std::size_t n_ = 0;
    std::vector<int> partner_;
};

struct MedialResult {
    StrandMatching matching;
    bool lens = false;          // some pair of strands meets more than once
    bool self_crossing = false; // a strand crosses itself
    bool closed_strands = false;

    // Lens-free, no self-crossings, no closed strands.
    bool minimal() const { return !lens && !self_crossing && !closed_strands; }
};

MedialResult medial_strand_matching(const Network& net);

// Random connected circular planar network with boundary 1..n clockwise,
// interior nodes n+1..n+interior, rotation system and positive rational
// conductances. Same arguments give the same network.
Network random_circular_planar(std::size_t n, std::size_t interior, std::uint64_t seed);

} // namespace circnet

#endif
