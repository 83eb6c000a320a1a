#ifndef CIRCNET_RECONSTRUCT_HPP
#define CIRCNET_RECONSTRUCT_HPP

#include "circnet/kalmanson.hpp"
#include "circnet/network.hpp"
#include "circnet/response.hpp"
#include "circnet/splitsys.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace circnet {

// Stubs t_1..t_2n and cut points x_1..x_2n alternate clockwise starting with
// x_1, just counterclockwise of t_1. Cut x_2i sits on terminal i, x_2i+1
// halfway between terminals i and i+1. All indices are 1-based positions in
// the circular order, not labels.
struct CutFrame {
    std::size_t n = 0;

    explicit CutFrame(std::size_t terminals) : n(terminals) {}

    std::size_t cuts() const { return 2 * n; }
    // Terminal position (1..n) strictly inside the clockwise arc from x_i to x_j.
    bool inside(std::size_t i, std::size_t j, std::size_t terminal) const
    {
        return i < 2 * terminal && 2 * terminal < j;
    }
    // Terminal strictly outside the arc and not on either cut.
    bool outside(std::size_t i, std::size_t j, std::size_t terminal) const
    {
        return 2 * terminal < i || 2 * terminal > j;
    }
};

using IntMatrix = std::vector<std::vector<int>>; // 1-based access via [i-1][j-1]

struct BridgeCheck {
    bool verified = true;
    std::optional<CircularPair> blocking; // pair whose sides connect but whose union does not
    std::size_t pairs_checked = 0;
};

// Every circular pair whose paths each stay inside one side of the split, with
// paths on both sides: if both one-sided sub-pairs have positive minors, the
// full minor must be positive too. `m` must be labelled compatibly with `order`.
template <Scalar T>
BridgeCheck verify_bridge(const Matrix<T>& m, const CircularOrder& order, const std::vector<int>& side,
                          const Tolerance& tol = {});

// Smallest label of each group, listed in circular order.
std::vector<int> representatives(const Blob& blob, const CircularOrder& order);

// W restricted to the representatives, relabelled 1..k in circular order.
// Returns the matrix and the original label of each new label.
template <Scalar T>
std::pair<Matrix<T>, std::vector<int>> blob_submatrix(const Matrix<T>& w, const Blob& blob, const CircularOrder& order);

// MR(i,j) for cut points 1 <= i < j <= 2n (zero elsewhere): the largest k with
// a positive circular minor whose P terminals lie strictly inside the cut arc
// and Q terminals strictly outside. `m` is labelled 1..n in circular order.
template <Scalar T>
IntMatrix max_respected(const Matrix<T>& m, const Tolerance& tol = {});

// Terminals strictly inside the arc from x_i to x_j.
IntMatrix num_terminals(std::size_t n);

// RE(i,j) = number of strands with both ends among t_i..t_{j-1}.
IntMatrix reentrants(const StrandMatching& matching);

class InconsistentDataError : public Error {
public:
    using Error::Error;
};

template <Scalar T>
StrandMatching strand_matching_from_response(const Matrix<T>& m, const Tolerance& tol = {});

// Shaded-face graph of a straight-chord realisation of the matching.
// Terminals are 1..n, interior nodes n+1.. ; all conductances unknown.
Network matching_to_graph(const StrandMatching& matching);

template <Scalar T>
struct BlobPlan {
    std::size_t index = 0;
    Blob blob;
    std::vector<int> representatives; // original labels; local label i+1 is representatives[i]
    Matrix<T> resistance;             // on the representatives, local labels
    Matrix<T> response;
    StrandMatching matching;
    Network graph;                    // local labels
};

struct BridgeReport {
    std::size_t split = 0;
    BridgeCheck check;
};

template <Scalar T>
struct ReconstructionPlan {
    CircularOrder order;
    Tolerance tol;
    Matrix<T> m; // rows in circular order
    Matrix<T> w;
    std::size_t consistent_orders = 0;
    bool order_count_capped = false;
    WeightedSplitSystem<T> splits;
    BlobDecomposition decomposition;
    std::vector<BridgeReport> bridges; // nontrivial bridge candidates
    std::vector<BlobPlan<T>> blobs;
    std::optional<ObstructionWitness<T>> obstruction;
    Network network;                   // reassembled, original labels

    bool bridge_verified(std::size_t split) const;
};

// Glue the blob graphs along the contracted split tree. Rejected bridge
// candidates are contracted to a single node. Edges between two tree nodes
// outside every blob get conductance 1/weight; all others are unknown.
template <Scalar T>
Network reassemble(const ReconstructionPlan<T>& plan);

struct PipelineOptions {
    Tolerance tol;
    std::optional<CircularOrder> order; // skip the search when given
    std::size_t max_n = 10;             // exhaustive order search bound
    std::size_t planarity_max_n = 12;
    bool input_is_resistance = false;
};

struct PipelineFailure {
    int step = 0;
    std::string gate;    // "validation", "order", "kalmanson", "planarity", "splits", "blob", "reassembly"
    std::string message;
    std::string witness;
};

template <Scalar T>
struct PipelineResult {
    std::optional<ValidationReport> validation;
    std::optional<ReconstructionPlan<T>> plan;
    std::optional<PipelineFailure> failure;

    bool ok() const { return !failure.has_value(); }
};

template <Scalar T>
PipelineResult<T> reconstruct_pipeline(const Matrix<T>& input, const PipelineOptions& options = {});

// Sections ORDER, SPLITS, BRIDGES, BLOB k, NETWORK in a fixed field order.
template <Scalar T>
void write_plan(std::ostream& out, const ReconstructionPlan<T>& plan);

std::string network_dot(const Network& net, const std::string& name = "network");

} // namespace circnet

#endif
