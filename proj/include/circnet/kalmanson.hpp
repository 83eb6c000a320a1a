#ifndef CIRCNET_KALMANSON_HPP
#define CIRCNET_KALMANSON_HPP

#include "circnet/circular.hpp"
#include "circnet/matrix.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace circnet {

// A bipartition stored by the part that does not contain the smallest label.
template <Scalar T>
struct WeightedSplit {
    std::vector<int> part; // sorted
    T weight{};

    bool trivial(std::size_t n) const { return part.size() == 1 || part.size() + 1 == n; }
};

template <Scalar T>
struct WeightedSplitSystem {
    CircularOrder order;
    std::vector<WeightedSplit<T>> splits;

    std::size_t terminals() const { return order.size(); }
    // The other side of a split.
    std::vector<int> complement(const WeightedSplit<T>& s) const;
    // Index of the split with this bipartition (either side may be given).
    std::optional<std::size_t> find(std::vector<int> side) const;
};

// The side of side|rest that avoids the smallest label of `order`, sorted.
std::vector<int> canonical_part(const std::vector<int>& side, const CircularOrder& order);

// Whether a set of labels is a contiguous arc of the order.
bool is_arc(const std::vector<int>& part, const CircularOrder& order);

// "1,5 | 2,3,4"
std::string split_to_string(const std::vector<int>& part, const CircularOrder& order);

struct KalmansonVerdict {
    bool kalmanson = true;
    std::optional<std::array<int, 4>> witness; // (i,j,k,l) in circular order
};

template <Scalar T>
KalmansonVerdict is_kalmanson(const Matrix<T>& w, const CircularOrder& order, const Tolerance& tol = {});

enum class OrderStatus { found, none, undetermined };

struct OrderSearch {
    OrderStatus status = OrderStatus::none;
    std::optional<CircularOrder> order;  // canonical
    std::size_t consistent_orders = 0;   // distinct orders up to rotation/reflection
    bool count_capped = false;
    bool exhaustive = true;
};

// Exhaustive branch-and-bound for n <= max_exhaustive, otherwise a
// nearest-neighbour/2-opt proposal that is then verified.
template <Scalar T>
OrderSearch find_circular_order(const Matrix<T>& w, const Tolerance& tol = {}, std::size_t max_exhaustive = 10,
                                std::size_t count_cap = 1000);

class NotKalmansonError : public Error {
public:
    using Error::Error;
};

// Arc splits with weight 1/2 (d(i-1,j) + d(i,j+1) - d(i-1,j+1) - d(i,j)).
// Zero weights are dropped; a negative weight throws NotKalmansonError.
template <Scalar T>
WeightedSplitSystem<T> split_decomposition(const Matrix<T>& w, const CircularOrder& order, const Tolerance& tol = {});

// d(i,j) = sum of weights of splits separating i and j. Rows follow `labels`
// (default: the system's order).
template <Scalar T>
Matrix<T> split_metric(const WeightedSplitSystem<T>& s, std::optional<std::vector<int>> labels = std::nullopt);

// Text format: "order a b c ...", then one line per split
// "<weight> <part labels> | <other labels>".
template <Scalar T>
void write_split_system(std::ostream& out, const WeightedSplitSystem<T>& s);

template <Scalar T>
WeightedSplitSystem<T> read_split_system(std::istream& in);

} // namespace circnet

#endif
