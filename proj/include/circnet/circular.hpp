#ifndef CIRCNET_CIRCULAR_HPP
#define CIRCNET_CIRCULAR_HPP

#include "circnet/matrix.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace circnet {

// Cyclic sequence of terminal labels. Two orders describe the same circle
// when related by rotation or reflection (see equivalent()).
class CircularOrder {
public:
    CircularOrder() = default;
    explicit CircularOrder(std::vector<int> labels);

    static CircularOrder counting(std::size_t n);

    std::size_t size() const { return labels_.size(); }
    const std::vector<int>& labels() const { return labels_; }
    // Label at a position, taken mod n (negative positions allowed).
    int at(long pos) const;
    std::size_t position(int label) const;
    bool contains(int label) const;

    // Starts at the smallest label and runs in the direction whose second
    // element is smaller.
    CircularOrder canonical() const;
    bool equivalent(const CircularOrder& other) const;

    std::string to_string() const;

    friend bool operator==(const CircularOrder& a, const CircularOrder& b) { return a.labels_ == b.labels_; }

private:
    std::vector<int> labels_;
};

struct CircularPair {
    std::vector<int> p;
    std::vector<int> q;

    std::size_t size() const { return p.size(); }
    // "(1,3;5,4)"
    std::string to_string() const;

    friend bool operator==(const CircularPair&, const CircularPair&) = default;
    friend auto operator<=>(const CircularPair&, const CircularPair&) = default;
};

// p1..pk followed by qk..q1 must visit the circle in order without wrapping
// past p1.
bool is_circular_pair(std::span<const int> p, std::span<const int> q, const CircularOrder& order);
inline bool is_circular_pair(const CircularPair& pair, const CircularOrder& order)
{
    return is_circular_pair(pair.p, pair.q, order);
}

// Every circular pair of size 1..max_k exactly once, sizes ascending. Within a
// size: 2k-subsets of positions in lexicographic order, then each rotation of
// the subset's cyclic sequence.
std::vector<CircularPair> enumerate_circular_pairs(const CircularOrder& order, std::size_t max_k);

// Number of pairs enumerate_circular_pairs would return.
std::size_t count_circular_pairs(std::size_t n, std::size_t max_k);

// Determinant of rows P (in P order) and columns Q (in Q order), looked up by label.
template <Scalar T>
T circular_minor(const Matrix<T>& m, const CircularPair& pair);

// Magnitude against which a float minor is compared: k * prod over P rows of
// the row max-abs. Returns 0 for exact scalars (unused).
template <Scalar T>
double minor_scale(const Matrix<T>& m, const CircularPair& pair);

template <Scalar T>
int minor_sign(const Matrix<T>& m, const CircularPair& pair, const Tolerance& tol = {});

template <Scalar T>
struct PlanarityVerdict {
    bool planar = true;
    std::optional<CircularPair> witness;   // first negative minor of smallest size
    std::optional<T> witness_value;
    std::size_t minors_checked = 0;
    std::size_t negative_count = 0;        // only meaningful with full_scan
};

class SizeGuardError : public Error {
public:
    using Error::Error;
};

// All circular minors >= 0 (float: >= -threshold). Stops at the first
// negative minor unless full_scan is set.
template <Scalar T>
PlanarityVerdict<T> is_circular_planar(const Matrix<T>& m, const CircularOrder& order, const Tolerance& tol = {},
                                       std::size_t max_n = 12, bool full_scan = false);

// Permute rows and columns of m to follow order (labels looked up in m).
template <Scalar T>
Matrix<T> reorder(const Matrix<T>& m, const CircularOrder& order);

} // namespace circnet

#endif
