#include "circnet/circular.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace circnet {

CircularOrder::CircularOrder(std::vector<int> labels) : labels_(std::move(labels))
{
    std::set<int> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw Error("circular order has repeated labels");
}

CircularOrder CircularOrder::counting(std::size_t n)
{
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<int>(i + 1);
    return CircularOrder(std::move(l));
}

int CircularOrder::at(long pos) const
{
    const long n = static_cast<long>(labels_.size());
    return labels_[static_cast<std::size_t>(((pos % n) + n) % n)];
}

std::size_t CircularOrder::position(int label) const
{
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw Error("label " + std::to_string(label) + " not in circular order");
    return static_cast<std::size_t>(it - labels_.begin());
}

bool CircularOrder::contains(int label) const
{
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

CircularOrder CircularOrder::canonical() const
{
    const std::size_t n = labels_.size();
    if (n <= 2) {
        std::vector<int> l = labels_;
        std::sort(l.begin(), l.end());
        return CircularOrder(l);
    }
    const long start = static_cast<long>(std::min_element(labels_.begin(), labels_.end()) - labels_.begin());
    std::vector<int> fwd, bwd;
    for (long k = 0; k < static_cast<long>(n); ++k) {
        fwd.push_back(at(start + k));
        bwd.push_back(at(start - k));
    }
    return CircularOrder(fwd[1] <= bwd[1] ? fwd : bwd);
}

bool CircularOrder::equivalent(const CircularOrder& other) const
{
    if (size() != other.size()) return false;
    return canonical().labels_ == other.canonical().labels_;
}

std::string CircularOrder::to_string() const
{
    std::ostringstream out;
    for (std::size_t i = 0; i < labels_.size(); ++i) out << (i ? " " : "") << labels_[i];
    return out.str();
}

std::string CircularPair::to_string() const
{
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i];
    out << ';';
    for (std::size_t i = 0; i < q.size(); ++i) out << (i ? "," : "") << q[i];
    out << ')';
    return out.str();
}

bool is_circular_pair(std::span<const int> p, std::span<const int> q, const CircularOrder& order)
{
    if (p.empty() || p.size() != q.size()) return false;
    const std::size_t n = order.size();
    std::vector<int> seq(p.begin(), p.end());
    seq.insert(seq.end(), q.rbegin(), q.rend());
    for (int l : seq)
        if (!order.contains(l)) return false;
    const std::size_t base = order.position(seq.front());
    std::size_t prev = 0;
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const std::size_t off = (order.position(seq[i]) + n - base) % n;
        if (off <= prev) return false; // repeats and wrap-around both land here
        prev = off;
    }
    return true;
}

namespace {

// Next k-combination of {0..n-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& c, std::size_t n)
{
    const std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

Integer binomial(std::size_t n, std::size_t k)
{
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

} // namespace

std::size_t count_circular_pairs(std::size_t n, std::size_t max_k)
{
    Integer total = 0;
    for (std::size_t k = 1; k <= max_k && 2 * k <= n; ++k) total += binomial(n, 2 * k) * static_cast<unsigned long>(2 * k);
    return total.get_ui();
}

std::vector<CircularPair> enumerate_circular_pairs(const CircularOrder& order, std::size_t max_k)
{
    const std::size_t n = order.size();
    std::vector<CircularPair> out;
    for (std::size_t k = 1; k <= max_k && 2 * k <= n; ++k) {
        std::vector<std::size_t> comb(2 * k);
        for (std::size_t i = 0; i < comb.size(); ++i) comb[i] = i;
        do {
            for (std::size_t r = 0; r < 2 * k; ++r) {
                CircularPair pair;
                for (std::size_t i = 0; i < k; ++i) pair.p.push_back(order.labels()[comb[(r + i) % (2 * k)]]);
                for (std::size_t i = 2 * k; i-- > k;) pair.q.push_back(order.labels()[comb[(r + i) % (2 * k)]]);
                out.push_back(std::move(pair));
            }
        } while (next_combination(comb, n));
    }
    return out;
}

template <Scalar T>
T circular_minor(const Matrix<T>& m, const CircularPair& pair)
{
    std::vector<std::size_t> rows, cols;
    for (int l : pair.p) rows.push_back(m.index_of(l));
    for (int l : pair.q) cols.push_back(m.index_of(l));
    return determinant(m.block(rows, cols));
}

template <Scalar T>
double minor_scale(const Matrix<T>& m, const CircularPair& pair)
{
    if constexpr (ScalarOps<T>::exact) {
        return 0.0;
    } else {
        double s = static_cast<double>(pair.size());
        for (int l : pair.p) s *= m.row_max_abs(m.index_of(l));
        return s;
    }
}

template <Scalar T>
int minor_sign(const Matrix<T>& m, const CircularPair& pair, const Tolerance& tol)
{
    return ScalarOps<T>::sign(circular_minor(m, pair), minor_scale(m, pair), tol);
}

template <Scalar T>
PlanarityVerdict<T> is_circular_planar(const Matrix<T>& m, const CircularOrder& order, const Tolerance& tol,
                                       std::size_t max_n, bool full_scan)
{
    const std::size_t n = order.size();
    if (n > max_n)
        throw SizeGuardError("planarity check on " + std::to_string(n) + " terminals exceeds the bound of " +
                             std::to_string(max_n) + " (" + std::to_string(count_circular_pairs(n, n / 2)) +
                             " circular minors)");
    PlanarityVerdict<T> verdict;
    for (const auto& pair : enumerate_circular_pairs(order, n / 2)) {
        ++verdict.minors_checked;
        T value = circular_minor(m, pair);
        if (ScalarOps<T>::sign(value, minor_scale(m, pair), tol) < 0) {
            ++verdict.negative_count;
            if (verdict.planar) {
                verdict.planar = false;
                verdict.witness = pair;
                verdict.witness_value = value;
            }
            if (!full_scan) break;
        }
    }
    return verdict;
}

template <Scalar T>
Matrix<T> reorder(const Matrix<T>& m, const CircularOrder& order)
{
    if (order.size() != m.size()) throw Error("order size does not match matrix size");
    return m.principal_by_label(order.labels());
}

#define CIRCNET_INSTANTIATE(T)                                                                             \
    template T circular_minor<T>(const Matrix<T>&, const CircularPair&);                                    \
    template double minor_scale<T>(const Matrix<T>&, const CircularPair&);                                  \
    template int minor_sign<T>(const Matrix<T>&, const CircularPair&, const Tolerance&);                     \
    template PlanarityVerdict<T> is_circular_planar<T>(const Matrix<T>&, const CircularOrder&,              \
                                                       const Tolerance&, std::size_t, bool);                \
    template Matrix<T> reorder<T>(const Matrix<T>&, const CircularOrder&);

CIRCNET_INSTANTIATE(Rational)
CIRCNET_INSTANTIATE(double)

} // namespace circnet
