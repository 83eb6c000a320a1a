#include "circnet/kalmanson.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace circnet {

template <Scalar T>
std::vector<int> WeightedSplitSystem<T>::complement(const WeightedSplit<T>& s) const
{
    std::vector<int> rest;
    for (int l : order.labels())
        if (!std::binary_search(s.part.begin(), s.part.end(), l)) rest.push_back(l);
    std::sort(rest.begin(), rest.end());
    return rest;
}

template <Scalar T>
std::optional<std::size_t> WeightedSplitSystem<T>::find(std::vector<int> side) const
{
    const auto key = canonical_part(side, order);
    for (std::size_t i = 0; i < splits.size(); ++i)
        if (splits[i].part == key) return i;
    return std::nullopt;
}

std::vector<int> canonical_part(const std::vector<int>& side, const CircularOrder& order)
{
    const int smallest = *std::min_element(order.labels().begin(), order.labels().end());
    std::vector<int> s = side;
    std::sort(s.begin(), s.end());
    if (!std::binary_search(s.begin(), s.end(), smallest)) return s;
    std::vector<int> rest;
    for (int l : order.labels())
        if (!std::binary_search(s.begin(), s.end(), l)) rest.push_back(l);
    std::sort(rest.begin(), rest.end());
    return rest;
}

bool is_arc(const std::vector<int>& part, const CircularOrder& order)
{
    const std::size_t n = order.size();
    if (part.empty() || part.size() >= n) return part.size() == n;
    std::vector<bool> in(n, false);
    for (int l : part) in[order.position(l)] = true;
    std::size_t starts = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (in[i] && !in[(i + n - 1) % n]) ++starts;
    return starts == 1;
}

std::string split_to_string(const std::vector<int>& part, const CircularOrder& order)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < part.size(); ++i) out << (i ? "," : "") << part[i];
    out << " |";
    bool first = true;
    std::vector<int> rest;
    for (int l : order.labels())
        if (std::find(part.begin(), part.end(), l) == part.end()) rest.push_back(l);
    std::sort(rest.begin(), rest.end());
    for (int l : rest) {
        out << (first ? " " : ",") << l;
        first = false;
    }
    return out.str();
}

namespace {

// Both quadruple inequalities for positions i<j<k<l (indices into w).
template <Scalar T>
bool quadruple_ok(const Matrix<T>& w, std::size_t i, std::size_t j, std::size_t k, std::size_t l, double scale,
                  const Tolerance& tol)
{
    const T diag = w(i, k) + w(j, l);
    const T first = diag - w(i, j) - w(k, l);
    const T second = diag - w(j, k) - w(i, l);
    return ScalarOps<T>::sign(first, scale, tol) >= 0 && ScalarOps<T>::sign(second, scale, tol) >= 0;
}

template <Scalar T>
struct OrderDfs {
    const Matrix<T>& w;
    const Tolerance& tol;
    double scale;
    std::size_t n;
    std::size_t cap;
    std::vector<std::size_t> seq;
    std::vector<bool> used;
    std::size_t count = 0;
    bool capped = false;
    std::optional<std::vector<int>> first;

    bool fits(std::size_t d) const
    {
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a + 1; b < d; ++b)
                for (std::size_t c = b + 1; c < d; ++c)
                    if (!quadruple_ok(w, seq[a], seq[b], seq[c], seq[d], scale, tol)) return false;
        return true;
    }

    void run(std::size_t d)
    {
        if (capped) return;
        if (d == n) {
            if (n > 2 && w.label(seq[1]) > w.label(seq[n - 1])) return; // mirror image already counted
            if (!first) {
                std::vector<int> l;
                for (auto s : seq) l.push_back(w.label(s));
                first = l;
            }
            if (++count >= cap) capped = true;
            return;
        }
        for (std::size_t c : candidates) {
            if (used[c]) continue;
            seq[d] = c;
            if (!fits(d)) continue;
            used[c] = true;
            run(d + 1);
            used[c] = false;
            if (capped) return;
        }
    }

    std::vector<std::size_t> candidates; // indices sorted by label
};

template <Scalar T>
double tour_length(const Matrix<T>& w, const std::vector<std::size_t>& t)
{
    double s = 0;
    for (std::size_t i = 0; i < t.size(); ++i) s += ScalarOps<T>::to_double(w(t[i], t[(i + 1) % t.size()]));
    return s;
}

} // namespace

template <Scalar T>
KalmansonVerdict is_kalmanson(const Matrix<T>& w, const CircularOrder& order, const Tolerance& tol)
{
    KalmansonVerdict v;
    const std::size_t n = order.size();
    std::vector<std::size_t> idx;
    for (int l : order.labels()) idx.push_back(w.index_of(l));
    const double scale = w.max_abs();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d)
                    if (!quadruple_ok(w, idx[a], idx[b], idx[c], idx[d], scale, tol)) {
                        v.kalmanson = false;
                        v.witness = std::array<int, 4>{order.labels()[a], order.labels()[b], order.labels()[c],
                                                       order.labels()[d]};
                        return v;
                    }
    return v;
}

template <Scalar T>
OrderSearch find_circular_order(const Matrix<T>& w, const Tolerance& tol, std::size_t max_exhaustive,
                                std::size_t count_cap)
{
    OrderSearch out;
    const std::size_t n = w.size();
    std::vector<std::size_t> by_label(n);
    for (std::size_t i = 0; i < n; ++i) by_label[i] = i;
    std::sort(by_label.begin(), by_label.end(), [&](auto a, auto b) { return w.label(a) < w.label(b); });

    if (n <= 3) {
        std::vector<int> l;
        for (auto i : by_label) l.push_back(w.label(i));
        out.status = OrderStatus::found;
        out.order = CircularOrder(l);
        out.consistent_orders = n == 0 ? 0 : 1;
        return out;
    }

    if (n <= max_exhaustive) {
        OrderDfs<T> dfs{w, tol, w.max_abs(), n, std::max<std::size_t>(count_cap, 1), std::vector<std::size_t>(n),
                        std::vector<bool>(n, false), 0, false, std::nullopt, by_label};
        dfs.seq[0] = by_label[0];
        dfs.used[by_label[0]] = true;
        dfs.run(1);
        out.consistent_orders = dfs.count;
        out.count_capped = dfs.capped;
        if (dfs.first) {
            out.status = OrderStatus::found;
            out.order = CircularOrder(*dfs.first).canonical();
        }
        return out;
    }

    // Kalmanson matrices are "master tour" instances: a consistent order is an
    // optimal travelling-salesman tour, so try short tours and verify them.
    out.exhaustive = false;
    out.status = OrderStatus::undetermined;
    std::set<std::vector<int>> tried;
    for (std::size_t start = 0; start < n; ++start) {
        std::vector<std::size_t> tour{start};
        std::vector<bool> in(n, false);
        in[start] = true;
        while (tour.size() < n) {
            const auto last = tour.back();
            std::size_t best = n;
            for (std::size_t c = 0; c < n; ++c)
                if (!in[c] && (best == n || w(last, c) < w(last, best))) best = c;
            tour.push_back(best);
            in[best] = true;
        }
        for (bool improved = true; improved;) {
            improved = false;
            const double base = tour_length(w, tour);
            for (std::size_t i = 1; i + 1 < n && !improved; ++i)
                for (std::size_t j = i + 1; j < n && !improved; ++j) {
                    auto t2 = tour;
                    std::reverse(t2.begin() + static_cast<long>(i), t2.begin() + static_cast<long>(j) + 1);
                    if (tour_length(w, t2) < base - 1e-12 * std::max(1.0, base)) {
                        tour = t2;
                        improved = true;
                    }
                }
        }
        std::vector<int> l;
        for (auto t : tour) l.push_back(w.label(t));
        CircularOrder cand = CircularOrder(l).canonical();
        if (!tried.insert(cand.labels()).second) continue;
        if (is_kalmanson(w, cand, tol).kalmanson) {
            out.status = OrderStatus::found;
            out.order = cand;
            out.consistent_orders = 1;
            out.count_capped = true;
            return out;
        }
    }
    return out;
}

template <Scalar T>
WeightedSplitSystem<T> split_decomposition(const Matrix<T>& w, const CircularOrder& order, const Tolerance& tol)
{
    const std::size_t n = order.size();
    if (w.size() != n) throw Error("split decomposition: order and matrix sizes differ");
    std::vector<std::size_t> idx;
    for (int l : order.labels()) idx.push_back(w.index_of(l));
    auto d = [&](long a, long b) -> T {
        const long nn = static_cast<long>(n);
        const auto x = static_cast<std::size_t>(((a % nn) + nn) % nn), y = static_cast<std::size_t>(((b % nn) + nn) % nn);
        return x == y ? T(0) : w(idx[x], idx[y]);
    };
    const double scale = w.max_abs();
    const T half = ScalarOps<T>::from_rational(Rational(1, 2));
    const long p0 = static_cast<long>(order.position(*std::min_element(order.labels().begin(), order.labels().end())));

    WeightedSplitSystem<T> s;
    s.order = order;
    for (long a = 1; a < static_cast<long>(n); ++a)
        for (long b = a; b < static_cast<long>(n); ++b) {
            const long i = p0 + a, j = p0 + b;
            T weight = half * (d(i - 1, j) + d(i, j + 1) - d(i - 1, j + 1) - d(i, j));
            const int sg = ScalarOps<T>::sign(weight, scale, tol);
            if (sg < 0) {
                std::vector<int> part;
                for (long k = i; k <= j; ++k) part.push_back(order.at(k));
                throw NotKalmansonError("not Kalmanson for this order: split " +
                                        split_to_string(canonical_part(part, order), order) + " has weight " +
                                        ScalarOps<T>::format(weight));
            }
            if (sg == 0) continue;
            std::vector<int> part;
            for (long k = i; k <= j; ++k) part.push_back(order.at(k));
            std::sort(part.begin(), part.end());
            s.splits.push_back(WeightedSplit<T>{part, weight});
        }
    return s;
}

template <Scalar T>
Matrix<T> split_metric(const WeightedSplitSystem<T>& s, std::optional<std::vector<int>> labels)
{
    const std::vector<int> l = labels ? *labels : s.order.labels();
    Matrix<T> d(l.size(), l);
    for (const auto& sp : s.splits) {
        std::vector<bool> in(l.size());
        for (std::size_t i = 0; i < l.size(); ++i) in[i] = std::binary_search(sp.part.begin(), sp.part.end(), l[i]);
        for (std::size_t i = 0; i < l.size(); ++i)
            for (std::size_t j = 0; j < l.size(); ++j)
                if (in[i] != in[j]) d(i, j) += sp.weight;
    }
    return d;
}

template <Scalar T>
void write_split_system(std::ostream& out, const WeightedSplitSystem<T>& s)
{
    out << "order " << s.order.to_string() << '\n';
    for (const auto& sp : s.splits) {
        out << ScalarOps<T>::format(sp.weight) << ' ';
        for (std::size_t i = 0; i < sp.part.size(); ++i) out << (i ? " " : "") << sp.part[i];
        out << " |";
        for (int l : s.complement(sp)) out << ' ' << l;
        out << '\n';
    }
}

template <Scalar T>
WeightedSplitSystem<T> read_split_system(std::istream& in)
{
    WeightedSplitSystem<T> s;
    std::string line;
    bool have_order = false;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "order") {
            std::vector<int> l;
            int x;
            while (ls >> x) l.push_back(x);
            s.order = CircularOrder(l);
            have_order = true;
            continue;
        }
        if (!have_order) throw ParseError("split system: the order line must come first");
        WeightedSplit<T> sp;
        sp.weight = ScalarOps<T>::parse(first);
        std::string tok;
        std::vector<int> side;
        while (ls >> tok && tok != "|") side.push_back(std::stoi(tok));
        if (side.empty() || side.size() >= s.order.size()) throw ParseError("split system: bad split line '" + line + "'");
        for (int l : side)
            if (!s.order.contains(l)) throw ParseError("split system: unknown label " + std::to_string(l));
        sp.part = canonical_part(side, s.order);
        if (!is_arc(sp.part, s.order)) throw ParseError("split system: split is not an arc of the order");
        if (s.find(sp.part)) throw ParseError("split system: duplicate split");
        s.splits.push_back(std::move(sp));
    }
    if (!have_order) throw ParseError("split system: missing order line");
    return s;
}

#define CIRCNET_INSTANTIATE(T)                                                                                      \
    template struct WeightedSplitSystem<T>;                                                                         \
    template KalmansonVerdict is_kalmanson<T>(const Matrix<T>&, const CircularOrder&, const Tolerance&);            \
    template OrderSearch find_circular_order<T>(const Matrix<T>&, const Tolerance&, std::size_t, std::size_t);      \
    template WeightedSplitSystem<T> split_decomposition<T>(const Matrix<T>&, const CircularOrder&, const Tolerance&); \
    template Matrix<T> split_metric<T>(const WeightedSplitSystem<T>&, std::optional<std::vector<int>>);             \
    template void write_split_system<T>(std::ostream&, const WeightedSplitSystem<T>&);                              \
    template WeightedSplitSystem<T> read_split_system<T>(std::istream&);

CIRCNET_INSTANTIATE(Rational)
CIRCNET_INSTANTIATE(double)

} // namespace circnet
