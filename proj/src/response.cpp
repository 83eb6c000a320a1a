#include "circnet/response.hpp"

#include <algorithm>
#include <functional>

namespace circnet {

namespace {

template <Scalar T>
using Ops = ScalarOps<T>;

template <Scalar T>
std::vector<std::vector<std::size_t>> components_without(const Matrix<T>& m, const Tolerance& tol, std::size_t skip)
{
    const std::size_t n = m.size();
    const double scale = m.max_abs();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < n; ++s) {
        if (s == skip || comp[s] >= 0) continue;
        out.emplace_back();
        std::vector<std::size_t> stack{s};
        comp[s] = static_cast<int>(out.size() - 1);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            out.back().push_back(u);
            for (std::size_t v = 0; v < n; ++v) {
                if (v == u || v == skip || comp[v] >= 0) continue;
                if (Ops<T>::sign(m(u, v), scale, tol) != 0) {
                    comp[v] = comp[s];
                    stack.push_back(v);
                }
            }
        }
        std::sort(out.back().begin(), out.back().end());
    }
    return out;
}

template <Scalar T>
std::vector<int> to_labels(const Matrix<T>& m, const std::vector<std::size_t>& idx)
{
    std::vector<int> l;
    for (auto i : idx) l.push_back(m.label(i));
    return l;
}

} // namespace

template <Scalar T>
Matrix<T> symmetrized(const Matrix<T>& m)
{
    Matrix<T> out(m.size(), m.labels());
    const T half = Ops<T>::from_rational(Rational(1, 2));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = (m(i, j) + m(j, i)) * half;
    return out;
}

template <Scalar T>
std::vector<std::vector<int>> clique_components(const Matrix<T>& m, const Tolerance& tol)
{
    std::vector<std::vector<int>> out;
    for (const auto& c : components_without(m, tol, m.size())) out.push_back(to_labels(m, c));
    return out;
}

template <Scalar T>
ValidationReport validate_response(const Matrix<T>& m, const Tolerance& tol)
{
    ValidationReport r;
    const std::size_t n = m.size();
    if (n < 2) {
        r.failures.push_back("size");
        return r;
    }
    const double scale = m.max_abs();
    if (!m.is_symmetric(tol)) {
        r.symmetric = false;
        r.failures.push_back("symmetry");
    } else if constexpr (!Ops<T>::exact) {
        for (std::size_t i = 0; i < n && !r.symmetrized; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (m(i, j) != m(j, i)) {
                    r.symmetrized = true;
                    break;
                }
    }
    for (std::size_t i = 0; i < n && r.sign_pattern; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const int s = Ops<T>::sign(m(i, j), scale, tol);
            if ((i == j && s > 0) || (i != j && s < 0)) {
                r.sign_pattern = false;
                r.failures.push_back("sign pattern");
                break;
            }
        }
    // Row sums zero within n * tol * max|entry| in float mode.
    const double sum_scale = scale * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        T row(0), col(0);
        for (std::size_t j = 0; j < n; ++j) {
            row += m(i, j);
            col += m(j, i);
        }
        if (Ops<T>::sign(row, sum_scale, tol) != 0 || Ops<T>::sign(col, sum_scale, tol) != 0) {
            r.zero_row_sums = false;
            r.failures.push_back("row sums");
            break;
        }
    }
    const auto comps = components_without(m, tol, n);
    if (comps.size() != 1) {
        r.connected = false;
        r.failures.push_back("disconnected");
        return r;
    }
    for (std::size_t v = 0; v < n; ++v) {
        auto c = components_without(m, tol, v);
        if (c.size() > 1) {
            CutPoint cp;
            cp.terminal = m.label(v);
            for (const auto& part : c) cp.components.push_back(to_labels(m, part));
            r.cut_points.push_back(std::move(cp));
        }
    }
    return r;
}

template <Scalar T>
Matrix<T> w_from_m(const Matrix<T>& m, const Tolerance& tol)
{
    const std::size_t n = m.size();
    Matrix<T> x;
    try {
        x = laplacian_pseudoinverse(Matrix<T>(-m), tol);
    } catch (const SingularMatrixError&) {
        throw Error("response matrix is disconnected; resistances are undefined");
    }
    Matrix<T> w(n, m.labels());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) = i == j ? T(0) : T(x(i, i) + x(j, j) - x(i, j) - x(i, j));
    return w;
}

template <Scalar T>
Matrix<T> m_from_w(const Matrix<T>& w, const Tolerance& tol)
{
    const std::size_t n = w.size();
    if (n < 2) throw NotResistanceError("not an electrical resistance metric: need at least 2 terminals");
    const T nn = Ops<T>::from_int(static_cast<long>(n));
    std::vector<T> row(n, T(0));
    T total(0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[i] += w(i, j);
        total += row[i];
    }
    // Symmetric W: (WJ)_ij = row_i, (JW)_ij = col_j = row_j.
    Matrix<T> x(n, w.labels());
    const T half = Ops<T>::from_rational(Rational(1, 2));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = half * (w(i, j) - (row[i] + row[j]) / nn + total / (nn * nn));
    Matrix<T> m;
    try {
        m = laplacian_pseudoinverse(x, tol);
    } catch (const SingularMatrixError&) {
        throw NotResistanceError("not an electrical resistance metric: centred matrix has a larger kernel");
    }
    m.set_labels(w.labels());
    const auto report = validate_response(m, tol);
    if (!report.valid()) {
        std::string why;
        for (const auto& f : report.failures) why += (why.empty() ? "" : ", ") + f;
        throw NotResistanceError("not an electrical resistance metric: M(W) fails " + why);
    }
    return m;
}

template <Scalar T>
Matrix<T> restrict_resistance(const Matrix<T>& w, std::span<const int> subset)
{
    if (subset.empty()) throw Error("restriction to an empty set");
    return w.principal_by_label(subset);
}

template <Scalar T>
ResistanceReport validate_resistance(const Matrix<T>& w, const Tolerance& tol)
{
    ResistanceReport r;
    const std::size_t n = w.size();
    const double scale = w.max_abs();
    if (!w.is_symmetric(tol)) {
        r.symmetric = false;
        r.failures.push_back("symmetry");
    }
    for (std::size_t i = 0; i < n; ++i)
        if (Ops<T>::sign(w(i, i), scale, tol) != 0) {
            r.zero_diagonal = false;
            r.failures.push_back("diagonal");
            break;
        }
    for (std::size_t i = 0; i < n && r.positive_off_diagonal; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && Ops<T>::sign(w(i, j), scale, tol) <= 0) {
                r.positive_off_diagonal = false;
                r.failures.push_back("positivity");
                break;
            }
    for (std::size_t i = 0; i < n && r.triangle; ++i)
        for (std::size_t j = 0; j < n && r.triangle; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (Ops<T>::sign(T(w(i, k) + w(k, j) - w(i, j)), scale, tol) < 0) {
                    r.triangle = false;
                    r.failures.push_back("triangle inequality");
                    break;
                }
    return r;
}

#define CIRCNET_INSTANTIATE(T)                                                                      \
    template ValidationReport validate_response<T>(const Matrix<T>&, const Tolerance&);             \
    template Matrix<T> symmetrized<T>(const Matrix<T>&);                                           \
    template std::vector<std::vector<int>> clique_components<T>(const Matrix<T>&, const Tolerance&); \
    template Matrix<T> w_from_m<T>(const Matrix<T>&, const Tolerance&);                             \
    template Matrix<T> m_from_w<T>(const Matrix<T>&, const Tolerance&);                             \
    template Matrix<T> restrict_resistance<T>(const Matrix<T>&, std::span<const int>);             \
    template ResistanceReport validate_resistance<T>(const Matrix<T>&, const Tolerance&);

CIRCNET_INSTANTIATE(Rational)
CIRCNET_INSTANTIATE(double)

} // namespace circnet
