#include "circnet/matrix.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace circnet {

namespace {

Rational bareiss_determinant(const Matrix<Rational>& m)
{
    const std::size_t n = m.size();
    if (n == 0) return Rational(1);
    std::vector<Integer> a(n * n);
    Integer scale = 1;
    for (std::size_t i = 0; i < n; ++i) {
        Integer row_lcm = 1;
        for (std::size_t j = 0; j < n; ++j) mpz_lcm(row_lcm.get_mpz_t(), row_lcm.get_mpz_t(), m(i, j).get_den_mpz_t());
        scale *= row_lcm;
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j).get_num() * (row_lcm / m(i, j).get_den());
    }
    auto at = [&](std::size_t i, std::size_t j) -> Integer& { return a[i * n + j]; };
    int sign = 1;
    Integer previous = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (at(k, k) == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && at(swap_row, k) == 0) ++swap_row;
            if (swap_row == n) return Rational(0);
            for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(swap_row, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer t = at(i, j) * at(k, k) - at(i, k) * at(k, j);
                mpz_divexact(at(i, j).get_mpz_t(), t.get_mpz_t(), previous.get_mpz_t());
            }
        }
        previous = at(k, k);
    }
    Rational det(at(n - 1, n - 1) * sign, scale);
    det.canonicalize();
    return det;
}

double pivoted_determinant(const Matrix<double>& m)
{
    const std::size_t n = m.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a[i * n + k]) > std::fabs(a[p * n + k])) p = i;
        if (a[p * n + k] == 0.0) return 0.0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
            det = -det;
        }
        const double pivot = a[k * n + k];
        det *= pivot;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / pivot;
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    return det;
}

// Gauss-Jordan on [C | D]; returns C^{-1} D as a row-major k x r array.
template <Scalar T>
std::vector<T> solve_block(std::vector<T> c, std::size_t k, std::vector<T> d, std::size_t r, const Tolerance& tol,
                           double scale)
{
    using Ops = ScalarOps<T>;
    auto C = [&](std::size_t i, std::size_t j) -> T& { return c[i * k + j]; };
    auto D = [&](std::size_t i, std::size_t j) -> T& { return d[i * r + j]; };
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t p = col;
        if constexpr (Ops::exact) {
            while (p < k && C(p, col) == 0) ++p;
            if (p == k) throw SingularMatrixError("singular matrix");
        } else {
            for (std::size_t i = col + 1; i < k; ++i)
                if (std::fabs(C(i, col)) > std::fabs(C(p, col))) p = i;
            if (Ops::sign(C(p, col), scale, tol) == 0) throw SingularMatrixError("singular matrix");
        }
        if (p != col) {
            for (std::size_t j = 0; j < k; ++j) std::swap(C(col, j), C(p, j));
            for (std::size_t j = 0; j < r; ++j) std::swap(D(col, j), D(p, j));
        }
        const T pivot = C(col, col);
        for (std::size_t j = 0; j < k; ++j) C(col, j) /= pivot;
        for (std::size_t j = 0; j < r; ++j) D(col, j) /= pivot;
        for (std::size_t i = 0; i < k; ++i) {
            if (i == col || C(i, col) == 0) continue;
            const T f = C(i, col);
            for (std::size_t j = 0; j < k; ++j) C(i, j) -= f * C(col, j);
            for (std::size_t j = 0; j < r; ++j) D(i, j) -= f * D(col, j);
        }
    }
    return d;
}

std::string label_list(const std::vector<int>& labels)
{
    std::string s = "{";
    for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? "," : "") + std::to_string(labels[i]);
    return s + "}";
}

} // namespace

template <Scalar T>
T determinant(const Matrix<T>& m)
{
    if constexpr (ScalarOps<T>::exact)
        return bareiss_determinant(m);
    else
        return pivoted_determinant(m);
}

template <Scalar T>
Matrix<T> inverse(const Matrix<T>& m, const Tolerance& tol)
{
    const std::size_t n = m.size();
    std::vector<T> c(n * n), d(n * n, T(0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) c[i * n + j] = m(i, j);
        d[i * n + i] = T(1);
    }
    auto x = solve_block<T>(std::move(c), n, std::move(d), n, tol, m.max_abs());
    Matrix<T> out(n, m.labels());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = x[i * n + j];
    return out;
}

template <Scalar T>
Matrix<T> schur_complement(const Matrix<T>& m, std::span<const std::size_t> keep, const Tolerance& tol)
{
    const std::size_t n = m.size();
    std::vector<bool> kept(n, false);
    for (std::size_t k : keep) {
        if (k >= n || kept[k]) throw Error("invalid or repeated index in Schur complement");
        kept[k] = true;
    }
    std::vector<std::size_t> drop;
    for (std::size_t i = 0; i < n; ++i)
        if (!kept[i]) drop.push_back(i);
    Matrix<T> a = m.principal(keep);
    if (drop.empty()) return a;

    const std::size_t kd = drop.size(), kk = keep.size();
    std::vector<T> c(kd * kd), d(kd * kk);
    for (std::size_t i = 0; i < kd; ++i) {
        for (std::size_t j = 0; j < kd; ++j) c[i * kd + j] = m(drop[i], drop[j]);
        for (std::size_t j = 0; j < kk; ++j) d[i * kk + j] = m(drop[i], keep[j]);
    }
    std::vector<T> x;
    try {
        x = solve_block<T>(std::move(c), kd, std::move(d), kk, tol, m.max_abs());
    } catch (const SingularMatrixError&) {
        std::vector<int> dropped;
        for (std::size_t i : drop) dropped.push_back(m.label(i));
        throw SingularMatrixError("Schur complement: block on dropped nodes " + label_list(dropped) +
                                  " is singular (disconnected interior component)");
    }
    for (std::size_t i = 0; i < kk; ++i)
        for (std::size_t j = 0; j < kk; ++j) {
            T acc(0);
            for (std::size_t t = 0; t < kd; ++t) acc += m(keep[i], drop[t]) * x[t * kk + j];
            a(i, j) -= acc;
        }
    return a;
}

template <Scalar T>
Matrix<T> schur_complement_by_label(const Matrix<T>& m, std::span<const int> keep, const Tolerance& tol)
{
    std::vector<std::size_t> idx;
    for (int l : keep) idx.push_back(m.index_of(l));
    return schur_complement(m, idx, tol);
}

template <Scalar T>
Matrix<T> laplacian_pseudoinverse(const Matrix<T>& x, const Tolerance& tol)
{
    const std::size_t n = x.size();
    if (n == 0) return x;
    const T shift = T(1) / ScalarOps<T>::from_int(static_cast<long>(n));
    Matrix<T> shifted = x;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) shifted(i, j) += shift;
    Matrix<T> inv;
    try {
        inv = inverse(shifted, tol);
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError("pseudoinverse: kernel is larger than span{1} (network is disconnected)");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) -= shift;
    inv.set_labels(x.labels());
    return inv;
}

template <Scalar T>
Matrix<T> read_matrix(std::istream& in)
{
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw ParseError("matrix: missing size line");
    std::size_t n = 0;
    try {
        n = std::stoul(lines[0]);
    } catch (const std::exception&) {
        throw ParseError("matrix: first line must be the dimension, got '" + lines[0] + "'");
    }
    std::size_t row_start = 1;
    std::vector<int> labels;
    if (lines.size() > 1 && lines[1].rfind("labels", 0) == 0) {
        std::istringstream ls(lines[1].substr(6));
        int l;
        while (ls >> l) labels.push_back(l);
        if (labels.size() != n) throw ParseError("matrix: label line must list exactly n labels");
        row_start = 2;
    }
    if (lines.size() - row_start != n) throw ParseError("matrix: expected " + std::to_string(n) + " rows");
    Matrix<T> m(n);
    if (!labels.empty()) m.set_labels(labels);
    for (std::size_t i = 0; i < n; ++i) {
        std::istringstream rs(lines[row_start + i]);
        std::string tok;
        std::size_t j = 0;
        while (rs >> tok) {
            if (j >= n) throw ParseError("matrix: row " + std::to_string(i + 1) + " has too many entries");
            m(i, j++) = ScalarOps<T>::parse(tok);
        }
        if (j != n) throw ParseError("matrix: row " + std::to_string(i + 1) + " has too few entries");
    }
    return m;
}

template <Scalar T>
Matrix<T> read_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_matrix<T>(in);
}

template <Scalar T>
void write_matrix(std::ostream& out, const Matrix<T>& m, bool with_labels)
{
    out << m.size() << '\n';
    if (with_labels) {
        out << "labels";
        for (int l : m.labels()) out << ' ' << l;
        out << '\n';
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) out << (j ? " " : "") << ScalarOps<T>::format(m(i, j));
        out << '\n';
    }
}

template <Scalar T>
std::string to_string(const Matrix<T>& m)
{
    std::ostringstream os;
    write_matrix(os, m);
    return os.str();
}

#define CIRCNET_INSTANTIATE(T)                                                                        \
    template T determinant<T>(const Matrix<T>&);                                                      \
    template Matrix<T> inverse<T>(const Matrix<T>&, const Tolerance&);                                \
    template Matrix<T> schur_complement<T>(const Matrix<T>&, std::span<const std::size_t>, const Tolerance&); \
    template Matrix<T> schur_complement_by_label<T>(const Matrix<T>&, std::span<const int>, const Tolerance&); \
    template Matrix<T> laplacian_pseudoinverse<T>(const Matrix<T>&, const Tolerance&);                \
    template Matrix<T> read_matrix<T>(std::istream&);                                                 \
    template Matrix<T> read_matrix_file<T>(const std::string&);                                       \
    template void write_matrix<T>(std::ostream&, const Matrix<T>&, bool);                             \
    template std::string to_string<T>(const Matrix<T>&);

CIRCNET_INSTANTIATE(Rational)
CIRCNET_INSTANTIATE(double)

} // namespace circnet
