#ifndef CIRCNET_MATRIX_HPP
#define CIRCNET_MATRIX_HPP

#include "circnet/scalar.hpp"

#include <cstddef>
#include <iosfwd>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace circnet {

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// Dense square matrix whose rows and columns share one list of labels
// (terminal or node identifiers). Labels default to 1..n.
template <Scalar T>
class Matrix {
public:
    Matrix() = default;

    explicit Matrix(std::size_t n) : n_(n), data_(n * n, T(0)), labels_(n)
    {
        std::iota(labels_.begin(), labels_.end(), 1);
    }

    Matrix(std::size_t n, std::vector<int> labels) : n_(n), data_(n * n, T(0)), labels_(std::move(labels))
    {
        if (labels_.size() != n) throw Error("label count does not match matrix size");
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    static Matrix from_rows(const std::vector<std::vector<T>>& rows)
    {
        Matrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw Error("matrix rows must be square");
            for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    const std::vector<int>& labels() const { return labels_; }
    int label(std::size_t i) const { return labels_[i]; }
    void set_labels(std::vector<int> labels)
    {
        if (labels.size() != n_) throw Error("label count does not match matrix size");
        labels_ = std::move(labels);
    }

    // Position of a label; throws if absent.
    std::size_t index_of(int label) const
    {
        for (std::size_t i = 0; i < n_; ++i)
            if (labels_[i] == label) return i;
        throw Error("label " + std::to_string(label) + " not present in matrix");
    }

    bool has_label(int label) const
    {
        for (int l : labels_)
            if (l == label) return true;
        return false;
    }

    // Principal submatrix on the given positions, labels carried along.
    Matrix principal(std::span<const std::size_t> keep) const
    {
        std::vector<int> labels;
        labels.reserve(keep.size());
        for (std::size_t k : keep) labels.push_back(labels_.at(k));
        Matrix out(keep.size(), std::move(labels));
        for (std::size_t i = 0; i < keep.size(); ++i)
            for (std::size_t j = 0; j < keep.size(); ++j) out(i, j) = (*this)(keep[i], keep[j]);
        return out;
    }

    // Principal submatrix selected by label, in the order given.
    Matrix principal_by_label(std::span<const int> keep) const
    {
        std::vector<std::size_t> idx;
        idx.reserve(keep.size());
        for (int l : keep) idx.push_back(index_of(l));
        return principal(idx);
    }

    // Square block with rows and columns picked independently; labels reset to 1..k.
    Matrix block(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const
    {
        if (rows.size() != cols.size()) throw Error("block must be square");
        Matrix out(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = (*this)(rows[i], cols[j]);
        return out;
    }

    Matrix transpose() const
    {
        Matrix out(n_, labels_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    Matrix& operator+=(const Matrix& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(const T& s)
    {
        for (auto& v : data_) v *= s;
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
    friend Matrix operator-(Matrix a)
    {
        for (auto& v : a.data_) v = -v;
        return a;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        a.check_same(b);
        Matrix out(a.n_, a.labels_);
        for (std::size_t i = 0; i < a.n_; ++i)
            for (std::size_t k = 0; k < a.n_; ++k) {
                const T& aik = a(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < a.n_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    // Entrywise equality; labels are not compared.
    friend bool operator==(const Matrix& a, const Matrix& b) { return a.n_ == b.n_ && a.data_ == b.data_; }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, ScalarOps<T>::to_double(ScalarOps<T>::abs(v)));
        return m;
    }

    double row_max_abs(std::size_t i) const
    {
        double m = 0.0;
        for (std::size_t j = 0; j < n_; ++j) m = std::max(m, ScalarOps<T>::to_double(ScalarOps<T>::abs((*this)(i, j))));
        return m;
    }

    bool is_symmetric(const Tolerance& tol = {}) const
    {
        const double scale = max_abs();
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (!ScalarOps<T>::equal((*this)(i, j), (*this)(j, i), scale, tol)) return false;
        return true;
    }

    template <Scalar U>
    Matrix<U> convert() const
    {
        Matrix<U> out(n_, labels_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                out(i, j) = ScalarOps<U>::from_rational(ScalarOps<T>::to_rational((*this)(i, j)));
        return out;
    }

private:
    void check_same(const Matrix& o) const
    {
        if (o.n_ != n_) throw Error("matrix size mismatch");
    }

    std::size_t n_ = 0;
    std::vector<T> data_;
    std::vector<int> labels_;
};

// Exact in rational mode (row denominators cleared, then fraction-free
// Bareiss elimination over the integers); partial pivoting in float mode.
template <Scalar T>
T determinant(const Matrix<T>& m);

// Throws SingularMatrixError when the matrix is singular (float mode: pivot
// below tol relative to the largest entry).
template <Scalar T>
Matrix<T> inverse(const Matrix<T>& m, const Tolerance& tol = {});

// A - B C^{-1} B^T where A is the block on `keep` and C the block on the
// remaining positions. Labels of the kept rows are preserved.
template <Scalar T>
Matrix<T> schur_complement(const Matrix<T>& m, std::span<const std::size_t> keep, const Tolerance& tol = {});

template <Scalar T>
Matrix<T> schur_complement_by_label(const Matrix<T>& m, std::span<const int> keep, const Tolerance& tol = {});

// Moore-Penrose pseudoinverse of a PSD matrix whose kernel is span{1},
// computed as (X + J/n)^{-1} - J/n. Throws SingularMatrixError if the kernel is larger.
template <Scalar T>
Matrix<T> laplacian_pseudoinverse(const Matrix<T>& x, const Tolerance& tol = {});

// Text format: first line n, then n rows of entries (p/q or decimals).
// Lines starting with '#' are ignored. An optional line "labels a b c ..."
// directly after n assigns row labels.
template <Scalar T>
Matrix<T> read_matrix(std::istream& in);

template <Scalar T>
Matrix<T> read_matrix_file(const std::string& path);

template <Scalar T>
void write_matrix(std::ostream& out, const Matrix<T>& m, bool with_labels = false);

template <Scalar T>
std::string to_string(const Matrix<T>& m);

} // namespace circnet

#endif
