#ifndef CIRCNET_RESPONSE_HPP
#define CIRCNET_RESPONSE_HPP

#include "circnet/matrix.hpp"

#include <string>
#include <vector>

namespace circnet {

// A terminal whose removal disconnects the clique graph K(N) of a response
// matrix, with the terminal sets of the resulting components.
struct CutPoint {
    int terminal = 0;
    std::vector<std::vector<int>> components;
};

// Structured result of response-matrix validation. Each failed check appends
// its code to `failures`: "size", "symmetry", "sign pattern", "row sums",
// "disconnected".
struct ValidationReport {
    bool symmetric = true;
    bool sign_pattern = true;
    bool zero_row_sums = true;
    bool connected = true;
    bool symmetrized = false; // float mode only: asymmetry within tolerance was averaged away
    std::vector<std::string> failures;
    std::vector<CutPoint> cut_points;

    bool valid() const { return failures.empty(); }
};

template <Scalar T>
ValidationReport validate_response(const Matrix<T>& m, const Tolerance& tol = {});

// (M + M^T)/2, labels kept.
template <Scalar T>
Matrix<T> symmetrized(const Matrix<T>& m);

// Terminal sets of the connected components of the graph with an edge
// wherever an off-diagonal entry is nonzero (within tolerance).
template <Scalar T>
std::vector<std::vector<int>> clique_components(const Matrix<T>& m, const Tolerance& tol = {});

// W = (X+)_D J + J (X+)_D - 2 X+ with X = -M.
template <Scalar T>
Matrix<T> w_from_m(const Matrix<T>& m, const Tolerance& tol = {});

class NotResistanceError : public Error {
public:
    using Error::Error;
};

// M = (1/2 (W - (WJ + JW)/n + trace(WJ)/n^2 J))+. Throws NotResistanceError
// when the result is not a valid connected response matrix.
template <Scalar T>
Matrix<T> m_from_w(const Matrix<T>& w, const Tolerance& tol = {});

// Submatrix on the given labels (in the given order).
template <Scalar T>
Matrix<T> restrict_resistance(const Matrix<T>& w, std::span<const int> subset);

struct ResistanceReport {
    bool symmetric = true;
    bool zero_diagonal = true;
    bool positive_off_diagonal = true;
    bool triangle = true;
    std::vector<std::string> failures;

    bool valid() const { return failures.empty(); }
};

template <Scalar T>
ResistanceReport validate_resistance(const Matrix<T>& w, const Tolerance& tol = {});

} // namespace circnet

#endif
