#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ssklab {

// Square dense matrix, row-major.
template <class T>
class DenseMatrix {
public:
    using value_type = T;

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, T{}) {}

    std::size_t size() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<T>& data() const { return a_; }

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<T> a_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<std::complex<double>>;

// Real symmetric tridiagonal matrix: diagonal d (n), off-diagonal e (n-1).
struct Tridiagonal {
    std::vector<double> d;
    std::vector<double> e;
};

// Householder reduction A = Q T Q^* of a symmetric/Hermitian matrix to a real
// tridiagonal T. Reflectors are kept so eigenvectors of T can be mapped back.
template <class T>
struct HouseholderReduction {
    Tridiagonal tri;
    std::vector<std::vector<T>> reflectors;  // reflector k acts on rows k+1..n-1
    std::vector<double> taus;
    std::vector<T> phases;                   // diagonal unitary making T real
};

template <class T>
HouseholderReduction<T> householder_tridiagonalize(const DenseMatrix<T>& a);

// All eigenvalues of a symmetric tridiagonal matrix by implicit QL with
// Wilkinson-type shifts, sorted descending.
std::vector<double> tridiagonal_eigenvalues(Tridiagonal t);

// Unit eigenvector of T for a computed eigenvalue, by inverse iteration.
std::vector<double> tridiagonal_eigenvector(const Tridiagonal& t, double lambda);

template <class T>
std::vector<T> back_transform(const HouseholderReduction<T>& h, const std::vector<double>& y);

// max |A_ij - conj(A_ji)|.
template <class T>
double asymmetry(const DenseMatrix<T>& a);

template <class T>
double frobenius_norm(const DenseMatrix<T>& a);

// ||A v - lambda v|| / ||v||.
template <class T>
double eigen_residual(const DenseMatrix<T>& a, const std::vector<T>& v, double lambda);

}  // namespace ssklab
