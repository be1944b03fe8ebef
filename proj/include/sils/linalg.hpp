#pragma once
// Small dense linear algebra on row-major matrices, sized for instances with
// d up to a few hundred. Backed by the dispatched kernels.

#include <cstddef>
#include <vector>

#include "sils/kernels.hpp"

namespace sils {

using Vec = std::vector<double>;
using IndexSet = std::vector<int>;

class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    bool operator==(const Mat& o) const = default;

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);

Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
// x y^T
Mat outer(const Vec& x, const Vec& y);
// A^T A
Mat gram(const Mat& a);
Vec matvec(const Mat& a, const Vec& x);
Vec matvec_t(const Mat& a, const Vec& x);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& x);
double norm2_sq(const Vec& x);
double norm_inf(const Vec& x);
double norm1(const Vec& x);
Vec operator-(const Vec& a);
Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);

double trace(const Mat& a);
double frob_norm(const Mat& a);
// max_ij |A_ij|
double max_norm(const Mat& a);
// trace(A^T B) for same-shaped A, B
double frob_inner(const Mat& a, const Mat& b);

// Submatrix with the given row/column index sets, in the order listed.
Mat submatrix(const Mat& a, const IndexSet& rows, const IndexSet& cols);
Vec subvector(const Vec& x, const IndexSet& idx);
IndexSet complement(const IndexSet& s, int d);

// Eigendecomposition of a symmetric matrix: A = V diag(values) V^T with
// eigenvalues ascending and eigenvectors in the columns of `vectors`.
// Householder tridiagonalization followed by implicit-shift QL.
struct SymEig {
    Vec values;
    Mat vectors;
};
SymEig eig_sym(const Mat& a);

double lambda_min(const Mat& a);
double lambda_max(const Mat& a);

// Frobenius-nearest PSD matrix: negative eigenvalues clamped to zero.
Mat project_psd(const Mat& sym);

// Symmetric PSD square root; throws if lambda_min < -tol. Eigenvalues in
// [-tol, 0) are clamped to zero.
Mat psd_sqrt(const Mat& s, double tol = 1e-10);

// Moore-Penrose pseudo-inverse of a symmetric matrix; eigenvalues with
// |lambda| <= cutoff_rel * max|lambda| are treated as zero.
Mat pinv_sym(const Mat& a, double cutoff_rel = 1e-10);

} // namespace sils
