#include "sils/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sils {

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat& Mat::operator+=(const Mat& o) {
    kern::axpy(1.0, o.data(), data(), data_.size());
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    kern::axpy(-1.0, o.data(), data(), data_.size());
    return *this;
}

Mat& Mat::operator*=(double s) {
    kern::scal(s, data(), data_.size());
    return *this;
}

Mat operator+(Mat a, const Mat& b) { a += b; return a; }
Mat operator-(Mat a, const Mat& b) { a -= b; return a; }
Mat operator*(double s, Mat a) { a *= s; return a; }

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Mat c(a.rows(), b.cols());
    kern::matmul(a.data(), a.rows(), a.cols(), b.data(), b.cols(), c.data());
    return c;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Mat outer(const Vec& x, const Vec& y) {
    Mat m(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) kern::axpy(x[i], y.data(), m.row(i), y.size());
    return m;
}

Mat gram(const Mat& a) {
    Mat c(a.cols(), a.cols());
    kern::gram(a.data(), a.rows(), a.cols(), c.data());
    return c;
}

Vec matvec(const Mat& a, const Vec& x) {
    if (x.size() != a.cols()) throw std::invalid_argument("matvec: shape mismatch");
    Vec y(a.rows());
    kern::gemv(a.data(), a.rows(), a.cols(), x.data(), y.data());
    return y;
}

Vec matvec_t(const Mat& a, const Vec& x) {
    if (x.size() != a.rows()) throw std::invalid_argument("matvec_t: shape mismatch");
    Vec y(a.cols());
    kern::gemv_t(a.data(), a.rows(), a.cols(), x.data(), y.data());
    return y;
}

double dot(const Vec& a, const Vec& b) { return kern::dot(a.data(), b.data(), a.size()); }
double norm2_sq(const Vec& x) { return kern::sum_sq(x.data(), x.size()); }
double norm2(const Vec& x) { return std::sqrt(norm2_sq(x)); }
double norm_inf(const Vec& x) { return kern::max_abs(x.data(), x.size()); }
double norm1(const Vec& x) { return kern::sum_abs(x.data(), x.size()); }

Vec operator-(const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

Vec operator+(Vec a, const Vec& b) {
    kern::axpy(1.0, b.data(), a.data(), a.size());
    return a;
}

Vec operator-(Vec a, const Vec& b) {
    kern::axpy(-1.0, b.data(), a.data(), a.size());
    return a;
}

Vec operator*(double s, Vec a) {
    kern::scal(s, a.data(), a.size());
    return a;
}

double trace(const Mat& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

double frob_norm(const Mat& a) {
    return std::sqrt(kern::sum_sq(a.data(), a.rows() * a.cols()));
}

double max_norm(const Mat& a) { return kern::max_abs(a.data(), a.rows() * a.cols()); }

double frob_inner(const Mat& a, const Mat& b) {
    return kern::dot(a.data(), b.data(), a.rows() * a.cols());
}

Mat submatrix(const Mat& a, const IndexSet& rows, const IndexSet& cols) {
    Mat m(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) m(i, j) = a(rows[i], cols[j]);
    return m;
}

Vec subvector(const Vec& x, const IndexSet& idx) {
    Vec r(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[i] = x[idx[i]];
    return r;
}

IndexSet complement(const IndexSet& s, int d) {
    std::vector<bool> in(d, false);
    for (int i : s) in[i] = true;
    IndexSet c;
    c.reserve(d - s.size());
    for (int i = 0; i < d; ++i)
        if (!in[i]) c.push_back(i);
    return c;
}

// ------------------------------------------------------------- eigensolver ---

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form, with
// accumulation of the orthogonal transformation in `z` (EISPACK tred2).
void tred2(Mat& z, Vec& d, Vec& e) {
    const std::size_t n = z.rows();
    for (std::size_t ii = n - 1; ii >= 1; --ii) {
        const std::size_t i = ii, l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k)
                        z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
                for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

// Implicit-shift QL on the tridiagonal (d, e), rotations applied to the
// columns of `z` (EISPACK tql2).
void tql2(Mat& z, Vec& d, Vec& e) {
    const std::size_t n = z.rows();
    if (n == 1) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 || std::fabs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (++iter == 50) throw std::runtime_error("eig_sym: QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

SymEig eig_sym(const Mat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig_sym: not square");
    const std::size_t n = a.rows();
    SymEig out;
    out.vectors = a;
    // symmetrize defensively against accumulated roundoff in callers
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double v = 0.5 * (out.vectors(i, j) + out.vectors(j, i));
            out.vectors(i, j) = out.vectors(j, i) = v;
        }
    out.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n * n; ++i)
        if (!std::isfinite(out.vectors.data()[i]))
            throw std::invalid_argument("eig_sym: non-finite input");
    if (n == 1) {
        out.values[0] = a(0, 0);
        out.vectors(0, 0) = 1.0;
        return out;
    }
    Vec e(n, 0.0);
    tred2(out.vectors, out.values, e);
    tql2(out.vectors, out.values, e);
    // sort ascending, carrying eigenvector columns along
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return out.values[i] < out.values[j]; });
    Vec vals(n);
    Mat vecs(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        vals[j] = out.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) vecs(i, j) = out.vectors(i, order[j]);
    }
    out.values = std::move(vals);
    out.vectors = std::move(vecs);
    return out;
}

double lambda_min(const Mat& a) { return eig_sym(a).values.front(); }
double lambda_max(const Mat& a) { return eig_sym(a).values.back(); }

namespace {

// V f(diag) V^T, symmetrized
template <typename F>
Mat eig_reconstruct(const SymEig& eg, F&& f) {
    const std::size_t n = eg.values.size();
    Mat out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double lam = f(eg.values[k]);
        if (lam == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            double vik = lam * eg.vectors(i, k);
            if (vik != 0.0)
                for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * eg.vectors(j, k);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double v = 0.5 * (out(i, j) + out(j, i));
            out(i, j) = out(j, i) = v;
        }
    return out;
}

} // namespace

Mat project_psd(const Mat& sym) {
    return eig_reconstruct(eig_sym(sym), [](double v) { return v > 0.0 ? v : 0.0; });
}

Mat psd_sqrt(const Mat& s, double tol) {
    SymEig eg = eig_sym(s);
    if (eg.values.front() < -tol)
        throw std::invalid_argument("psd_sqrt: matrix has eigenvalue below -tol");
    return eig_reconstruct(eg, [](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
}

Mat pinv_sym(const Mat& a, double cutoff_rel) {
    SymEig eg = eig_sym(a);
    double lmax = 0.0;
    for (double v : eg.values) lmax = std::max(lmax, std::fabs(v));
    const double cutoff = cutoff_rel * lmax;
    return eig_reconstruct(
        eg, [cutoff](double v) { return std::fabs(v) <= cutoff ? 0.0 : 1.0 / v; });
}

} // namespace sils
