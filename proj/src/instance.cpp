#include "sils/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sils {

void SilsInstance::validate() const {
    if (m.rows() < 1 || m.cols() < 1) throw std::invalid_argument("instance: empty matrix");
    if (b.size() != m.rows()) throw std::invalid_argument("instance: b dimension mismatch");
    if (sigma < 1 || sigma > d()) throw std::invalid_argument("instance: sigma out of range");
    for (std::size_t i = 0; i < m.rows() * m.cols(); ++i)
        if (!std::isfinite(m.data()[i])) throw std::invalid_argument("instance: non-finite M");
    for (double v : b)
        if (!std::isfinite(v)) throw std::invalid_argument("instance: non-finite b");
}

SparseSignVector SparseSignVector::from_entries(const std::vector<int>& entries) {
    SparseSignVector s;
    s.x = entries;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i] != 0 && entries[i] != 1 && entries[i] != -1)
            throw std::invalid_argument("sign vector entries must be in {-1,0,1}");
        if (entries[i] != 0) s.support.push_back(static_cast<int>(i));
    }
    return s;
}

Vec SparseSignVector::dense() const {
    Vec v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i];
    return v;
}

double objective(const SilsInstance& inst, const Vec& x) {
    if (static_cast<int>(x.size()) != inst.d())
        throw std::invalid_argument("objective: dimension mismatch");
    Vec r = matvec(inst.m, x) - inst.b;
    return norm2_sq(r) / inst.n();
}

Mat gram_lift(const SilsInstance& inst) {
    const int n = inst.n(), d = inst.d();
    Mat a(n, 1 + d);
    for (int i = 0; i < n; ++i) {
        a(i, 0) = -inst.b[i];
        for (int j = 0; j < d; ++j) a(i, j + 1) = inst.m(i, j);
    }
    Mat g = gram(a);
    g *= 1.0 / n;
    return g;
}

double coherence(const Mat& psi) {
    if (psi.rows() != psi.cols()) throw std::invalid_argument("coherence: not square");
    double mu = 0.0;
    for (std::size_t i = 0; i < psi.rows(); ++i)
        for (std::size_t j = 0; j < psi.cols(); ++j) {
            if (i == j) continue;
            double num = std::fabs(psi(i, j));
            double den = std::sqrt(std::fabs(psi(i, i) * psi(j, j)));
            if (num == 0.0) continue;        // covers the 0/0 convention
            mu = std::max(mu, num / den);
        }
    return mu;
}

double inf_op_norm(const Mat& p) {
    double norm = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i)
        norm = std::max(norm, kern::sum_abs(p.row(i), p.cols()));
    return norm;
}

IndexSet top_sigma_support(const Vec& z, int sigma) {
    IndexSet idx(z.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::fabs(z[a]) > std::fabs(z[b]);
    });
    idx.resize(std::min<std::size_t>(sigma, idx.size()));
    std::sort(idx.begin(), idx.end());
    return idx;
}

MetricsRow metrics(const Vec& z, const GroundTruth& truth, const Mat& m, int sigma) {
    if (z.size() != m.cols() || truth.z_star.size() != m.cols())
        throw std::invalid_argument("metrics: dimension mismatch");
    MetricsRow row;

    IndexSet supp_z, supp_star;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (std::fabs(z[i]) > kSupportZeroTol) supp_z.push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < truth.z_star.size(); ++i)
        if (truth.z_star[i] != 0.0) supp_star.push_back(static_cast<int>(i));
    row.nonzeros = static_cast<int>(supp_z.size());

    if (supp_star.empty()) throw std::invalid_argument("metrics: empty true support");
    IndexSet inter;
    std::set_intersection(supp_star.begin(), supp_star.end(), supp_z.begin(), supp_z.end(),
                          std::back_inserter(inter));
    row.tpr = static_cast<double>(inter.size()) / supp_star.size();

    Vec mz_star = matvec(m, truth.z_star);
    double denom = norm2_sq(mz_star);
    if (denom == 0.0) throw std::invalid_argument("metrics: M z_star = 0, prediction error undefined");
    row.prediction_error = norm2_sq(matvec(m, z) - mz_star) / denom;

    IndexSet top = top_sigma_support(z, sigma);
    IndexSet inter_top;
    std::set_intersection(supp_star.begin(), supp_star.end(), top.begin(), top.end(),
                          std::back_inserter(inter_top));
    row.successful_recovery_rate = static_cast<double>(inter_top.size()) / supp_star.size();

    if (truth.cov) {
        Mat half = psd_sqrt(*truth.cov);
        Vec zs = subvector(truth.z_star, supp_star);
        IndexSet all_rows(half.rows());
        std::iota(all_rows.begin(), all_rows.end(), 0);
        Mat half_s = submatrix(half, all_rows, supp_star);
        double sig = norm2_sq(matvec(half_s, zs));
        row.snr = truth.noise_param > 0.0
                      ? sig / (truth.noise_param * truth.noise_param)
                      : std::numeric_limits<double>::infinity();
    }
    return row;
}

// ------------------------------------------------------------------- I/O ---

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_vec(std::ostream& os, const Vec& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? " " : "") << format_double(v[i]);
    os << '\n';
}

void write_mat(std::ostream& os, const Mat& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            os << (j ? " " : "") << format_double(m(i, j));
        os << '\n';
    }
}

Vec read_vec(std::istream& is, std::size_t count) {
    Vec v(count);
    for (auto& x : v)
        if (!(is >> x)) throw std::runtime_error("instance file: truncated vector");
    return v;
}

Mat read_mat(std::istream& is, std::size_t rows, std::size_t cols) {
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (!(is >> m(i, j))) throw std::runtime_error("instance file: truncated matrix");
    return m;
}

} // namespace

void save_instance(const std::string& path, const SilsInstance& inst, const GroundTruth* truth) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << inst.n() << ' ' << inst.d() << ' ' << inst.sigma << '\n';
    write_mat(os, inst.m);
    write_vec(os, inst.b);
    if (truth) {
        os << "#z_star\n";
        write_vec(os, truth->z_star);
        os << "#eps\n";
        write_vec(os, truth->eps);
        if (truth->cov) {
            os << "#cov\n";
            write_mat(os, *truth->cov);
        }
        os << "#noise_param\n" << format_double(truth->noise_param) << '\n';
        if (truth->m1) {
            os << "#m1\n";
            write_mat(os, *truth->m1);
        }
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::pair<SilsInstance, std::optional<GroundTruth>> load_instance(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::size_t n, d;
    int sigma;
    if (!(is >> n >> d >> sigma)) throw std::runtime_error("instance file: bad header");
    SilsInstance inst;
    inst.m = read_mat(is, n, d);
    inst.b = read_vec(is, n);
    inst.sigma = sigma;
    inst.validate();

    std::optional<GroundTruth> truth;
    std::string tag;
    while (is >> tag) {
        if (!truth) truth.emplace();
        if (tag == "#z_star") truth->z_star = read_vec(is, d);
        else if (tag == "#eps") truth->eps = read_vec(is, n);
        else if (tag == "#cov") truth->cov = read_mat(is, d, d);
        else if (tag == "#noise_param") {
            double v;
            if (!(is >> v)) throw std::runtime_error("instance file: bad noise_param");
            truth->noise_param = v;
        } else if (tag == "#m1") truth->m1 = read_mat(is, n, d);
        else throw std::runtime_error("instance file: unknown section " + tag);
    }
    return {std::move(inst), std::move(truth)};
}

} // namespace sils
