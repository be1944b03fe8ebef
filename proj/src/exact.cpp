#include "sils/exact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sils {

std::uint64_t enumeration_count(int d, int sigma, std::uint64_t budget) {
    if (d > 62) throw std::invalid_argument("exact solver: d > 62 not supported");
    long double count = 1.0L;
    for (int i = 0; i < sigma; ++i) count = count * (d - i) / (i + 1);
    count *= std::pow(2.0L, sigma);
    if (count > static_cast<long double>(budget))
        throw std::invalid_argument("exact solver: enumeration budget exceeded");
    return static_cast<std::uint64_t>(count + 0.5L);
}

namespace {

struct Candidate {
    std::vector<int> entries;   // dense {-1,0,1}
    bool set = false;
};

// visit every sigma-subset (Gosper's hack) and every sign pattern on it
template <typename Fn>
void enumerate_sign_vectors(int d, int sigma, Fn&& visit) {
    const std::uint64_t limit = 1ull << d;
    std::uint64_t mask = (1ull << sigma) - 1;
    std::vector<int> idx(sigma);
    std::vector<int> x(d);
    while (mask < limit) {
        int k = 0;
        for (int j = 0; j < d; ++j)
            if (mask & (1ull << j)) idx[k++] = j;
        const std::uint64_t patterns = 1ull << sigma;
        for (std::uint64_t s = 0; s < patterns; ++s) {
            std::fill(x.begin(), x.end(), 0);
            for (int j = 0; j < sigma; ++j) x[idx[j]] = (s & (1ull << j)) ? -1 : 1;
            visit(x, idx);
        }
        if (sigma == 0) break;
        std::uint64_t u = mask & (~mask + 1);
        std::uint64_t v = mask + u;
        mask = v | (((mask ^ v) / u) >> 2);
    }
}

} // namespace

ExactResult solve_exact(const SilsInstance& inst, double uniqueness_tol) {
    inst.validate();
    enumeration_count(inst.d(), inst.sigma);
    const int n = inst.n(), sigma = inst.sigma;

    ExactResult res;
    res.best_value = std::numeric_limits<double>::infinity();
    res.second_best_value = std::numeric_limits<double>::infinity();
    Candidate best;

    Vec r(n);
    enumerate_sign_vectors(inst.d(), sigma, [&](const std::vector<int>& x, const IndexSet& idx) {
        for (int i = 0; i < n; ++i) r[i] = -inst.b[i];
        for (int j : idx) {
            const double s = x[j];
            for (int i = 0; i < n; ++i) r[i] += s * inst.m(i, j);
        }
        const double value = kern::sum_sq(r.data(), n) / n;
        ++res.candidates;
        if (value < res.best_value) {
            res.second_best_value = res.best_value;
            res.best_value = value;
            best.entries = x;
            best.set = true;
        } else if (value == res.best_value) {
            res.second_best_value = value;   // a distinct candidate ties the optimum
            if (x < best.entries) best.entries = x;
        } else if (value < res.second_best_value) {
            res.second_best_value = value;
        }
    });

    res.best_x = SparseSignVector::from_entries(best.entries);
    res.unique = res.second_best_value - res.best_value > uniqueness_tol;
    return res;
}

std::optional<SparseSignVector> solve_sils0(const SilsInstance& inst, double feas_tol) {
    inst.validate();
    enumeration_count(inst.d(), inst.sigma);
    const int n = inst.n();
    std::optional<SparseSignVector> found;
    Vec r(n);
    enumerate_sign_vectors(inst.d(), inst.sigma, [&](const std::vector<int>& x, const IndexSet& idx) {
        if (found) return;
        for (int i = 0; i < n; ++i) r[i] = -inst.b[i];
        for (int j : idx) {
            const double s = x[j];
            for (int i = 0; i < n; ++i) r[i] += s * inst.m(i, j);
        }
        if (kern::max_abs(r.data(), n) <= feas_tol)
            found = SparseSignVector::from_entries(x);
    });
    return found;
}

} // namespace sils
