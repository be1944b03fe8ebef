#pragma once
// Brute-force enumeration over all sigma-sparse sign vectors. Oracle for the
// SDP relaxation and for the feasibility question on reduced instances.

#include <cstdint>
#include <optional>

#include "sils/instance.hpp"

namespace sils {

struct ExactResult {
    SparseSignVector best_x;
    double best_value = 0.0;
    bool unique = false;
    double second_best_value = 0.0;
    std::uint64_t candidates = 0;   // number of vectors visited
};

// Number of candidate vectors, C(d, sigma) * 2^sigma; throws if it exceeds
// the budget.
std::uint64_t enumeration_count(int d, int sigma, std::uint64_t budget = 100000000ull);

// Visits every support (Gosper order) and every sign pattern; ties broken by
// lexicographic order of (support, signs).
ExactResult solve_exact(const SilsInstance& inst, double uniqueness_tol = 1e-9);

// Some x with |M x - b|_inf <= feas_tol, if one exists.
std::optional<SparseSignVector> solve_sils0(const SilsInstance& inst, double feas_tol = 1e-9);

} // namespace sils
