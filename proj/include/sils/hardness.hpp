#pragma once
// Reduction from Exact Cover by 3-Sets to the zero-residual feasibility
// problem, plus an exhaustive exact-cover oracle for cross-checks.

#include <array>
#include <optional>
#include <string>

#include "sils/instance.hpp"

namespace sils {

struct X3cInstance {
    int ground_set_size = 0;                    // elements are 1..n
    std::vector<std::array<int, 3>> collection; // 3-element subsets

    void validate() const;
};

// b = 1_n, M the element-subset incidence matrix, sigma = n/3. When n is not
// a multiple of 3 there is trivially no exact cover; the reduction returns
// the same M and b with sigma = ceil(n/3), which keeps the instance
// infeasible.
SilsInstance reduce_x3c(const X3cInstance& x3c);

// Exhaustive search over subcollections (2^|C|, |C| <= 25); returns the
// indices of one exact cover if it exists.
std::optional<std::vector<int>> exact_cover_oracle(const X3cInstance& x3c);

// text format: first line n, then one subset (three elements) per line
X3cInstance load_x3c(const std::string& path);
void save_x3c(const std::string& path, const X3cInstance& x3c);

} // namespace sils
