#include "sils/hardness.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace sils {

void X3cInstance::validate() const {
    if (ground_set_size < 1) throw std::invalid_argument("x3c: empty ground set");
    if (collection.empty()) throw std::invalid_argument("x3c: empty collection");
    for (const auto& s : collection) {
        for (int e : s)
            if (e < 1 || e > ground_set_size)
                throw std::invalid_argument("x3c: element out of range");
        if (s[0] == s[1] || s[0] == s[2] || s[1] == s[2])
            throw std::invalid_argument("x3c: subset elements must be distinct");
    }
}

SilsInstance reduce_x3c(const X3cInstance& x3c) {
    x3c.validate();
    const int n = x3c.ground_set_size;
    const int d = static_cast<int>(x3c.collection.size());
    if (d < (n + 2) / 3)
        throw std::invalid_argument(
            "reduce_x3c: fewer subsets than the cover size, trivially no exact cover");
    SilsInstance inst;
    inst.m = Mat(n, d);
    for (int j = 0; j < d; ++j)
        for (int e : x3c.collection[j]) inst.m(e - 1, j) = 1.0;
    inst.b.assign(n, 1.0);
    inst.sigma = (n + 2) / 3;
    inst.validate();
    return inst;
}

std::optional<std::vector<int>> exact_cover_oracle(const X3cInstance& x3c) {
    x3c.validate();
    const int n = x3c.ground_set_size;
    const int k = static_cast<int>(x3c.collection.size());
    if (k > 25) throw std::invalid_argument("exact_cover_oracle: |C| > 25");
    if (n % 3 != 0) return std::nullopt;

    std::vector<std::uint32_t> masks;
    masks.reserve(k);
    for (const auto& s : x3c.collection) {
        std::uint32_t m = 0;
        for (int e : s) m |= 1u << (e - 1);
        masks.push_back(m);
    }
    const std::uint32_t full = n == 32 ? 0xffffffffu : (1u << n) - 1;
    for (std::uint32_t pick = 0; pick < (1u << k); ++pick) {
        std::uint32_t covered = 0;
        bool disjoint = true;
        for (int j = 0; j < k && disjoint; ++j) {
            if (!(pick & (1u << j))) continue;
            if (covered & masks[j]) disjoint = false;
            covered |= masks[j];
        }
        if (disjoint && covered == full) {
            std::vector<int> cover;
            for (int j = 0; j < k; ++j)
                if (pick & (1u << j)) cover.push_back(j);
            return cover;
        }
    }
    return std::nullopt;
}

X3cInstance load_x3c(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    X3cInstance x;
    if (!(is >> x.ground_set_size)) throw std::runtime_error("x3c file: bad header");
    std::array<int, 3> s{};
    while (is >> s[0] >> s[1] >> s[2]) x.collection.push_back(s);
    x.validate();
    return x;
}

void save_x3c(const std::string& path, const X3cInstance& x3c) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << x3c.ground_set_size << '\n';
    for (const auto& s : x3c.collection) os << s[0] << ' ' << s[1] << ' ' << s[2] << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

} // namespace sils
