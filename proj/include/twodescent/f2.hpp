#pragma once

// F_2 vectors as bitmasks (bit i = coordinate i).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

namespace twodescent::f2 {

using Vec = std::uint32_t;

inline int lowest_bit(Vec v) { return std::countr_zero(v); }

// Reduced echelon basis of span(vs): pivots at lowest set bits, each pivot
// cleared from every other basis vector; sorted by pivot.
inline std::vector<Vec> echelon(const std::vector<Vec>& vs)
{
    std::vector<Vec> basis;
    for (Vec v : vs) {
        for (Vec b : basis)
            if (v & (Vec(1) << lowest_bit(b)))
                v ^= b;
        if (v == 0)
            continue;
        for (Vec& b : basis)
            if (b & (Vec(1) << lowest_bit(v)))
                b ^= v;
        basis.push_back(v);
    }
    // a second pass keeps the form reduced after later insertions
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            if (i != j && (basis[j] & (Vec(1) << lowest_bit(basis[i]))))
                basis[j] ^= basis[i];
    std::vector<Vec> sorted = basis;
    std::sort(sorted.begin(), sorted.end(), [](Vec a, Vec b) { return lowest_bit(a) < lowest_bit(b); });
    return sorted;
}

inline int rank(const std::vector<Vec>& vs) { return static_cast<int>(echelon(vs).size()); }

inline bool in_span(const std::vector<Vec>& basis_echelon, Vec v)
{
    for (Vec b : basis_echelon)
        if (v & (Vec(1) << lowest_bit(b)))
            v ^= b;
    return v == 0;
}

// All 2^k elements of the span of an echelon basis, in increasing order.
inline std::vector<Vec> span(const std::vector<Vec>& basis)
{
    std::vector<Vec> out{0};
    for (Vec b : basis) {
        std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(out[i] ^ b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace twodescent::f2
