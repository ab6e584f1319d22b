#pragma once

// Residue fields F_l and F_{l^2} with machine-word arithmetic, plus the few
// polynomial routines the local solver needs (roots of quartics, square tests).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace twodescent {

struct Fq {
    // x + y*w with w^2 = t*w - n (degree 2) or just x (degree 1)
    std::int64_t x = 0;
    std::int64_t y = 0;
    bool operator==(const Fq&) const = default;
};

class FiniteField {
public:
    std::int64_t ell = 2;
    int degree = 1;
    std::int64_t t = 0; // only meaningful for degree 2
    std::int64_t n = 0;

    FiniteField() = default;
    FiniteField(std::int64_t ell_, int degree_, std::int64_t t_ = 0, std::int64_t n_ = 0)
        : ell(ell_), degree(degree_), t(mod(t_)), n(mod(n_))
    {
        if (ell_ < 2 || ell_ > (std::int64_t(1) << 31))
            throw std::invalid_argument("FiniteField: characteristic out of range");
    }

    std::int64_t order() const { return degree == 1 ? ell : ell * ell; }

    std::int64_t mod(std::int64_t a) const
    {
        a %= ell;
        return a < 0 ? a + ell : a;
    }

    Fq zero() const { return {}; }
    Fq one() const { return {1, 0}; }
    Fq from_int(std::int64_t a) const { return {mod(a), 0}; }
    Fq make(std::int64_t a, std::int64_t b) const { return {mod(a), degree == 1 ? 0 : mod(b)}; }

    // Enumeration order: index = x + ell*y.
    Fq element(std::int64_t index) const { return {index % ell, index / ell}; }
    std::int64_t index(const Fq& a) const { return a.x + ell * a.y; }

    Fq add(const Fq& a, const Fq& b) const { return {(a.x + b.x) % ell, (a.y + b.y) % ell}; }
    Fq sub(const Fq& a, const Fq& b) const { return {(a.x - b.x + ell) % ell, (a.y - b.y + ell) % ell}; }
    Fq neg(const Fq& a) const { return {(ell - a.x) % ell, (ell - a.y) % ell}; }
    Fq mul(const Fq& a, const Fq& b) const
    {
        if (degree == 1)
            return {mulmod(a.x, b.x), 0};
        // (x1 + y1 w)(x2 + y2 w) = x1x2 - n y1y2 + (x1y2 + x2y1 + t y1y2) w
        std::int64_t yy = mulmod(a.y, b.y);
        std::int64_t nx = mod(mulmod(a.x, b.x) - mulmod(n, yy));
        std::int64_t ny = (mulmod(a.x, b.y) + mulmod(a.y, b.x) + mulmod(t, yy)) % ell;
        return {nx, ny};
    }
    Fq pow(Fq a, std::uint64_t k) const
    {
        Fq r = one();
        while (k) {
            if (k & 1U)
                r = mul(r, a);
            a = mul(a, a);
            k >>= 1U;
        }
        return r;
    }
    bool is_zero(const Fq& a) const { return a.x == 0 && a.y == 0; }

    std::int64_t norm(const Fq& a) const
    {
        if (degree == 1)
            return a.x;
        // N(x + y w) = x^2 + t x y + n y^2
        return (mulmod(a.x, a.x) + mulmod(mulmod(t, a.x), a.y) + mulmod(n, mulmod(a.y, a.y))) % ell;
    }

    // Legendre-style character: 1 square, -1 non-square, 0 zero.
    int chi(const Fq& a) const
    {
        if (is_zero(a))
            return 0;
        if (ell == 2)
            return 1; // every element of a field of characteristic 2 is a square
        std::int64_t nm = norm(a);
        std::int64_t r = powmod(nm, (ell - 1) / 2);
        return r == 1 ? 1 : -1;
    }

    Fq inv(const Fq& a) const
    {
        if (is_zero(a))
            throw std::domain_error("FiniteField: inverse of zero");
        return pow(a, static_cast<std::uint64_t>(order() - 2));
    }

    // Square root (Tonelli-Shanks), nullopt for non-squares.
    std::optional<Fq> sqrt(const Fq& a) const
    {
        if (is_zero(a))
            return a;
        if (ell == 2)
            return pow(a, static_cast<std::uint64_t>(order() / 2));
        if (chi(a) != 1)
            return std::nullopt;
        std::uint64_t qm1 = static_cast<std::uint64_t>(order() - 1);
        int s = 0;
        std::uint64_t m = qm1;
        while ((m & 1U) == 0) {
            m >>= 1U;
            ++s;
        }
        Fq z = nonresidue();
        Fq c = pow(z, m);
        Fq r = pow(a, (m + 1) / 2);
        Fq tt = pow(a, m);
        int M = s;
        while (!(tt == one())) {
            int i = 0;
            Fq t2 = tt;
            while (!(t2 == one())) {
                t2 = mul(t2, t2);
                ++i;
            }
            Fq b = c;
            for (int j = 0; j < M - i - 1; ++j)
                b = mul(b, b);
            r = mul(r, b);
            c = mul(b, b);
            tt = mul(tt, c);
            M = i;
        }
        return r;
    }

    Fq nonresidue() const
    {
        for (std::int64_t i = 2; i < order(); ++i) {
            Fq z = element(i);
            if (chi(z) == -1)
                return z;
        }
        throw std::logic_error("FiniteField: no non-residue");
    }

private:
    std::int64_t mulmod(std::int64_t a, std::int64_t b) const
    {
        return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % ell);
    }
    std::int64_t powmod(std::int64_t a, std::int64_t k) const
    {
        std::int64_t r = 1 % ell;
        a = mod(a);
        while (k) {
            if (k & 1)
                r = mulmod(r, a);
            a = mulmod(a, a);
            k >>= 1;
        }
        return r;
    }
};

// Dense polynomials over a FiniteField, lowest degree first.
using FqPoly = std::vector<Fq>;

namespace fqpoly {

inline void trim(const FiniteField& k, FqPoly& f)
{
    while (!f.empty() && k.is_zero(f.back()))
        f.pop_back();
}

inline int degree(const FqPoly& f) { return static_cast<int>(f.size()) - 1; }

inline Fq eval(const FiniteField& k, const FqPoly& f, const Fq& x)
{
    Fq r = k.zero();
    for (auto it = f.rbegin(); it != f.rend(); ++it)
        r = k.add(k.mul(r, x), *it);
    return r;
}

inline FqPoly mul(const FiniteField& k, const FqPoly& a, const FqPoly& b)
{
    if (a.empty() || b.empty())
        return {};
    FqPoly r(a.size() + b.size() - 1, k.zero());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = k.add(r[i + j], k.mul(a[i], b[j]));
    trim(k, r);
    return r;
}

// remainder of a modulo b (b nonzero)
inline FqPoly rem(const FiniteField& k, FqPoly a, const FqPoly& b)
{
    trim(k, a);
    int db = degree(b);
    Fq lead_inv = k.inv(b.back());
    while (degree(a) >= db) {
        Fq c = k.mul(a.back(), lead_inv);
        int shift = degree(a) - db;
        for (int i = 0; i <= db; ++i)
            a[shift + i] = k.sub(a[shift + i], k.mul(c, b[i]));
        trim(k, a);
    }
    return a;
}

inline FqPoly divexact(const FiniteField& k, FqPoly a, const FqPoly& b)
{
    trim(k, a);
    int db = degree(b);
    if (degree(a) < db)
        return {};
    FqPoly q(degree(a) - db + 1, k.zero());
    Fq lead_inv = k.inv(b.back());
    while (degree(a) >= db) {
        Fq c = k.mul(a.back(), lead_inv);
        int shift = degree(a) - db;
        q[shift] = c;
        for (int i = 0; i <= db; ++i)
            a[shift + i] = k.sub(a[shift + i], k.mul(c, b[i]));
        trim(k, a);
    }
    return q;
}

inline FqPoly monic(const FiniteField& k, FqPoly f)
{
    trim(k, f);
    if (f.empty())
        return f;
    Fq li = k.inv(f.back());
    for (auto& c : f)
        c = k.mul(c, li);
    return f;
}

inline FqPoly gcd(const FiniteField& k, FqPoly a, FqPoly b)
{
    trim(k, a);
    trim(k, b);
    while (!b.empty()) {
        FqPoly r = rem(k, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(k, a);
}

// base^e mod m
inline FqPoly powmod(const FiniteField& k, FqPoly base, std::uint64_t e, const FqPoly& m)
{
    FqPoly r{k.one()};
    base = rem(k, base, m);
    while (e) {
        if (e & 1U)
            r = rem(k, mul(k, r, base), m);
        e >>= 1U;
        if (e)
            base = rem(k, mul(k, base, base), m);
    }
    return r;
}

namespace detail {
inline void split_roots(const FiniteField& k, const FqPoly& f, std::vector<Fq>& out)
{
    int d = degree(f);
    if (d <= 0)
        return;
    if (d == 1) {
        out.push_back(k.neg(k.mul(f[0], k.inv(f[1]))));
        return;
    }
    if (k.order() <= 64) {
        for (std::int64_t i = 0; i < k.order(); ++i)
            if (k.is_zero(eval(k, f, k.element(i))))
                out.push_back(k.element(i));
        return;
    }
    // Cantor-Zassenhaus with deterministic shifts (odd characteristic)
    std::uint64_t half = static_cast<std::uint64_t>((k.order() - 1) / 2);
    for (std::int64_t a = 0; a < k.order(); ++a) {
        FqPoly x{k.element(a), k.one()};
        FqPoly h = powmod(k, x, half, f);
        if (h.empty())
            continue;
        h[0] = k.sub(h[0], k.one());
        trim(k, h);
        FqPoly g = gcd(k, f, h);
        if (degree(g) > 0 && degree(g) < d) {
            split_roots(k, g, out);
            split_roots(k, monic(k, divexact(k, f, g)), out);
            return;
        }
    }
    throw std::logic_error("fqpoly: root splitting failed");
}
} // namespace detail

// Distinct roots in F_q, sorted by enumeration index. f must be nonzero.
inline std::vector<Fq> roots(const FiniteField& k, FqPoly f)
{
    f = monic(k, f);
    if (f.empty())
        throw std::domain_error("fqpoly::roots: zero polynomial");
    std::vector<Fq> out;
    if (degree(f) <= 0)
        return out;
    if (k.order() <= 64) {
        detail::split_roots(k, f, out);
    } else {
        // product of the distinct linear factors: gcd(f, x^q - x)
        FqPoly x{k.zero(), k.one()};
        FqPoly xq = powmod(k, x, static_cast<std::uint64_t>(k.order()), f);
        xq.resize(std::max<std::size_t>(xq.size(), 2), k.zero());
        xq[1] = k.sub(xq[1], k.one());
        trim(k, xq);
        FqPoly g = xq.empty() ? f : gcd(k, f, xq);
        detail::split_roots(k, g, out);
    }
    std::sort(out.begin(), out.end(), [&](const Fq& a, const Fq& b) { return k.index(a) < k.index(b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// f = c * g^2 with g monic; returns (c, g) when such a decomposition exists.
// Odd characteristic only.
inline std::optional<std::pair<Fq, FqPoly>> constant_times_square(const FiniteField& k, FqPoly f)
{
    trim(k, f);
    if (f.empty() || degree(f) % 2 != 0)
        return std::nullopt;
    Fq c = f.back();
    FqPoly m = monic(k, f);
    int dg = degree(m) / 2;
    // g = x^dg + ..., solve coefficients from the top down
    FqPoly g(dg + 1, k.zero());
    g[dg] = k.one();
    Fq inv2 = k.inv(k.from_int(2));
    for (int j = dg - 1; j >= 0; --j) {
        // coefficient of x^(dg + j) in g^2 equals m[dg + j]
        Fq acc = k.zero();
        for (int i = j + 1; i < dg; ++i) {
            int other = dg + j - i;
            if (other > j && other <= dg && other != dg)
                acc = k.add(acc, k.mul(g[i], g[other]));
        }
        // g^2[dg+j] = 2 g[j] g[dg] + sum_{i+o = dg+j, j<i,o<dg} g[i]g[o]
        g[j] = k.mul(k.sub(m[dg + j], acc), inv2);
    }
    FqPoly sq = mul(k, g, g);
    if (sq != m)
        return std::nullopt;
    return std::make_pair(c, g);
}

} // namespace fqpoly

} // namespace twodescent
