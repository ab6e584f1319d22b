#pragma once

// Torsion, the rank/Sha dimension identity, and a naive point search giving
// rank lower bounds through the images of found points in K(S,2).

#include "descent.hpp"
#include "f2.hpp"
#include "qfield.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twodescent {

// x = m / e^2, y = n / e^3
struct RationalPoint {
    QInt m;
    QInt e;
    QInt n;
    bool on_prime = false; // point of E' rather than E

    bool is_two_torsion() const { return n.is_zero(); }
    mpz_class height_proxy() const
    {
        mpz_class h = m.norm();
        mpz_class he = e.norm();
        return h > he ? h : he;
    }
    std::string str() const
    {
        if (e == QInt(e.field(), 1L))
            return "(" + m.str() + ", " + n.str() + ")";
        return "((" + m.str() + ")/(" + e.str() + ")^2, (" + n.str() + ")/(" + e.str() + ")^3)";
    }
};

// y^2 = x^3 + a x^2 + b x, cleared of denominators: n^2 = m (m^2 + a m e^2 + b e^4)
inline bool on_curve(const RationalPoint& P, const mpz_class& a, const mpz_class& b)
{
    QInt E = P.e * P.e;
    QInt rhs = P.m * (P.m * P.m + P.m * E * a + E * E * b);
    return P.n * P.n == rhs;
}

struct TorsionReport {
    std::vector<RationalPoint> affine; // (0,0), (-eps p, 0), (-eps q, 0); O is implicit
    int order() const { return static_cast<int>(affine.size()) + 1; }
    std::string structure() const { return "Z/2 x Z/2"; }
};

inline TorsionReport two_torsion(const CurveSpec& c)
{
    const QuadField& K = c.field();
    TorsionReport t;
    for (long x : {0L, -c.eps * c.p, -c.eps * c.q}) {
        RationalPoint P{QInt(K, x), QInt(K, 1L), QInt(K, 0L), false};
        if (!on_curve(P, c.a(), c.b()))
            throw std::logic_error("two_torsion: point not on curve");
        t.affine.push_back(P);
    }
    return t;
}

// rank + dim TS(E)[phi] + dim TS(E')[phihat]
inline int dimension_identity(int dim_phi, int dim_phihat)
{
    if (dim_phi < 0 || dim_phihat < 0 || dim_phi + dim_phihat < 2)
        throw std::domain_error("dimension_identity: Selmer dimensions (" + std::to_string(dim_phi) + ", " +
                                std::to_string(dim_phihat) + ") are too small; the torsion images alone give 2");
    return dim_phi + dim_phihat - 2;
}

enum class ShaClause {
    Full,      // rank = 0, TS(E)[2] = TS(E')[2] = 0
    EPrimeTwo, // rank + dim TS(E')[2] = c
    ETwo,      // rank + dim TS(E)[2] = c
    ThreeTerm  // rank + dim TS(E)[phi] + dim TS(E')[phihat] = c
};

inline const char* to_string(ShaClause c)
{
    switch (c) {
    case ShaClause::Full: return "full";
    case ShaClause::EPrimeTwo: return "rank+dimTS(E')[2]";
    case ShaClause::ETwo: return "rank+dimTS(E)[2]";
    case ShaClause::ThreeTerm: return "rank+dimTS(E)[phi]+dimTS(E')[phihat]";
    }
    return "?";
}

struct ShaStatement {
    ShaClause clause = ShaClause::ThreeTerm;
    int value = 0;
    std::string str() const
    {
        if (clause == ShaClause::Full)
            return "rank = 0, TS(E)[2] = 0, TS(E')[2] = 0, E(K) = Z/2 x Z/2";
        return std::string(to_string(clause)) + " = " + std::to_string(value);
    }
    bool operator==(const ShaStatement&) const = default;
};

// A trivial phi-Selmer group kills TS(E)[phi], and then TS(E')[phihat] = TS(E')[2];
// symmetrically when the phihat-Selmer group is just the torsion image.
inline ShaStatement sha_two_part_reduction(int dim_phi, int dim_phihat)
{
    int c = dimension_identity(dim_phi, dim_phihat);
    if (dim_phi == 0 && dim_phihat == 2)
        return {ShaClause::Full, 0};
    if (dim_phi == 0)
        return {ShaClause::EPrimeTwo, c};
    if (dim_phihat == 2)
        return {ShaClause::ETwo, c};
    return {ShaClause::ThreeTerm, c};
}

namespace detail {

using i128 = __int128;

struct SmallQ {
    i128 a = 0;
    i128 b = 0;
};

struct SmallRing {
    i128 t;
    i128 n;
    SmallQ mul(const SmallQ& x, const SmallQ& y) const
    {
        i128 bd = x.b * y.b;
        return {x.a * y.a - n * bd, x.a * y.b + x.b * y.a + t * bd};
    }
    SmallQ add(const SmallQ& x, const SmallQ& y) const { return {x.a + y.a, x.b + y.b}; }
    SmallQ scale(const SmallQ& x, i128 s) const { return {x.a * s, x.b * s}; }
    i128 norm(const SmallQ& x) const { return x.a * x.a + t * x.a * x.b + n * x.b * x.b; }
};

inline bool perfect_square(i128 v)
{
    if (v < 0)
        return false;
    if (v < 2)
        return true;
    // quadratic residue filters
    static const auto sq64 = [] {
        std::array<bool, 64> s{};
        for (int i = 0; i < 64; ++i)
            s[(i * i) % 64] = true;
        return s;
    }();
    if (!sq64[static_cast<unsigned>(v & 63)])
        return false;
    static const auto sq63 = [] {
        std::array<bool, 63> s{};
        for (int i = 0; i < 63; ++i)
            s[(i * i) % 63] = true;
        return s;
    }();
    if (!sq63[static_cast<unsigned>(v % 63)])
        return false;
    static const auto sq65 = [] {
        std::array<bool, 65> s{};
        for (int i = 0; i < 65; ++i)
            s[(i * i) % 65] = true;
        return s;
    }();
    if (!sq65[static_cast<unsigned>(v % 65)])
        return false;
    long double r = std::sqrt(static_cast<long double>(v));
    i128 s = static_cast<i128>(r);
    for (i128 c = s > 2 ? s - 2 : 0; c <= s + 2; ++c)
        if (c * c == v)
            return true;
    return false;
}

inline QInt to_qint(const QuadField& K, const SmallQ& x)
{
    auto conv = [](i128 v) {
        bool neg = v < 0;
        unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
        mpz_class r = static_cast<unsigned long>(u >> 64);
        r <<= 64;
        r += static_cast<unsigned long>(u & ~0UL);
        return neg ? mpz_class(-r) : r;
    };
    return QInt(K, conv(x.a), conv(x.b));
}

// All a + b w with 0 < N(a + b w) <= bound.
inline std::vector<SmallQ> elements_up_to_norm(const QuadField& K, long bound)
{
    std::vector<SmallQ> out;
    long bmax = static_cast<long>(std::sqrt(4.0 * static_cast<double>(bound) / (-K.disc))) + 1;
    for (long b = -bmax; b <= bmax; ++b) {
        // N = a^2 + t a b + n b^2 <= bound  <=>  (2a + t b)^2 <= 4 bound + disc b^2
        long double rhs = 4.0L * bound + static_cast<long double>(K.disc) * b * b;
        if (rhs < 0)
            continue;
        long r = static_cast<long>(std::sqrt(rhs)) + 2;
        long amin = (-r - K.trace_w * b) / 2 - 1, amax = (r - K.trace_w * b) / 2 + 1;
        for (long a = amin; a <= amax; ++a) {
            i128 nm = static_cast<i128>(a) * a + static_cast<i128>(K.trace_w) * a * b + static_cast<i128>(K.norm_w) * b * b;
            if (nm > 0 && nm <= bound)
                out.push_back({a, b});
        }
    }
    return out;
}

// One representative per unit orbit, the smallest argument (as for prime generators).
inline std::vector<SmallQ> canonical_up_to_norm(const QuadField& K, long bound)
{
    std::vector<SmallQ> all = elements_up_to_norm(K, bound);
    std::vector<SmallQ> out;
    auto us = units(K);
    for (const auto& x : all) {
        QInt X = to_qint(K, x);
        bool best = true;
        for (const auto& u : us) {
            QInt y = u * X;
            if (y != X && twodescent::detail::arg_less(y, X)) {
                best = false;
                break;
            }
        }
        if (best)
            out.push_back(x);
    }
    return out;
}

} // namespace detail

struct PointSearchResult {
    std::vector<RationalPoint> points_e;       // distinct x on E (one sign of y), 2-torsion first
    std::vector<RationalPoint> points_e_prime; // distinct x on E'
    std::vector<f2::Vec> images_phihat;        // E points in K(S,2), echelon
    std::vector<f2::Vec> images_phi;           // E' points in K(S,2), echelon
    int rank_lower = 0;
    long candidates = 0;

    bool only_two_torsion_on_e() const
    {
        for (const auto& P : points_e)
            if (!P.is_two_torsion())
                return false;
        return points_e.size() == 3;
    }
};

namespace detail {

inline bool same_x(const RationalPoint& P, const RationalPoint& Q)
{
    QInt e1 = P.e * P.e, e2 = Q.e * Q.e;
    return P.m * e2 == Q.m * e1;
}

// Points on y^2 = x^3 + a x^2 + b x with x = m/e^2, N(m) <= H, N(e) <= sqrt(H),
// appended to the seed points after removing repeated x.
inline std::vector<RationalPoint> search_curve(const QuadField& K, const mpz_class& a, const mpz_class& b, long H,
                                               bool prime, std::vector<RationalPoint> found, long& candidates)
{
    SmallRing R{K.trace_w, K.norm_w};
    long ebound = static_cast<long>(std::floor(std::sqrt(static_cast<double>(H))));
    auto ms = elements_up_to_norm(K, H);
    ms.push_back({0, 0});
    auto es = canonical_up_to_norm(K, std::max(1L, ebound));
    i128 A = a.get_si(), B = b.get_si();
    for (const auto& e : es) {
        SmallQ E = R.mul(e, e);
        SmallQ E2 = R.mul(E, E);
        SmallQ bE2 = R.scale(E2, B);
        for (const auto& m : ms) {
            ++candidates;
            // m (m^2 + a m E + b E^2)
            SmallQ mE = R.mul(m, E);
            SmallQ inner = R.add(R.add(R.mul(m, m), R.scale(mE, A)), bE2);
            SmallQ v = R.mul(m, inner);
            if (!perfect_square(R.norm(v)))
                continue;
            QInt V = to_qint(K, v);
            auto n = sqrt_exact(V);
            if (!n)
                continue;
            RationalPoint P{to_qint(K, m), to_qint(K, e), *n, prime};
            bool dup = false;
            for (const auto& Q : found)
                if (same_x(P, Q)) {
                    dup = true;
                    break;
                }
            if (!dup)
                found.push_back(P);
        }
    }
    return found;
}

} // namespace detail

inline PointSearchResult point_search(const KS2& ks, const CurveSpec& c, long H)
{
    if (H < 1)
        throw std::invalid_argument("point_search: height bound must be >= 1");
    if (c.p > 100000)
        throw std::invalid_argument("point_search: p too large for the fixed-width kernel");
    const QuadField& K = c.field();
    PointSearchResult r;
    QInt zero(K, 0L), one(K, 1L);
    r.points_e = detail::search_curve(K, c.a(), c.b(), H, false, two_torsion(c).affine, r.candidates);
    r.points_e_prime = detail::search_curve(K, c.a_prime(), c.b_prime(), H, true,
                                            {RationalPoint{zero, one, zero, true}}, r.candidates);

    std::vector<f2::Vec> img_e, img_ep;
    auto image = [&](const QInt& x, const QInt& at_zero) {
        auto cls = ks.class_of(x.is_zero() ? at_zero : x);
        if (!cls)
            throw std::logic_error("point_search: point image outside K(S,2)");
        return *cls;
    };
    for (const auto& P : r.points_e)
        img_e.push_back(image(P.m, QInt(K, c.b())));
    for (const auto& P : r.points_e_prime)
        img_ep.push_back(image(P.m, QInt(K, c.b_prime())));
    r.images_phihat = f2::echelon(img_e);
    r.images_phi = f2::echelon(img_ep);
    r.rank_lower = static_cast<int>(r.images_phi.size() + r.images_phihat.size()) - 2;
    return r;
}

inline PointSearchResult point_search(const CurveSpec& c, long H)
{
    KS2 ks(c.field(), c.p, c.q);
    return point_search(ks, c, H);
}

struct DescentReport {
    CurveSpec curve;
    int dim_sel_phi = 0;
    int dim_sel_phihat = 0;
    int identity_value = 0;
    int rank_lower = 0;
    int rank_upper = 0;
    ShaStatement sha;

    std::string rank_str() const
    {
        if (rank_lower == rank_upper)
            return std::to_string(rank_lower);
        return "[" + std::to_string(rank_lower) + ", " + std::to_string(rank_upper) + "]";
    }
};

inline DescentReport make_report(const CurveSpec& c, int dim_phi, int dim_phihat, int rank_lower)
{
    DescentReport r;
    r.curve = c;
    r.dim_sel_phi = dim_phi;
    r.dim_sel_phihat = dim_phihat;
    r.identity_value = dimension_identity(dim_phi, dim_phihat);
    r.rank_lower = rank_lower;
    r.rank_upper = r.identity_value;
    r.sha = sha_two_part_reduction(dim_phi, dim_phihat);
    return r;
}

} // namespace twodescent
