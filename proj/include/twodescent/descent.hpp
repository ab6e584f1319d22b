#pragma once

// 2-isogeny descent for E: y^2 = x(x + eps p)(x + eps q) and
// E': y^2 = x^3 - 2 eps (p + q) x^2 + 4x over an imaginary quadratic field.

#include "f2.hpp"
#include "homspace.hpp"
#include "local_solver.hpp"
#include "localfield.hpp"
#include "qfield.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twodescent {

struct CurveSpec {
    int eps = 1;
    long p = 0;
    long q = 0;
    const QuadField* K = nullptr;

    CurveSpec() = default;
    CurveSpec(const QuadField& field, long p_, int eps_) : eps(eps_), p(p_), q(p_ + 2), K(&field) { validate(); }

    const QuadField& field() const { return *K; }

    void validate() const
    {
        if (eps != 1 && eps != -1)
            throw std::invalid_argument("CurveSpec: eps must be +1 or -1");
        if (q != p + 2 || !is_prime(p) || !is_prime(q))
            throw std::invalid_argument("CurveSpec: (" + std::to_string(p) + ", " + std::to_string(q) +
                                        ") is not a twin prime pair");
        if ((-K->disc) % p == 0 || (-K->disc) % q == 0)
            throw std::invalid_argument("CurveSpec: p q must be prime to the discriminant " +
                                        std::to_string(K->disc));
    }

    // E: y^2 = x^3 + a x^2 + b x
    mpz_class a() const { return mpz_class(eps * (p + q)); }
    mpz_class b() const { return mpz_class(p) * q; }
    // E': y^2 = x^3 + a' x^2 + b' x
    mpz_class a_prime() const { return mpz_class(-2 * eps * (p + q)); }
    mpz_class b_prime() const { return mpz_class(4); }

    std::string str() const
    {
        return "E: y^2 = x(x " + std::string(eps > 0 ? "+ " : "- ") + std::to_string(p) + ")(x " +
               (eps > 0 ? "+ " : "- ") + std::to_string(q) + ") over " + K->name;
    }
};

enum class Direction { Phi, PhiHat };

inline const char* to_string(Direction d) { return d == Direction::Phi ? "phi" : "phihat"; }

// K(S,2) with its ordered generator list: the unit class, then one generator per finite place.
class KS2 {
public:
    const QuadField* K = nullptr;
    PlaceSet S;
    std::vector<QInt> gens;
    std::vector<std::string> labels;
    std::vector<LocalField> places;

    KS2(const QuadField& field, long p, long q) : K(&field), S(build_place_set(field, p, q))
    {
        gens.push_back(field.D == -1 ? QInt::w(field) : QInt(field, -1L));
        labels.push_back(field.D == -1 ? "i" : "-1");
        for (const auto& fp : S.finite) {
            gens.push_back(fp.pi);
            labels.push_back(fp.label);
            places.emplace_back(field, fp);
        }
    }

    int size() const { return static_cast<int>(gens.size()); }
    f2::Vec count() const { return f2::Vec(1) << size(); }

    QInt rep(f2::Vec mask) const
    {
        QInt r(*K, 1L);
        for (int i = 0; i < size(); ++i)
            if (mask & (f2::Vec(1) << i))
                r *= gens[i];
        return r;
    }

    std::string label(f2::Vec mask) const
    {
        if (mask == 0)
            return "1";
        std::string s;
        for (int i = 0; i < size(); ++i)
            if (mask & (f2::Vec(1) << i))
                s += (s.empty() ? "" : "*") + labels[i];
        return s;
    }

    // Parity of the unit u in units mod squares.
    int unit_parity(const QInt& u) const
    {
        if (K->D == -1)
            return u.b != 0 ? 1 : 0;
        if (K->D == -3) {
            auto us = units(*K);
            for (std::size_t k = 0; k < us.size(); ++k)
                if (us[k] == u)
                    return static_cast<int>(k % 2);
            throw std::logic_error("unit_parity: not a unit");
        }
        return u.a == -1 ? 1 : 0;
    }

    // Class of nonzero x in K*/K*^2, nullopt when outside K(S,2).
    std::optional<f2::Vec> class_of(QInt x) const
    {
        if (x.is_zero())
            throw std::domain_error("class_of: zero");
        f2::Vec mask = 0;
        for (std::size_t i = 0; i < places.size(); ++i) {
            int v = places[i].valuation(x);
            if (v % 2)
                mask |= f2::Vec(1) << (i + 1);
            x = x.exact_div(gens[i + 1].pow(static_cast<unsigned>(v)));
        }
        for (const auto& u : units(*K)) {
            if (sqrt_exact(x * u)) {
                // x = u^-1 * square, and u^-1 has the parity of u
                if (unit_parity(u))
                    mask |= 1;
                return mask;
            }
        }
        return std::nullopt;
    }

    // Generator list rendered as "<-1, pi2, pi2bar, p, q>".
    std::string str() const
    {
        std::string s = "<";
        for (std::size_t i = 0; i < labels.size(); ++i)
            s += (i ? ", " : "") + labels[i];
        return s + ">";
    }

    const LocalField* place_by_label(const std::string& lab) const
    {
        for (const auto& L : places)
            if (L.label == lab)
                return &L;
        return nullptr;
    }
};

struct SelmerClass {
    f2::Vec exps = 0;
    QInt rep;
};

inline SelmerClass make_class(const KS2& ks, f2::Vec exps) { return {exps, ks.rep(exps)}; }

namespace detail {
// z -> lambda z with lambda = num / den (den a divisor of the coefficients)
inline void substitute_scale(HomSpace& H, const QInt& num, const QInt& den)
{
    QInt n2 = num * num, d2 = den * den;
    H.c2 = (H.c2 * n2).exact_div(d2);
    H.c4 = (H.c4 * n2 * n2).exact_div(d2 * d2);
}
} // namespace detail

// C_d : d w^2 = d^2 - 2 eps (p+q) d z^2 + 4 z^4       (phi)
// C'_d: d w^2 = d^2 + eps (p+q) d z^2 + p q z^4        (phihat)
// with the field-specific rescalings of z used for Q(sqrt(-2)) and Q(i).
inline HomSpace hom_space(const SelmerClass& d, const CurveSpec& curve, Direction dir)
{
    const QuadField& K = curve.field();
    HomSpace H;
    H.d = d.rep;
    H.c0 = d.rep * d.rep;
    mpz_class s = curve.eps * (curve.p + curve.q);
    if (dir == Direction::Phi) {
        H.kind = SpaceKind::C;
        H.c2 = d.rep * mpz_class(-2 * s);
        H.c4 = QInt(K, 4L);
        if (K.D == -2 || K.D == -1) {
            QInt pi2 = *classify_prime(K, 2).pi;
            detail::substitute_scale(H, QInt(K, 1L), pi2);
            H.normalization = "z -> z/pi2";
            // expected shapes: d^2 + eps(p+q) d z^2 + z^4, resp. d^2 - eps(p+q) i d z^2 - z^4
            QInt c2 = K.D == -2 ? d.rep * s : d.rep * QInt::w(K) * mpz_class(-s);
            QInt c4 = K.D == -2 ? QInt(K, 1L) : QInt(K, -1L);
            if (H.c2 != c2 || H.c4 != c4)
                throw std::logic_error("hom_space: normalized C_d does not have the expected shape");
        }
    } else {
        H.kind = SpaceKind::CPrime;
        H.c2 = d.rep * s;
        H.c4 = QInt(K, curve.b());
        if (K.D == -1) {
            detail::substitute_scale(H, QInt::w(K), QInt(K, 1L));
            H.normalization = "z -> i z";
            if (H.c2 != d.rep * mpz_class(-s) || H.c4 != QInt(K, curve.b()))
                throw std::logic_error("hom_space: normalized C'_d does not have the expected shape");
        }
    }
    return H;
}

// Pure valuation rejection at one place.
inline std::optional<Verdict> membership_prescreen(const SelmerClass& d, const CurveSpec& curve, Direction dir,
                                                   const LocalField& L)
{
    if (d.exps == 0)
        return std::nullopt;
    return valuation_prescreen(hom_space(d, curve, dir), L);
}

inline std::vector<SelmerClass> known_members(const KS2& ks, const CurveSpec& curve, Direction dir)
{
    const QuadField& K = curve.field();
    std::vector<SelmerClass> out{make_class(ks, 0)};
    if (dir == Direction::PhiHat) {
        // images of the 2-torsion of E: (-eps p, 0) -> -eps p, (-eps q, 0) -> -eps q, (0,0) -> p q
        for (QInt x : {QInt(K, -curve.eps * curve.p), QInt(K, -curve.eps * curve.q), QInt(K, curve.p * curve.q)}) {
            auto c = ks.class_of(x);
            if (!c)
                throw std::logic_error("known_members: torsion image outside K(S,2)");
            out.push_back(make_class(ks, *c));
        }
    }
    return out;
}

struct ClassRecord {
    f2::Vec exps = 0;
    QInt rep;
    HomSpace space;
    bool member = false;
    std::vector<Verdict> verdicts; // places in S order, stopping at the first rejection
    bool prescreen_rejected = false;
    bool prescreen_sound = true;   // full search agreed with the prescreen
};

struct SelmerGroup {
    Direction dir = Direction::Phi;
    std::vector<f2::Vec> basis;
    std::vector<f2::Vec> members;
    std::vector<ClassRecord> grid;

    int dim() const { return static_cast<int>(basis.size()); }
    bool contains(f2::Vec v) const { return std::binary_search(members.begin(), members.end(), v); }

    bool closed() const
    {
        for (f2::Vec a : members)
            for (f2::Vec b : members)
                if (!contains(a ^ b))
                    return false;
        return contains(0);
    }
};

class UndecidedError : public std::runtime_error {
public:
    f2::Vec exps;
    std::string place;
    UndecidedError(const std::string& cls, f2::Vec e, const std::string& pl)
        : std::runtime_error("undecided local solvability for class " + cls + " at place " + pl), exps(e), place(pl)
    {
    }
};

// With stop_at_first the evaluation ends at the first place where the space has no point;
// otherwise every place is decided (used when explaining a single class).
inline ClassRecord decide_class(const KS2& ks, const CurveSpec& curve, Direction dir, f2::Vec exps,
                                const SearchPolicy& policy, bool stop_at_first = true)
{
    ClassRecord rec;
    rec.exps = exps;
    rec.rep = ks.rep(exps);
    SelmerClass cls{exps, rec.rep};
    rec.space = hom_space(cls, curve, dir);
    for (const auto& L : ks.places) {
        auto pre = exps == 0 ? std::nullopt : valuation_prescreen(rec.space, L);
        if (pre) {
            rec.prescreen_rejected = true;
            if (policy.verify_prescreen) {
                Verdict full = quartic_locally_solvable(rec.space, L, policy);
                rec.prescreen_sound = full.insolvable();
                pre->nodes = full.nodes;
                pre->depth = full.depth;
            }
            rec.verdicts.push_back(*pre);
            rec.member = false;
            if (stop_at_first)
                return rec;
            continue;
        }
        Verdict v = quartic_locally_solvable(rec.space, L, policy);
        if (v.kind == VerdictKind::Undecided)
            throw UndecidedError(ks.label(exps), exps, L.label);
        rec.verdicts.push_back(v);
        if (v.insolvable()) {
            rec.member = false;
            if (stop_at_first)
                return rec;
        }
    }
    rec.verdicts.push_back(archimedean_verdict());
    rec.member = std::all_of(rec.verdicts.begin(), rec.verdicts.end(), [](const Verdict& v) { return v.solvable(); });
    return rec;
}

inline SelmerGroup selmer_group(const KS2& ks, const CurveSpec& curve, Direction dir, const SearchPolicy& policy = {})
{
    SelmerGroup G;
    G.dir = dir;
    for (f2::Vec e = 0; e < ks.count(); ++e) {
        G.grid.push_back(decide_class(ks, curve, dir, e, policy));
        if (G.grid.back().member)
            G.members.push_back(e);
    }
    G.basis = f2::echelon(G.members);
    return G;
}

inline SelmerGroup selmer_group(const CurveSpec& curve, Direction dir, const SearchPolicy& policy = {})
{
    KS2 ks(curve.field(), curve.p, curve.q);
    return selmer_group(ks, curve, dir, policy);
}

// Does complex conjugation map the member set to itself?
inline bool conjugation_stable(const KS2& ks, const SelmerGroup& G)
{
    for (f2::Vec m : G.members) {
        auto c = ks.class_of(ks.rep(m).conj());
        if (!c || !G.contains(*c))
            return false;
    }
    return true;
}

} // namespace twodescent
