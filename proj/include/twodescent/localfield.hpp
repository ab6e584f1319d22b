#pragma once

// Completions K_v at finite places: valuations, residue maps, square classes,
// finite-precision elements and Hensel lifting.

#include "finite_field.hpp"
#include "qfield.hpp"

#include <array>
#include <climits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twodescent {

constexpr int kInfiniteValuation = INT_MAX;

// A finite place of K, i.e. the completion K_v together with the conventions
// used to embed K into it.
class LocalField {
public:
    const QuadField* K = nullptr;
    QInt pi;        // uniformizer, v(pi) = 1
    long ell = 0;   // residue characteristic
    int e = 1;      // ramification index
    int f = 1;      // residue degree
    SplitKind kind = SplitKind::Inert;
    std::string label;
    FiniteField residue;          // O_v / pi
    std::vector<QInt> residue_reps; // lifts in enumeration order

    static constexpr int kRootDigits = 128;

    LocalField(const QuadField& field, const FinitePlace& place) : LocalField(field, place.pi, place.ell, place.kind, place.label) {}

    LocalField(const QuadField& field, QInt uniformizer, long ell_, SplitKind kind_, std::string label_ = "")
        : K(&field), pi(std::move(uniformizer)), ell(ell_), kind(kind_), label(std::move(label_))
    {
        e = kind == SplitKind::Ramified ? 2 : 1;
        f = kind == SplitKind::Inert ? 2 : 1;
        if (kind == SplitKind::Ramified && ell != 2)
            throw std::invalid_argument("LocalField: odd ramified places are not supported");
        if (label.empty())
            label = pi.str();
        if (kind == SplitKind::Split) {
            pi_bar_ = pi.conj();
            root_ = split_root(kRootDigits);
            have_root_ = true;
            mpz_class r1 = root_ % mpz_class(ell);
            root_small_ = r1.get_si();
            residue = FiniteField(ell, 1);
            for (long i = 0; i < ell; ++i)
                residue_reps.emplace_back(field, i);
        } else if (kind == SplitKind::Inert) {
            residue = FiniteField(ell, 2, field.trace_w, field.norm_w);
            for (long i = 0; i < ell * ell; ++i)
                residue_reps.emplace_back(field, i % ell, i / ell);
        } else {
            residue = FiniteField(2, 1);
            residue_reps = {QInt(field, 0L), QInt(field, 1L)};
        }
        if (ell == 2)
            build_square_table();
    }

    const QuadField& field() const { return *K; }
    int v_of_2() const { return ell == 2 ? e : 0; }
    std::size_t residue_size() const { return residue_reps.size(); }

    // Root r of x^2 - t x + n in Z_ell with w -> r realising this place, mod ell^digits.
    mpz_class split_root(int digits) const
    {
        if (kind != SplitKind::Split)
            throw std::logic_error("split_root: place is not split");
        if (digits <= kRootDigits && have_root_) {
            mpz_class m;
            mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(digits));
            return mpz_class(root_ % m);
        }
        // pi = a + b w maps to 0 mod ell, so r = -a / b mod ell
        mpz_class ellz(ell), r;
        mpz_class binv;
        if (mpz_invert(binv.get_mpz_t(), mpz_class(pi.b % ellz).get_mpz_t(), ellz.get_mpz_t()) == 0)
            throw std::logic_error("split_root: uniformizer has b = 0 mod ell");
        r = mpz_class(-pi.a * binv) % ellz;
        if (r < 0)
            r += ellz;
        // Hensel: f(x) = x^2 - t x + n, f'(r) is a unit because ell is unramified and split
        mpz_class mod = ellz;
        int have = 1;
        while (have < digits) {
            have = std::min(2 * have, digits);
            mpz_ui_pow_ui(mod.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(have));
            mpz_class fx = r * r - K->trace_w * r + K->norm_w;
            mpz_class fp = 2 * r - K->trace_w, fpinv;
            if (mpz_invert(fpinv.get_mpz_t(), fp.get_mpz_t(), mod.get_mpz_t()) == 0)
                throw std::logic_error("split_root: derivative not invertible");
            r = mpz_class(r - fx * fpinv) % mod;
            if (r < 0)
                r += mod;
        }
        return r;
    }

    // Image of x in Z_ell mod ell^digits (split places only).
    mpz_class embed_integer(const QInt& x, int digits) const
    {
        mpz_class m;
        mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(digits));
        mpz_class r = mpz_class(x.a + x.b * split_root(digits)) % m;
        if (r < 0)
            r += m;
        return r;
    }

    // Exact valuation of a global element (kInfiniteValuation for 0).
    int valuation(const QInt& x) const
    {
        if (x.is_zero())
            return kInfiniteValuation;
        switch (kind) {
        case SplitKind::Inert: {
            mpz_class ellz(ell);
            int va = x.a == 0 ? INT_MAX : static_cast<int>(mpz_remove(mpz_class().get_mpz_t(), x.a.get_mpz_t(), ellz.get_mpz_t()));
            int vb = x.b == 0 ? INT_MAX : static_cast<int>(mpz_remove(mpz_class().get_mpz_t(), x.b.get_mpz_t(), ellz.get_mpz_t()));
            return std::min(va, vb);
        }
        case SplitKind::Ramified: {
            mpz_class n = x.norm();
            return static_cast<int>(mpz_scan1(n.get_mpz_t(), 0));
        }
        case SplitKind::Split: {
            mpz_class img = x.a + x.b * root_;
            if (img != 0) {
                mpz_class rest;
                int v = static_cast<int>(mpz_remove(rest.get_mpz_t(), img.get_mpz_t(), mpz_class(ell).get_mpz_t()));
                if (v < kRootDigits)
                    return v;
            }
            // valuation beyond the cached precision: divide out pi exactly
            int v = 0;
            QInt y = x;
            while (true) {
                auto q = divide_by_pi(y);
                if (!q)
                    return v;
                y = std::move(*q);
                ++v;
            }
        }
        }
        return 0;
    }

    // y / pi when pi | y, computed as y * conj(pi) / ell at split places.
    std::optional<QInt> divide_by_pi(const QInt& y) const
    {
        if (kind == SplitKind::Inert) {
            if (y.a % ell != 0 || y.b % ell != 0)
                return std::nullopt;
            return QInt(*K, mpz_class(y.a / ell), mpz_class(y.b / ell));
        }
        return y.divide(pi);
    }

    QInt divide_by_pi_power(QInt y, int k) const
    {
        for (int i = 0; i < k; ++i) {
            auto q = divide_by_pi(y);
            if (!q)
                throw std::domain_error("divide_by_pi_power: not divisible at " + label);
            y = std::move(*q);
        }
        return y;
    }

    // Residue of an integral element in O_v / pi.
    Fq reduce(const QInt& x) const
    {
        switch (kind) {
        case SplitKind::Split: {
            long a = mpz_fdiv_ui(x.a.get_mpz_t(), static_cast<unsigned long>(ell));
            long b = mpz_fdiv_ui(x.b.get_mpz_t(), static_cast<unsigned long>(ell));
            return residue.from_int(a + static_cast<std::int64_t>(b) * root_small_ % ell);
        }
        case SplitKind::Inert: {
            long a = mpz_fdiv_ui(x.a.get_mpz_t(), static_cast<unsigned long>(ell));
            long b = mpz_fdiv_ui(x.b.get_mpz_t(), static_cast<unsigned long>(ell));
            return residue.make(a, b);
        }
        case SplitKind::Ramified:
            return residue.from_int(valuation(x) == 0 ? 1 : 0);
        }
        return {};
    }

    // x / pi^k inside the representation used by LocalElem (integers at split places)
    QInt divide_local(const QInt& x, int k) const
    {
        if (kind != SplitKind::Split)
            return divide_by_pi_power(x, k);
        mpz_class m;
        mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(k));
        if (x.b != 0 || !mpz_divisible_p(x.a.get_mpz_t(), m.get_mpz_t()))
            throw std::domain_error("divide_local: not divisible at " + label);
        return QInt(*K, mpz_class(x.a / m), 0L);
    }

    // pi^k in the LocalElem representation
    QInt uniformizer_power_local(int k) const
    {
        if (kind != SplitKind::Split)
            return pi.pow(static_cast<unsigned>(k));
        mpz_class m;
        mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(k));
        return QInt(*K, m, 0L);
    }

    QInt lift(const Fq& r) const
    {
        if (kind == SplitKind::Inert)
            return QInt(*K, r.x, r.y);
        return QInt(*K, r.x);
    }

    // Unit part x / pi^v(x).
    QInt unit_part(const QInt& x, int v) const { return divide_by_pi_power(x, v); }

    // x in (K_v^*)^2 for nonzero global x.
    bool is_square(const QInt& x) const
    {
        int v = valuation(x);
        if (v == kInfiniteValuation)
            throw std::domain_error("is_square: zero element");
        if (v % 2 != 0)
            return false;
        if (kind == SplitKind::Split && v + 4 <= kRootDigits) {
            mpz_class m;
            mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(v + 3));
            mpz_class img = mpz_class(x.a + x.b * root_) % m;
            if (img < 0)
                img += m;
            mpz_class ellv;
            mpz_ui_pow_ui(ellv.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(v));
            mpz_class u = img / ellv;
            return unit_integer_is_square(u);
        }
        return unit_is_square(unit_part(x, v));
    }

    // Square test for a unit of O_v.
    bool unit_is_square(const QInt& u) const
    {
        if (ell != 2)
            return residue.chi(reduce(u)) == 1;
        if (kind == SplitKind::Split)
            return unit_integer_is_square(mpz_class(u.a + u.b * root_));
        long a = mpz_fdiv_ui(u.a.get_mpz_t(), 8), b = mpz_fdiv_ui(u.b.get_mpz_t(), 8);
        return square_table_[a * 8 + b];
    }

    // Representatives s mod 8 (coordinates) that are square roots of u to the Hensel threshold.
    std::optional<QInt> square_root_seed(const QInt& u) const
    {
        if (ell != 2) {
            auto s = residue.sqrt(reduce(u));
            if (!s || residue.is_zero(*s))
                return std::nullopt;
            return lift(*s);
        }
        if (kind == SplitKind::Split) {
            mpz_class img = mpz_class(u.a + u.b * root_) % 8;
            if (img < 0)
                img += 8;
            return img % 8 == 1 ? std::optional<QInt>(QInt(*K, 1L)) : std::nullopt;
        }
        for (long sa = 0; sa < 8; ++sa)
            for (long sb = 0; sb < 8; ++sb) {
                QInt s(*K, sa, sb);
                if (valuation(s) != 0)
                    continue;
                QInt diff = s * s - u;
                if (valuation(diff) >= 2 * e + 1)
                    return s;
            }
        return std::nullopt;
    }

    // modulus ell^k (or 2^ceil(N/2) at the ramified place) making "mod pi^N" exact
    mpz_class modulus_for(int N) const
    {
        int k = kind == SplitKind::Ramified ? (N + 1) / 2 : N;
        mpz_class m;
        mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(std::max(k, 0)));
        return m;
    }

    bool operator==(const LocalField& o) const { return K == o.K && ell == o.ell && pi == o.pi; }

private:
    QInt pi_bar_;
    mpz_class root_ = 0;
    bool have_root_ = false;
    long root_small_ = 0;
    std::array<bool, 64> square_table_{};

    bool unit_integer_is_square(const mpz_class& u) const
    {
        if (ell == 2)
            return mpz_fdiv_ui(u.get_mpz_t(), 8) == 1;
        long r = mpz_fdiv_ui(u.get_mpz_t(), static_cast<unsigned long>(ell));
        return residue.chi(residue.from_int(r)) == 1;
    }

    void build_square_table()
    {
        if (kind == SplitKind::Split)
            return;
        // u is a square iff u = s^2 mod pi^(2e+1) for some unit s; 8 = pi^(3e) suffices
        for (long a = 0; a < 8; ++a)
            for (long b = 0; b < 8; ++b) {
                QInt u(*K, a, b);
                bool sq = false;
                if (valuation(u) == 0) {
                    for (long sa = 0; sa < 8 && !sq; ++sa)
                        for (long sb = 0; sb < 8 && !sq; ++sb) {
                            QInt s(*K, sa, sb);
                            if (valuation(s) != 0)
                                continue;
                            sq = valuation(s * s - u) >= 2 * e + 1;
                        }
                }
                square_table_[a * 8 + b] = sq;
            }
    }
};

// Finite-precision element of O_v: a global representative known modulo pi^prec.
class LocalElem {
public:
    const LocalField* F = nullptr;
    QInt rep;  // split places: rational integer image; otherwise omega-basis coordinates
    int prec = 0;

    LocalElem() = default;
    LocalElem(const LocalField& field, QInt r, int N) : F(&field), rep(std::move(r)), prec(N) { normalize(); }

    // nullopt when indistinguishable from zero at this precision
    std::optional<int> val() const
    {
        int v = F->valuation(rep);
        if (v >= prec)
            return std::nullopt;
        return v;
    }
    int val_or_prec() const { return val().value_or(prec); }
    bool is_zero() const { return !val().has_value(); }

    LocalElem with_prec(int N) const
    {
        if (N > prec)
            throw std::domain_error("LocalElem: cannot raise precision");
        return LocalElem(*F, rep, N);
    }

    friend LocalElem operator+(const LocalElem& x, const LocalElem& y)
    {
        check_same(x, y);
        return LocalElem(*x.F, x.rep + y.rep, std::min(x.prec, y.prec));
    }
    friend LocalElem operator-(const LocalElem& x, const LocalElem& y)
    {
        check_same(x, y);
        return LocalElem(*x.F, x.rep - y.rep, std::min(x.prec, y.prec));
    }
    friend LocalElem operator*(const LocalElem& x, const LocalElem& y)
    {
        check_same(x, y);
        int N = std::min(x.prec + y.val_or_prec(), y.prec + x.val_or_prec());
        return LocalElem(*x.F, x.rep * y.rep, N);
    }
    LocalElem operator-() const { return LocalElem(*F, -rep, prec); }

    // x / y for v(y) known and v(x) >= v(y); loses v(y) digits of precision.
    friend LocalElem operator/(const LocalElem& x, const LocalElem& y)
    {
        check_same(x, y);
        auto vy = y.val();
        if (!vy)
            throw std::domain_error("LocalElem: division by an element indistinguishable from zero");
        int k = *vy;
        int vx = x.val_or_prec();
        if (vx < k)
            throw std::domain_error("LocalElem: quotient is not integral");
        int N = std::min(x.prec - k, y.prec - 2 * k + vx);
        if (N <= 0)
            throw std::domain_error("LocalElem: insufficient precision for division");
        const LocalField& L = *x.F;
        QInt num = L.divide_local(x.rep_for_division(k), k);
        QInt den = L.divide_local(y.rep, k);
        return LocalElem(L, num * unit_inverse(L, den, N), N);
    }

    bool is_square() const
    {
        auto v = val();
        if (!v)
            throw std::domain_error("is_square: valuation unknown at this precision");
        if (prec < *v + 2 * F->v_of_2() + 1)
            throw std::domain_error("is_square: insufficient precision; need " +
                                    std::to_string(*v + 2 * F->v_of_2() + 1) + " digits");
        return F->is_square(rep);
    }

    std::string str() const
    {
        auto v = val();
        return rep.str() + " + O(pi^" + std::to_string(prec) + ")" +
               (v ? " [v=" + std::to_string(*v) + "]" : " [v=inf]");
    }

private:
    static void check_same(const LocalElem& x, const LocalElem& y)
    {
        if (x.F != y.F && !(*x.F == *y.F))
            throw std::invalid_argument("LocalElem: elements of different completions");
    }

    // Representative with exact divisibility by pi^k (zero when below precision).
    QInt rep_for_division(int k) const
    {
        if (F->valuation(rep) >= k)
            return rep;
        throw std::domain_error("LocalElem: representative not divisible");
    }

    void normalize()
    {
        if (prec < 0)
            throw std::domain_error("LocalElem: negative precision");
        mpz_class m = F->modulus_for(prec);
        if (F->kind == SplitKind::Split && rep.b != 0)
            rep = QInt(*F->K, F->embed_integer(rep, std::max(prec, 1)), 0L);
        mpz_class a = rep.a % m, b = rep.b % m;
        if (a < 0)
            a += m;
        if (b < 0)
            b += m;
        rep = QInt(*F->K, a, b);
    }

    // Inverse of a unit modulo pi^N.
    static QInt unit_inverse(const LocalField& L, const QInt& u, int N)
    {
        mpz_class m = L.modulus_for(N);
        if (L.kind == SplitKind::Split) {
            mpz_class inv;
            if (mpz_invert(inv.get_mpz_t(), u.a.get_mpz_t(), m.get_mpz_t()) == 0 && m != 1)
                throw std::domain_error("LocalElem: not a unit");
            return QInt(*L.K, inv, 0L);
        }
        mpz_class n = u.norm(), ninv;
        if (mpz_invert(ninv.get_mpz_t(), n.get_mpz_t(), m.get_mpz_t()) == 0 && m != 1)
            throw std::domain_error("LocalElem: not a unit");
        return u.conj() * ninv;
    }
};

inline LocalElem embed(const QInt& x, const LocalField& L, int N)
{
    if (N < 1)
        throw std::invalid_argument("embed: precision must be positive");
    return LocalElem(L, x, N);
}

// Square root of x in O_v to precision N (x must be a nonzero square).
// The result may carry less precision when x itself is not known well enough.
inline LocalElem local_sqrt(const LocalElem& x, int N)
{
    const LocalField& L = *x.F;
    auto v = x.val();
    if (!v)
        throw std::domain_error("local_sqrt: zero or unknown valuation");
    if (!x.is_square())
        throw std::domain_error("local_sqrt: not a square");
    int h = *v / 2;
    int e2 = L.v_of_2();
    int W = x.prec - *v;
    int need = std::min(W, N - h + e2);
    LocalElem U(L, L.divide_local(x.rep, *v), W);
    auto seed = L.square_root_seed(U.rep);
    if (!seed)
        throw std::logic_error("local_sqrt: no residue square root");
    LocalElem s(L, *seed, W);
    LocalElem two(L, QInt(*L.K, 2L), W);
    int reached = 0;
    for (int iter = 0; iter < 400; ++iter) {
        LocalElem r = s * s - U;
        reached = r.val_or_prec();
        if (reached >= need)
            break;
        LocalElem step = r / (two * s);
        s = LocalElem(L, s.rep - step.rep, W);
    }
    // v(s - sqrt(u)) = v(s^2 - u) - v(2)
    int got = std::min(reached, W) - e2;
    if (got <= 0)
        throw std::domain_error("local_sqrt: insufficient precision");
    return LocalElem(L, s.rep * L.uniformizer_power_local(h), std::min(N, got + h));
}

// c * z^i * w^j terms.
struct BivariatePoly {
    struct Term {
        int i;
        int j;
        QInt c;
    };
    std::vector<Term> terms;

    QInt eval(const QInt& z, const QInt& w) const
    {
        QInt acc(*terms.front().c.K, 0L);
        for (const auto& t : terms)
            acc += t.c * z.pow(t.i) * w.pow(t.j);
        return acc;
    }
    BivariatePoly dw() const
    {
        BivariatePoly d;
        for (const auto& t : terms)
            if (t.j > 0)
                d.terms.push_back({t.i, t.j - 1, t.c * mpz_class(t.j)});
        return d;
    }
};

enum class Chart { Affine, Reciprocal };

inline const char* to_string(Chart c) { return c == Chart::Affine ? "affine" : "reciprocal"; }

struct HenselCertificate {
    Chart chart = Chart::Affine;
    QInt z0;
    QInt w0;
    std::optional<int> fval; // nullopt: f(z0, w0) = 0 exactly
    std::optional<int> dval;

    bool exact() const { return !fval.has_value(); }
    bool valid() const { return !fval || (dval && *fval > 2 * *dval); }
};

// Certificate for f at (z0, w0) at the place L, valuations computed exactly.
inline HenselCertificate make_certificate(const BivariatePoly& f, const LocalField& L, Chart chart, const QInt& z0,
                                          const QInt& w0)
{
    HenselCertificate c;
    c.chart = chart;
    c.z0 = z0;
    c.w0 = w0;
    QInt fv = f.eval(z0, w0);
    QInt dv = f.dw().terms.empty() ? QInt(L.field(), 0L) : f.dw().eval(z0, w0);
    int vf = L.valuation(fv), vd = L.valuation(dv);
    c.fval = vf == kInfiniteValuation ? std::nullopt : std::optional<int>(vf);
    c.dval = vd == kInfiniteValuation ? std::nullopt : std::optional<int>(vd);
    return c;
}

// Newton iteration in w with z fixed; returns (z, w) with v(f(z, w)) >= N.
inline std::pair<LocalElem, LocalElem> hensel_lift(const BivariatePoly& f, const LocalField& L,
                                                   const HenselCertificate& cert, int N)
{
    HenselCertificate recheck = make_certificate(f, L, cert.chart, cert.z0, cert.w0);
    if (!recheck.valid() || recheck.fval != cert.fval || recheck.dval != cert.dval)
        throw std::domain_error("hensel_lift: certificate does not satisfy v(f) > 2 v(f_w)");
    int work = N + 2 * (recheck.dval.value_or(0)) + 4;
    LocalElem z(L, cert.z0, work);
    if (recheck.exact())
        return {z, LocalElem(L, cert.w0, work)};
    int dval = *recheck.dval;
    BivariatePoly fw = f.dw();
    QInt w = cert.w0;
    for (int iter = 0; iter < 200; ++iter) {
        QInt fv = f.eval(cert.z0, w);
        int vf = L.valuation(fv);
        if (vf >= N)
            return {z, LocalElem(L, w, std::max(1, vf - dval))};
        LocalElem num(L, fv, work + dval);
        LocalElem den(L, fw.eval(cert.z0, w), work + dval);
        LocalElem step = num / den;
        w = w - (L.kind == SplitKind::Split ? QInt(L.field(), step.rep.a, 0L) : step.rep);
        if (L.kind == SplitKind::Split)
            w = QInt(L.field(), L.embed_integer(w, work + dval), 0L);
        else {
            mpz_class m = L.modulus_for(work + dval);
            w = QInt(L.field(), mpz_class(w.a % m), mpz_class(w.b % m));
        }
    }
    throw std::logic_error("hensel_lift: Newton iteration did not converge");
}

} // namespace twodescent
