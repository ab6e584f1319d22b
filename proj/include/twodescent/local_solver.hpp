#pragma once

// Deciding whether d*w^2 = F(z) has a point over a completion K_v.
//
// A point exists iff G(z) = d*F(z) is a square (or zero) for some z in O_v,
// or G*(z1) = d*z1^4*F(1/z1) is for some z1 in pi*O_v. Both charts are searched
// by recursive splitting of residue discs z = c + pi^n s. A disc is dropped as
// soon as the valuations of the node polynomial pin down the square class of
// every value on it.

#include "finite_field.hpp"
#include "homspace.hpp"
#include "localfield.hpp"
#include "qfield.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twodescent {

struct SearchPolicy {
    int depth = 0;        // 0: use the per-quartic bound
    int prec = 0;         // 0: max(2B, 40)
    bool verify_prescreen = true;
    long height = 10000;  // point search bound
    int jobs = 1;
};

enum class VerdictKind { Solvable, Insolvable, Undecided };

inline const char* to_string(VerdictKind k)
{
    switch (k) {
    case VerdictKind::Solvable: return "solvable";
    case VerdictKind::Insolvable: return "insolvable";
    case VerdictKind::Undecided: return "undecided";
    }
    return "?";
}

struct Verdict {
    VerdictKind kind = VerdictKind::Undecided;
    std::optional<HenselCertificate> cert;
    int bound = 0;            // depth bound B in force
    int depth = 0;            // deepest refuted disc (Insolvable), or disc of the witness
    long nodes = 0;
    bool by_prescreen = false;
    bool archimedean = false;
    std::string place;

    bool solvable() const { return kind == VerdictKind::Solvable; }
    bool insolvable() const { return kind == VerdictKind::Insolvable; }
};

// B = v(2^4 disc_z) + 2e + 2
inline int depth_bound(const HomSpace& H, const LocalField& L)
{
    QInt disc = H.discriminant();
    if (disc.is_zero())
        throw std::domain_error("depth_bound: degenerate quartic " + H.str());
    return L.valuation(disc * mpz_class(16)) + 2 * L.e + 2;
}

inline int default_precision(int bound) { return std::max(2 * bound, 40); }

// The curve W^2 = d F(z) (W = d w) in the given chart, as a bivariate polynomial.
inline BivariatePoly scaled_model(const HomSpace& H, Chart chart)
{
    const QuadField& K = H.field();
    BivariatePoly f;
    const QInt& a0 = chart == Chart::Affine ? H.c0 : H.c4;
    const QInt& a4 = chart == Chart::Affine ? H.c4 : H.c0;
    f.terms.push_back({0, 2, QInt(K, 1L)});
    f.terms.push_back({0, 0, -(H.d * a0)});
    f.terms.push_back({2, 0, -(H.d * H.c2)});
    f.terms.push_back({4, 0, -(H.d * a4)});
    return f;
}

// Re-derives fval and dval from the stored point and checks the lifting criterion.
inline bool verify_certificate(const HomSpace& H, const LocalField& L, const HenselCertificate& cert)
{
    if (cert.chart == Chart::Reciprocal && L.valuation(cert.z0) < 1)
        return false;
    HenselCertificate again = make_certificate(scaled_model(H, cert.chart), L, cert.chart, cert.z0, cert.w0);
    return again.valid() && again.fval == cert.fval && again.dval == cert.dval;
}

namespace detail {

using NodePoly = std::array<QInt, 5>;

struct SearchOutcome {
    VerdictKind kind = VerdictKind::Insolvable;
    QInt z0;
    int depth = 0;
};

class DiscSearch {
public:
    DiscSearch(const LocalField& L, int bound) : L_(L), bound_(bound), e2_(L.v_of_2())
    {
        const QuadField& K = L.field();
        step_ = L.kind == SplitKind::Ramified ? L.pi : QInt(K, L.ell);
    }

    long nodes() const { return nodes_; }
    const QInt& step() const { return step_; }

    SearchOutcome run(NodePoly h, QInt center, int n)
    {
        ++nodes_;
        if (h[0].is_zero())
            return {VerdictKind::Solvable, center, n};

        int lambda = L_.valuation(h[0]);
        int mu = kInfiniteValuation;
        for (int i = 1; i <= 4; ++i)
            mu = std::min(mu, L_.valuation(h[i]));

        int m = std::min(lambda, mu);
        if (m >= 2) {
            int k = m / 2;
            for (auto& c : h)
                if (!c.is_zero())
                    c = L_.divide_by_pi_power(c, 2 * k);
            lambda -= 2 * k;
            if (mu != kInfiniteValuation)
                mu -= 2 * k;
            m -= 2 * k;
        }

        if (lambda % 2 == 0 && L_.is_square(h[0]))
            return {VerdictKind::Solvable, center, n};
        if (mu > lambda && lambda % 2 != 0)
            return {VerdictKind::Insolvable, center, n};
        // every value on the disc lies in the square class of h0
        if (mu == kInfiniteValuation || mu >= lambda + 2 * e2_ + 1)
            return {VerdictKind::Insolvable, center, n};

        if (n + 1 > bound_)
            return {VerdictKind::Undecided, center, n};

        std::vector<QInt> children;
        if (L_.ell == 2) {
            children = L_.residue_reps;
        } else {
            const FiniteField& k = L_.residue;
            FqPoly hb(5);
            if (m == 1) {
                for (int i = 0; i <= 4; ++i)
                    hb[i] = h[i].is_zero() ? k.zero() : L_.reduce(*L_.divide_by_pi(h[i]));
            } else {
                for (int i = 0; i <= 4; ++i)
                    hb[i] = L_.reduce(h[i]);
            }
            fqpoly::trim(k, hb);
            std::vector<Fq> cand;
            if (m == 1) {
                cand = fqpoly::roots(k, hb);
            } else {
                auto cg = fqpoly::constant_times_square(k, hb);
                if (cg) {
                    if (k.chi(cg->first) == 1) {
                        for (std::int64_t i = 0; i < k.order(); ++i) {
                            Fq r = k.element(i);
                            if (!k.is_zero(fqpoly::eval(k, cg->second, r)))
                                return {VerdictKind::Solvable, center + power(n) * L_.lift(r), n + 1};
                        }
                    }
                    cand = fqpoly::roots(k, cg->second);
                } else {
                    for (std::int64_t i = 0; i < k.order(); ++i) {
                        Fq r = k.element(i);
                        if (k.chi(fqpoly::eval(k, hb, r)) == 1)
                            return {VerdictKind::Solvable, center + power(n) * L_.lift(r), n + 1};
                    }
                    cand = fqpoly::roots(k, hb);
                }
            }
            for (const auto& r : cand)
                children.push_back(L_.lift(r));
        }

        bool undecided = false;
        int deepest = n;
        for (const auto& rho : children) {
            NodePoly child = shift(h, rho);
            SearchOutcome o = run(std::move(child), center + power(n) * rho, n + 1);
            if (o.kind == VerdictKind::Solvable)
                return o;
            if (o.kind == VerdictKind::Undecided)
                undecided = true;
            else
                deepest = std::max(deepest, o.depth);
        }
        if (undecided)
            return {VerdictKind::Undecided, center, deepest};
        return {VerdictKind::Insolvable, center, deepest};
    }

    QInt power(int n)
    {
        while (static_cast<int>(powers_.size()) <= n)
            powers_.push_back(powers_.empty() ? QInt(L_.field(), 1L) : powers_.back() * step_);
        return powers_[n];
    }

private:
    const LocalField& L_;
    int bound_;
    int e2_;
    QInt step_;
    long nodes_ = 0;
    std::vector<QInt> powers_;

    // H(rho + step * s)
    NodePoly shift(const NodePoly& h, const QInt& rho) const
    {
        static const int binom[5][5] = {{1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
        const QuadField& K = L_.field();
        NodePoly g;
        if (rho.is_zero()) {
            g = h;
        } else {
            std::array<QInt, 5> rp;
            rp[0] = QInt(K, 1L);
            for (int i = 1; i <= 4; ++i)
                rp[i] = rp[i - 1] * rho;
            for (int j = 0; j <= 4; ++j) {
                QInt acc(K, 0L);
                for (int i = j; i <= 4; ++i)
                    if (!h[i].is_zero())
                        acc += h[i] * rp[i - j] * mpz_class(binom[i][j]);
                g[j] = std::move(acc);
            }
        }
        QInt sp(K, 1L);
        for (int j = 1; j <= 4; ++j) {
            sp *= step_;
            g[j] *= sp;
        }
        return g;
    }
};

inline std::optional<HenselCertificate> build_certificate(const HomSpace& H, const LocalField& L, Chart chart,
                                                          const QInt& z0, int prec)
{
    QInt G = H.d * (chart == Chart::Affine ? H.rhs(z0) : H.rhs_reciprocal(z0));
    BivariatePoly f = scaled_model(H, chart);
    const QuadField& K = H.field();
    if (G.is_zero())
        return make_certificate(f, L, chart, z0, QInt(K, 0L));
    int lam = L.valuation(G);
    int e2 = L.v_of_2();
    int P = std::max(prec, lam + 4 * e2 + 16);
    for (int attempt = 0; attempt < 8; ++attempt, P *= 2) {
        LocalElem g = embed(G, L, P);
        LocalElem s = local_sqrt(g, lam / 2 + 2 * e2 + 4 + attempt * 8);
        HenselCertificate c = make_certificate(f, L, chart, z0, s.rep);
        if (c.valid())
            return c;
    }
    return std::nullopt;
}

} // namespace detail

// Local solvability of H at the finite place L.
inline Verdict quartic_locally_solvable(const HomSpace& H, const LocalField& L, const SearchPolicy& policy = {})
{
    Verdict out;
    out.place = L.label;
    out.bound = policy.depth > 0 ? policy.depth : depth_bound(H, L);
    int prec = policy.prec > 0 ? policy.prec : default_precision(out.bound);

    detail::DiscSearch search(L, out.bound);
    const QuadField& K = H.field();
    QInt zero(K, 0L);

    // affine chart: z in O_v
    detail::NodePoly ha{H.d * H.c0, zero, H.d * H.c2, zero, H.d * H.c4};
    detail::SearchOutcome a = search.run(ha, zero, 0);
    detail::SearchOutcome r;
    Chart chart = Chart::Affine;
    if (a.kind != VerdictKind::Solvable) {
        // reciprocal chart: z1 in pi O_v, written z1 = step * s
        QInt st = search.step();
        QInt st2 = st * st;
        detail::NodePoly hr{H.d * H.c4, zero, H.d * H.c2 * st2, zero, H.d * H.c0 * st2 * st2};
        r = search.run(hr, zero, 1);
        chart = Chart::Reciprocal;
    }
    out.nodes = search.nodes();
    const detail::SearchOutcome& hit = a.kind == VerdictKind::Solvable ? a : r;
    if (hit.kind == VerdictKind::Solvable) {
        auto cert = detail::build_certificate(H, L, chart, hit.z0, prec);
        if (!cert)
            throw std::logic_error("quartic_locally_solvable: could not certify witness at " + L.label);
        out.kind = VerdictKind::Solvable;
        out.cert = std::move(cert);
        out.depth = hit.depth;
        return out;
    }
    if (a.kind == VerdictKind::Undecided || r.kind == VerdictKind::Undecided) {
        out.kind = VerdictKind::Undecided;
        out.depth = out.bound;
        return out;
    }
    out.kind = VerdictKind::Insolvable;
    out.depth = std::max(a.depth, r.depth);
    return out;
}

// Archimedean place: K_v = C, always solvable.
inline Verdict archimedean_verdict()
{
    Verdict v;
    v.kind = VerdictKind::Solvable;
    v.archimedean = true;
    v.place = "inf";
    return v;
}

// Valuation-parity rejection: if for every v(z) the three terms of d F(z)
// have a unique minimal valuation of odd parity, no z gives a square.
inline std::optional<Verdict> valuation_prescreen(const HomSpace& H, const LocalField& L)
{
    int vd = L.valuation(H.d);
    std::array<int, 3> base{L.valuation(H.c0), L.valuation(H.c2), L.valuation(H.c4)};
    std::array<int, 3> slope{0, 2, 4};
    long span = 4;
    for (int b : base)
        if (b != kInfiniteValuation)
            span += b;
    for (long t = -span; t <= span; ++t) {
        long best = LONG_MAX;
        int count = 0;
        for (int i = 0; i < 3; ++i) {
            if (base[i] == kInfiniteValuation)
                continue;
            long val = base[i] + slope[i] * t;
            if (val < best) {
                best = val;
                count = 1;
            } else if (val == best) {
                ++count;
            }
        }
        if (count != 1 || ((vd + best) % 2 + 2) % 2 == 0)
            return std::nullopt;
    }
    Verdict v;
    v.kind = VerdictKind::Insolvable;
    v.by_prescreen = true;
    v.place = L.label;
    v.bound = depth_bound(H, L);
    v.depth = 0;
    return v;
}

} // namespace twodescent
