#pragma once

// Exact arithmetic in the nine imaginary quadratic fields of class number one.
//
// Elements are stored in the integral basis {1, w}, where w = sqrt(D) for
// D = 2, 3 (mod 4) and w = (1 + sqrt(D)) / 2 for D = 1 (mod 4). With that
// choice every ring-of-integers element has integer coordinates, so no
// half-integers ever appear. Coordinates are GMP integers.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twodescent {

class QuadField {
public:
    int D;           // squarefree, negative
    int disc;        // fundamental discriminant
    int trace_w;     // w^2 = trace_w * w - norm_w
    long norm_w;
    const char* name;

    static const QuadField& from_D(int D);
    static const std::array<QuadField, 9>& all();

    bool half_basis() const { return trace_w == 1; }

    bool operator==(const QuadField& o) const { return D == o.D; }
};

namespace detail {
inline const std::array<QuadField, 9>& field_table()
{
    // class number one for each entry (Heegner numbers)
    static const std::array<QuadField, 9> table{{
        {-1, -4, 0, 1, "Q(sqrt(-1))"},
        {-2, -8, 0, 2, "Q(sqrt(-2))"},
        {-3, -3, 1, 1, "Q(sqrt(-3))"},
        {-7, -7, 1, 2, "Q(sqrt(-7))"},
        {-11, -11, 1, 3, "Q(sqrt(-11))"},
        {-19, -19, 1, 5, "Q(sqrt(-19))"},
        {-43, -43, 1, 11, "Q(sqrt(-43))"},
        {-67, -67, 1, 17, "Q(sqrt(-67))"},
        {-163, -163, 1, 41, "Q(sqrt(-163))"},
    }};
    return table;
}
} // namespace detail

inline const std::array<QuadField, 9>& QuadField::all() { return detail::field_table(); }

// Accepts either the squarefree D or the discriminant (-4 and -8 map to -1, -2).
inline const QuadField& QuadField::from_D(int D)
{
    for (const auto& K : detail::field_table())
        if (K.D == D || K.disc == D)
            return K;
    throw std::invalid_argument("not an imaginary quadratic field of class number one: D = " +
                                std::to_string(D));
}

// a + b*w in O_K.
class QInt {
public:
    mpz_class a;
    mpz_class b;
    const QuadField* K = nullptr;

    QInt() = default;
    QInt(const QuadField& field, mpz_class a_, mpz_class b_ = 0)
        : a(std::move(a_)), b(std::move(b_)), K(&field) {}
    QInt(const QuadField& field, long a_, long b_ = 0) : a(a_), b(b_), K(&field) {}

    static QInt w(const QuadField& field) { return QInt(field, 0L, 1L); }

    const QuadField& field() const { return *K; }
    bool is_zero() const { return a == 0 && b == 0; }
    bool is_rational() const { return b == 0; }

    QInt operator-() const { return QInt(*K, -a, -b); }
    QInt& operator+=(const QInt& o)
    {
        a += o.a;
        b += o.b;
        return *this;
    }
    QInt& operator-=(const QInt& o)
    {
        a -= o.a;
        b -= o.b;
        return *this;
    }
    QInt& operator*=(const QInt& o)
    {
        // (a + bw)(c + dw) = ac - n bd + (ad + bc + t bd) w
        mpz_class bd = b * o.b;
        mpz_class na = a * o.a - K->norm_w * bd;
        mpz_class nb = a * o.b + b * o.a;
        if (K->trace_w != 0)
            nb += bd;
        a = std::move(na);
        b = std::move(nb);
        return *this;
    }
    QInt& operator*=(const mpz_class& s)
    {
        a *= s;
        b *= s;
        return *this;
    }

    friend QInt operator+(QInt x, const QInt& y) { return x += y; }
    friend QInt operator-(QInt x, const QInt& y) { return x -= y; }
    friend QInt operator*(QInt x, const QInt& y) { return x *= y; }
    friend QInt operator*(QInt x, const mpz_class& s) { return x *= s; }
    friend QInt operator*(const mpz_class& s, QInt x) { return x *= s; }
    friend bool operator==(const QInt& x, const QInt& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const QInt& x, const QInt& y) { return !(x == y); }

    QInt conj() const { return QInt(*K, a + K->trace_w * b, -b); }
    mpz_class norm() const
    {
        mpz_class n = a * a + K->norm_w * b * b;
        if (K->trace_w != 0)
            n += a * b;
        return n;
    }
    mpz_class trace() const { return 2 * a + K->trace_w * b; }

    QInt pow(unsigned k) const
    {
        QInt r(*K, 1L), base = *this;
        while (k) {
            if (k & 1U)
                r *= base;
            k >>= 1U;
            if (k)
                base *= base;
        }
        return r;
    }

    // Exact quotient x / y when y divides x in O_K.
    std::optional<QInt> divide(const QInt& y) const
    {
        if (y.is_zero())
            return std::nullopt;
        mpz_class n = y.norm();
        QInt t = *this * y.conj();
        if (!mpz_divisible_p(t.a.get_mpz_t(), n.get_mpz_t()) ||
            !mpz_divisible_p(t.b.get_mpz_t(), n.get_mpz_t()))
            return std::nullopt;
        mpz_divexact(t.a.get_mpz_t(), t.a.get_mpz_t(), n.get_mpz_t());
        mpz_divexact(t.b.get_mpz_t(), t.b.get_mpz_t(), n.get_mpz_t());
        return t;
    }
    bool divides(const QInt& x) const { return x.divide(*this).has_value(); }

    QInt exact_div(const QInt& y) const
    {
        auto r = divide(y);
        if (!r)
            throw std::domain_error("exact_div: " + y.str() + " does not divide " + str());
        return *r;
    }

    // Coordinates rendered as "a+b*w".
    std::string str() const
    {
        std::ostringstream os;
        if (b == 0)
            os << a;
        else if (a == 0)
            os << (b == 1 ? "" : b == -1 ? "-" : b.get_str() + "*") << "w";
        else
            os << a << (b < 0 ? "-" : "+") << (abs(b) == 1 ? std::string() : mpz_class(abs(b)).get_str() + "*")
               << "w";
        return os.str();
    }

    // Rendering in the sqrt(D) basis, e.g. "(1+sqrt(-7))/2".
    std::string sqrt_str() const
    {
        mpz_class X = K->half_basis() ? mpz_class(2 * a + b) : a;
        mpz_class Y = b;
        bool halves = K->half_basis();
        if (halves && X % 2 == 0 && Y % 2 == 0) {
            X /= 2;
            Y /= 2;
            halves = false;
        }
        std::string root = "sqrt(" + std::to_string(K->D) + ")";
        std::string body;
        if (Y == 0)
            body = X.get_str();
        else {
            std::string ys = Y == 1 ? root : Y == -1 ? "-" + root : Y.get_str() + "*" + root;
            body = X == 0 ? ys : X.get_str() + (Y < 0 ? "" : "+") + ys;
        }
        return halves ? "(" + body + ")/2" : body;
    }
};

inline std::ostream& operator<<(std::ostream& os, const QInt& x) { return os << x.str(); }

inline std::vector<QInt> units(const QuadField& K)
{
    if (K.D == -1)
        return {QInt(K, 1L), QInt(K, 0L, 1L), QInt(K, -1L), QInt(K, 0L, -1L)};
    if (K.D == -3) {
        // w = (1 + sqrt(-3))/2 is a primitive sixth root of unity
        std::vector<QInt> u;
        QInt z(K, 1L);
        for (int i = 0; i < 6; ++i) {
            u.push_back(z);
            z *= QInt::w(K);
        }
        return u;
    }
    return {QInt(K, 1L), QInt(K, -1L)};
}

inline bool is_unit(const QInt& x) { return x.norm() == 1; }

// Kronecker symbol (a | n), Cohen's binary algorithm.
inline int kronecker(long long a, long long n)
{
    static const int tab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
    if (n == 0)
        return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0)
        return 0;
    int v = 0;
    while ((n & 1) == 0) {
        ++v;
        n /= 2;
    }
    int k = (v % 2 == 0) ? 1 : tab2[a & 7];
    if (n < 0) {
        n = -n;
        if (a < 0)
            k = -k;
    }
    for (;;) {
        if (a == 0)
            return n > 1 ? 0 : k;
        v = 0;
        while ((a & 1) == 0) {
            ++v;
            a /= 2;
        }
        if (v % 2 == 1)
            k *= tab2[n & 7];
        if (a & n & 2)
            k = -k;
        long long r = a < 0 ? -a : a;
        a = n % r;
        n = r;
    }
}

inline bool is_prime(long long n)
{
    if (n < 2)
        return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

enum class SplitKind { Split, Inert, Ramified };

inline const char* to_string(SplitKind k)
{
    switch (k) {
    case SplitKind::Split: return "split";
    case SplitKind::Inert: return "inert";
    case SplitKind::Ramified: return "ramified";
    }
    return "?";
}

struct SplitType {
    SplitKind kind;
    std::optional<QInt> pi;     // Split / Ramified
    std::optional<QInt> pi_bar; // Split only
};

namespace detail {

// Coordinates proportional to (Re, Im / sqrt|D|) with a common positive scale.
inline std::pair<mpz_class, mpz_class> plane_coords(const QInt& x)
{
    if (x.K->half_basis())
        return {2 * x.a + x.b, x.b};
    return {x.a, x.b};
}

// true when arg(x) < arg(y), arguments taken in [0, 2pi).
inline bool arg_less(const QInt& x, const QInt& y)
{
    auto [x1, y1] = plane_coords(x);
    auto [x2, y2] = plane_coords(y);
    auto upper = [](const mpz_class& X, const mpz_class& Y) { return Y > 0 || (Y == 0 && X > 0); };
    bool ux = upper(x1, y1), uy = upper(x2, y2);
    if (ux != uy)
        return ux;
    return sgn(mpz_class(x1 * y2 - y1 * x2)) > 0;
}

// Some element of norm ell, or nullopt when none exists.
inline std::optional<QInt> element_of_norm(const QuadField& K, long ell)
{
    // N(a + b w) = ell  <=>  (2a + t b)^2 - disc b^2 = 4 ell
    for (long b = 0; b * b * (long)(-K.disc) <= 4 * ell; ++b) {
        mpz_class delta = mpz_class(b) * b * K.disc + 4 * mpz_class(ell);
        if (delta < 0)
            continue;
        mpz_class s = sqrt(delta);
        if (s * s != delta)
            continue;
        for (int sign : {1, -1}) {
            mpz_class num = -K.trace_w * mpz_class(b) + sign * s;
            if (num % 2 != 0)
                continue;
            QInt x(K, mpz_class(num / 2), mpz_class(b));
            if (x.norm() == ell)
                return x;
        }
    }
    return std::nullopt;
}

inline QInt smallest_argument(const std::vector<QInt>& candidates)
{
    QInt best = candidates.front();
    for (const auto& c : candidates)
        if (arg_less(c, best))
            best = c;
    return best;
}

} // namespace detail

// q = mu * conj(mu) in Z[i], mu = a + b i with a odd, b even, both positive.
inline std::pair<QInt, QInt> split_gaussian_prime(long q)
{
    if (q <= 2 || q % 4 != 1 || !is_prime(q))
        throw std::domain_error("split_gaussian_prime: " + std::to_string(q) +
                                " is not a prime = 1 (mod 4); it is inert or ramified in Z[i]");
    const QuadField& K = QuadField::from_D(-1);
    for (long a = 1; a * a < q; a += 2) {
        long r = q - a * a;
        long b = std::lround(std::sqrt(static_cast<double>(r)));
        for (long bb = std::max(0L, b - 1); bb <= b + 1; ++bb)
            if (bb > 0 && bb % 2 == 0 && bb * bb == r) {
                QInt mu(K, a, bb);
                return {mu, mu.conj()};
            }
    }
    throw std::logic_error("split_gaussian_prime: no representation found");
}

inline SplitType classify_prime(const QuadField& K, long ell)
{
    if (ell < 2 || !is_prime(ell))
        throw std::invalid_argument("classify_prime: not a prime: " + std::to_string(ell));
    int chi = kronecker(K.disc, ell);
    if (chi == -1)
        return {SplitKind::Inert, std::nullopt, std::nullopt};

    // generators fixed to match the conventional names pi_2 = 1 - i, pi_2 = -(1 + sqrt(-7))/2
    if (chi == 0) {
        if (K.D == -1 && ell == 2)
            return {SplitKind::Ramified, QInt(K, 1L, -1L), std::nullopt};
        auto x = detail::element_of_norm(K, ell);
        if (!x)
            throw std::logic_error("classify_prime: no generator for ramified prime");
        std::vector<QInt> cands;
        for (const auto& u : units(K))
            cands.push_back(u * *x);
        return {SplitKind::Ramified, detail::smallest_argument(cands), std::nullopt};
    }

    QInt pi;
    if (K.D == -1) {
        pi = split_gaussian_prime(ell).first;
    } else if (K.D == -7 && ell == 2) {
        pi = -QInt::w(K);
    } else {
        auto x = detail::element_of_norm(K, ell);
        if (!x)
            throw std::logic_error("classify_prime: no generator for split prime");
        std::vector<QInt> cands;
        for (const auto& u : units(K)) {
            cands.push_back(u * *x);
            cands.push_back(u * x->conj());
        }
        pi = detail::smallest_argument(cands);
    }
    return {SplitKind::Split, pi, pi.conj()};
}

struct FinitePlace {
    QInt pi;
    long ell = 0;
    SplitKind kind = SplitKind::Inert;
    std::string label;
};

// S = {infinity} together with every prime of K above 2 p q.
struct PlaceSet {
    const QuadField* K = nullptr;
    std::vector<FinitePlace> finite;
    std::array<long, 3> primes{2, 0, 0};

    std::size_t size() const { return finite.size() + 1; } // + archimedean
    bool archimedean_always_solvable() const { return true; }
};

inline PlaceSet build_place_set(const QuadField& K, long p, long q)
{
    if (p % 2 == 0 || q % 2 == 0 || p == q || !is_prime(p) || !is_prime(q))
        throw std::invalid_argument("build_place_set: p and q must be distinct odd primes");
    for (long ell : {p, q})
        if ((-K.disc) % ell == 0)
            throw std::invalid_argument("build_place_set: " + std::to_string(ell) +
                                        " divides the discriminant " + std::to_string(K.disc));
    PlaceSet S;
    S.K = &K;
    S.primes = {2, p, q};
    int n_split_odd = (kronecker(K.disc, p) == 1) + (kronecker(K.disc, q) == 1);
    for (long ell : {2L, p, q}) {
        SplitType t = classify_prime(K, ell);
        std::string base = ell == 2 ? "2" : (ell == p ? "p" : "q");
        switch (t.kind) {
        case SplitKind::Inert:
            S.finite.push_back({QInt(K, ell), ell, t.kind, base});
            break;
        case SplitKind::Ramified:
            S.finite.push_back({*t.pi, ell, t.kind, "pi2"});
            break;
        case SplitKind::Split: {
            std::string lab = ell == 2 ? "pi2" : (n_split_odd == 1 ? "mu" : "mu_" + base);
            S.finite.push_back({*t.pi, ell, t.kind, lab});
            S.finite.push_back({*t.pi_bar, ell, t.kind, lab + "bar"});
            break;
        }
        }
    }
    return S;
}

// Exact square root in O_K, if x is a square there.
inline std::optional<QInt> sqrt_exact(const QInt& x)
{
    const QuadField& K = x.field();
    if (x.is_zero())
        return x;
    mpz_class n2 = x.norm();
    mpz_class n = sqrt(n2);
    if (n * n != n2)
        return std::nullopt;
    // 4x = P + Q sqrt(D); (2s) = U + V sqrt(D) with U^2 + D V^2 = P, 2UV = Q, U^2 - D V^2 = 4n
    mpz_class P, Q;
    if (K.half_basis()) {
        P = 4 * x.a + 2 * x.b;
        Q = 2 * x.b;
    } else {
        P = 4 * x.a;
        Q = 4 * x.b;
    }
    mpz_class U2 = P + 4 * n;
    mpz_class V2num = 4 * n - P;
    if (U2 % 2 != 0 || V2num % (-2 * K.D) != 0)
        return std::nullopt;
    U2 /= 2;
    mpz_class V2 = V2num / (-2 * K.D);
    mpz_class U = sqrt(U2), V = sqrt(V2);
    if (U * U != U2 || V * V != V2)
        return std::nullopt;
    if (Q < 0)
        V = -V;
    // s = (U + V sqrt(D)) / 2
    mpz_class sa, sb;
    if (K.half_basis()) {
        // sqrt(D) = 2w - 1
        if ((U - V) % 2 != 0)
            return std::nullopt;
        sa = (U - V) / 2;
        sb = V;
    } else {
        if (U % 2 != 0 || V % 2 != 0)
            return std::nullopt;
        sa = U / 2;
        sb = V / 2;
    }
    QInt s(K, sa, sb);
    if (s * s != x)
        return std::nullopt;
    return s;
}

} // namespace twodescent
