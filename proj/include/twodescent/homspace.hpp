#pragma once

// Quartic homogeneous spaces d*w^2 = c0 + c2*z^2 + c4*z^4 over O_K.

#include "qfield.hpp"

#include <string>

namespace twodescent {

enum class SpaceKind { C, CPrime };

inline const char* to_string(SpaceKind k) { return k == SpaceKind::C ? "C" : "C'"; }

struct HomSpace {
    QInt d;
    QInt c0;
    QInt c2;
    QInt c4;
    SpaceKind kind = SpaceKind::C;
    std::string normalization = "none"; // substitution applied to z, if any

    const QuadField& field() const { return d.field(); }

    // F(z) = c0 + c2 z^2 + c4 z^4
    QInt rhs(const QInt& z) const
    {
        QInt z2 = z * z;
        return c0 + c2 * z2 + c4 * z2 * z2;
    }
    // z1^4 F(1/z1) = c4 + c2 z1^2 + c0 z1^4
    QInt rhs_reciprocal(const QInt& z1) const
    {
        QInt z2 = z1 * z1;
        return c4 + c2 * z2 + c0 * z2 * z2;
    }

    // z-discriminant of the quartic: 16 c0 c4 (c2^2 - 4 c0 c4)^2
    QInt discriminant() const
    {
        QInt inner = c2 * c2 - mpz_class(4) * c0 * c4;
        return mpz_class(16) * c0 * c4 * inner * inner;
    }

    bool degenerate() const { return d.is_zero() || discriminant().is_zero(); }

    bool has_point(const QInt& z, const QInt& w) const { return d * w * w == rhs(z); }

    std::string str() const
    {
        return d.str() + "*w^2 = " + c0.str() + " + (" + c2.str() + ")*z^2 + (" + c4.str() + ")*z^4";
    }
};

} // namespace twodescent
