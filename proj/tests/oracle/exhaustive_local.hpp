#pragma once

// Brute-force local solvability of d w^2 = c0 + c2 z^2 + c4 z^4: every residue
// disc z0 + pi^N O is refined until the Taylor expansion of G = d F about z0
// pins the square class of all values on the disc, or the depth limit is hit.

#include "twodescent/homspace.hpp"
#include "twodescent/localfield.hpp"

#include <array>
#include <vector>

namespace oracle {

using twodescent::HomSpace;
using twodescent::kInfiniteValuation;
using twodescent::LocalField;
using twodescent::QInt;

enum class Answer { Solvable, Insolvable, Undecided };

struct Result {
    Answer answer = Answer::Undecided;
    long discs = 0;
};

class Exhaustive {
public:
    Exhaustive(const LocalField& L, long budget) : L_(L), budget_(budget) {}

    // g0 + g2 z^2 + g4 z^4 over z in start + pi^N0 O
    Answer run(const std::array<QInt, 3>& g, const QInt& start, int N0, int depth)
    {
        std::vector<std::pair<QInt, int>> frontier{{start, N0}};
        bool undecided = false;
        while (!frontier.empty()) {
            auto [z, N] = frontier.back();
            frontier.pop_back();
            if (++discs_ > budget_)
                return Answer::Undecided;
            switch (classify(g, z, N)) {
            case Answer::Solvable: return Answer::Solvable;
            case Answer::Insolvable: continue;
            case Answer::Undecided: break;
            }
            if (N >= depth) {
                undecided = true;
                continue;
            }
            QInt step = L_.pi.pow(static_cast<unsigned>(N));
            for (const QInt& r : L_.residue_reps)
                frontier.emplace_back(z + r * step, N + 1);
        }
        return undecided ? Answer::Undecided : Answer::Insolvable;
    }

    long discs() const { return discs_; }

private:
    // Values on z + pi^N t are h0 + h1 pi^N t + ... + h4 pi^4N t^4.
    Answer classify(const std::array<QInt, 3>& g, const QInt& z, int N) const
    {
        const auto& K = L_.field();
        QInt z2 = z * z, z3 = z2 * z;
        QInt h0 = g[0] + g[1] * z2 + g[2] * z2 * z2;
        std::array<QInt, 4> h{mpz_class(2) * g[1] * z + mpz_class(4) * g[2] * z3,
                              g[1] + mpz_class(6) * g[2] * z2, mpz_class(4) * g[2] * z, g[2]};
        if (h0.is_zero())
            return Answer::Solvable;
        int v0 = L_.valuation(h0);
        int need = v0 + 2 * L_.v_of_2();
        for (int i = 0; i < 4; ++i) {
            int vi = L_.valuation(h[i]);
            if (vi != kInfiniteValuation && vi + (i + 1) * N <= need)
                return Answer::Undecided;
        }
        (void)K;
        return L_.is_square(h0) ? Answer::Solvable : Answer::Insolvable;
    }

    const LocalField& L_;
    long budget_;
    long discs_ = 0;
};

// Affine chart z in O, then the reciprocal chart z1 in pi O.
inline Result locally_solvable(const HomSpace& H, const LocalField& L, int depth, long budget)
{
    Exhaustive ex(L, budget);
    QInt zero(L.field(), 0L);
    Result r;
    std::array<QInt, 3> affine{H.d * H.c0, H.d * H.c2, H.d * H.c4};
    Answer a = ex.run(affine, zero, 0, depth);
    if (a == Answer::Solvable) {
        r.answer = a;
    } else {
        std::array<QInt, 3> recip{H.d * H.c4, H.d * H.c2, H.d * H.c0};
        Answer b = ex.run(recip, zero, 1, depth);
        if (b == Answer::Solvable)
            r.answer = b;
        else if (a == Answer::Undecided || b == Answer::Undecided)
            r.answer = Answer::Undecided;
        else
            r.answer = Answer::Insolvable;
    }
    r.discs = ex.discs();
    return r;
}

} // namespace oracle
