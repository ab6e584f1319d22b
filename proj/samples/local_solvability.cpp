// Local solvability of one quartic at every place above 2, 3 and 5 of Q(sqrt(-2)),
// with the Hensel certificate lifted to 20 digits where a point exists.

#include "twodescent/twodescent.hpp"

#include <iostream>

using namespace twodescent;

int main()
{
    const QuadField& K = QuadField::from_D(-2);
    // 3 w^2 = 9 - 36 z^2 + 4 z^4
    HomSpace H{QInt(K, 3L), QInt(K, 9L), QInt(K, -36L), QInt(K, 4L)};
    std::cout << H.str() << "\n";
    for (long ell : {2L, 3L, 5L}) {
        SplitType st = classify_prime(K, ell);
        std::vector<QInt> pis{st.pi ? *st.pi : QInt(K, ell)};
        if (st.pi_bar)
            pis.push_back(*st.pi_bar);
        for (const QInt& pi : pis) {
            LocalField L(K, pi, ell, st.kind, pi.str());
            Verdict v = quartic_locally_solvable(H, L);
            std::cout << "  at " << pi.str() << " (" << to_string(st.kind) << "): " << to_string(v.kind);
            if (v.cert) {
                auto [z, W] = hensel_lift(scaled_model(H, v.cert->chart), L, *v.cert, 20);
                std::cout << ", " << to_string(v.cert->chart) << " z = " << z.str() << ", W = " << W.str();
            } else {
                std::cout << ", refuted by depth " << v.depth << " of " << v.bound;
            }
            std::cout << "\n";
        }
    }
}
