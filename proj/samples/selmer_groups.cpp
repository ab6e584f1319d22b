// Selmer groups and the rank bound for y^2 = x(x + 29)(x + 31) over Q(sqrt(-7)) and Q(i).

#include "twodescent/twodescent.hpp"

#include <iostream>

using namespace twodescent;

int main()
{
    for (int D : {-7, -1}) {
        const QuadField& K = QuadField::from_D(D);
        CurveSpec curve(K, 29, +1);
        KS2 ks(K, curve.p, curve.q);
        SelmerGroup phi = selmer_group(ks, curve, Direction::Phi);
        SelmerGroup phihat = selmer_group(ks, curve, Direction::PhiHat);
        PointSearchResult pts = point_search(ks, curve, 10000);
        DescentReport rep = make_report(curve, phi.dim(), phihat.dim(), pts.rank_lower);

        std::cout << curve.str() << "\n  K(S,2) = " << ks.str() << "\n";
        for (const SelmerGroup* G : {&phi, &phihat}) {
            std::cout << "  S^(" << to_string(G->dir) << ") = <";
            for (std::size_t i = 0; i < G->basis.size(); ++i)
                std::cout << (i ? ", " : "") << ks.label(G->basis[i]);
            std::cout << ">\n";
        }
        std::cout << "  " << rep.sha.str() << "; rank " << (rep.rank_lower == rep.rank_upper ? "= " : "in ")
                  << rep.rank_str() << "\n";
    }
}
