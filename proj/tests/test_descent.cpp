#include "twodescent/descent.hpp"
#include "twodescent/f2.hpp"

#include <gtest/gtest.h>

using namespace twodescent;

namespace {

struct Fixture {
    CurveSpec curve;
    KS2 ks;
    Fixture(int D, long p, int eps) : curve(QuadField::from_D(D), p, eps), ks(curve.field(), p, p + 2) {}

    const QuadField& K() const { return curve.field(); }
    bool member(Direction dir, const QInt& x) const
    {
        auto c = ks.class_of(x);
        if (!c)
            throw std::logic_error("class outside K(S,2)");
        return selmer_group(ks, curve, dir).contains(*c);
    }
    QInt gen(const std::string& label) const
    {
        for (std::size_t i = 0; i < ks.labels.size(); ++i)
            if (ks.labels[i] == label)
                return ks.gens[i];
        throw std::logic_error("no generator " + label);
    }
};

} // namespace

// ---- K(S,2) ---------------------------------------------------------------

TEST(KS2, GeneratorListsForTheSpecCases)
{
    EXPECT_EQ(KS2(QuadField::from_D(-7), 3, 5).str(), "<-1, pi2, pi2bar, p, q>");
    EXPECT_EQ(KS2(QuadField::from_D(-7), 3, 5).count(), 32u);
    // p inert, q split over Q(sqrt(-3)); places ordered 2, p, q
    EXPECT_EQ(KS2(QuadField::from_D(-3), 5, 7).str(), "<-1, 2, p, mu, mubar>");
    EXPECT_EQ(KS2(QuadField::from_D(-1), 17, 19).str(), "<i, pi2, mu, mubar, q>");
    EXPECT_EQ(KS2(QuadField::from_D(-1), 11, 13).str(), "<i, pi2, p, mu, mubar>");
    EXPECT_EQ(KS2(QuadField::from_D(-2), 5, 7).str(), "<-1, pi2, p, q>");
}

TEST(KS2, ClassOfInvertsRep)
{
    for (const auto& K : QuadField::all()) {
        for (long p : {11L, 17L, 41L}) {
            if ((-K.disc) % p == 0 || (-K.disc) % (p + 2) == 0)
                continue;
            KS2 ks(K, p, p + 2);
            for (f2::Vec e = 0; e < ks.count(); ++e) {
                ASSERT_EQ(ks.class_of(ks.rep(e)), e) << K.name << " " << ks.label(e);
                // squares and unit squares do not change the class
                QInt y = ks.rep(e) * QInt(K, 3L, 1L) * QInt(K, 3L, 1L);
                ASSERT_EQ(ks.class_of(y), e);
            }
            // a prime outside S is not in K(S,2), its square is trivial
            EXPECT_FALSE(ks.class_of(QInt(K, 37L)).has_value());
            EXPECT_EQ(ks.class_of(QInt(K, 37L * 37L)), f2::Vec(0));
        }
    }
}

TEST(KS2, UnitClassesForEisensteinIntegers)
{
    const auto& K = QuadField::from_D(-3);
    KS2 ks(K, 5, 7);
    // the sixth roots of unity fall into the classes of 1 and -1
    for (const auto& u : units(K)) {
        auto c = ks.class_of(u);
        ASSERT_TRUE(c);
        EXPECT_TRUE(*c == 0 || *c == 1) << u.str();
    }
}

// ---- homogeneous spaces ---------------------------------------------------

TEST(HomSpace, IdentityClassPhi)
{
    Fixture f(-7, 17, +1);
    HomSpace H = hom_space(make_class(f.ks, 0), f.curve, Direction::Phi);
    EXPECT_EQ(H.c0, QInt(f.K(), 1L));
    EXPECT_EQ(H.c2, QInt(f.K(), -2L * 36));
    EXPECT_EQ(H.c4, QInt(f.K(), 4L));
    EXPECT_TRUE(H.has_point(QInt(f.K(), 0L), QInt(f.K(), 1L)));
}

TEST(HomSpace, MinusPHasRationalPoint)
{
    Fixture f(-7, 17, +1);
    SelmerClass d{*f.ks.class_of(QInt(f.K(), -17L)), QInt(f.K(), -17L)};
    HomSpace H = hom_space(d, f.curve, Direction::PhiHat);
    EXPECT_EQ(H.c2, QInt(f.K(), -36L * 17));
    EXPECT_EQ(H.c4, QInt(f.K(), 17L * 19));
    EXPECT_TRUE(H.has_point(QInt(f.K(), 1L), QInt(f.K(), 0L)));
}

TEST(HomSpace, NormalizedShapes)
{
    for (int eps : {1, -1}) {
        Fixture f2(-2, 5, eps);
        HomSpace H2 = hom_space(make_class(f2.ks, 0b10), f2.curve, Direction::Phi);
        QInt d = f2.ks.rep(0b10);
        EXPECT_EQ(H2.c2, d * mpz_class(eps * 12));
        EXPECT_EQ(H2.c4, QInt(f2.K(), 1L));
        EXPECT_EQ(H2.normalization, "z -> z/pi2");

        Fixture fi(-1, 17, eps);
        HomSpace Hi = hom_space(make_class(fi.ks, 0b101), fi.curve, Direction::Phi);
        QInt di = fi.ks.rep(0b101);
        EXPECT_EQ(Hi.c2, di * QInt::w(fi.K()) * mpz_class(-eps * 36));
        EXPECT_EQ(Hi.c4, QInt(fi.K(), -1L));
        HomSpace Hp = hom_space(make_class(fi.ks, 0b101), fi.curve, Direction::PhiHat);
        EXPECT_EQ(Hp.c2, di * mpz_class(-eps * 36));
        EXPECT_EQ(Hp.normalization, "z -> i z");
    }
}

// ---- Selmer groups --------------------------------------------------------

TEST(SelmerGroup, SpecExamples)
{
    Fixture a3(-7, 3, +1);
    EXPECT_EQ(selmer_group(a3.ks, a3.curve, Direction::Phi).dim(), 0);
    Fixture a311(-7, 311, +1);
    EXPECT_EQ(selmer_group(a311.ks, a311.curve, Direction::Phi).dim(), 2);
    EXPECT_EQ(selmer_group(a311.ks, a311.curve, Direction::PhiHat).dim(), 3);
    Fixture d5(-1, 5, +1);
    EXPECT_EQ(selmer_group(d5.ks, d5.curve, Direction::Phi).dim(), 0);
    EXPECT_EQ(selmer_group(d5.ks, d5.curve, Direction::PhiHat).dim(), 2);
}

TEST(SelmerGroup, StructuralProperties)
{
    for (const auto& K : QuadField::all()) {
        for (long p : {5L, 17L, 29L, 71L}) {
            if ((-K.disc) % p == 0 || (-K.disc) % (p + 2) == 0)
                continue;
            for (int eps : {1, -1}) {
                CurveSpec c(K, p, eps);
                KS2 ks(K, p, p + 2);
                for (Direction dir : {Direction::Phi, Direction::PhiHat}) {
                    SelmerGroup G = selmer_group(ks, c, dir);
                    ASSERT_TRUE(G.closed());
                    ASSERT_TRUE(G.contains(0));
                    ASSERT_TRUE(conjugation_stable(ks, G)) << K.name << " p=" << p;
                    ASSERT_EQ(static_cast<int>(G.members.size()), 1 << G.dim());
                    for (const auto& k : known_members(ks, c, dir))
                        ASSERT_TRUE(G.contains(k.exps));
                    for (const auto& rec : G.grid) {
                        ASSERT_TRUE(rec.prescreen_sound);
                        if (rec.member) {
                            for (const auto& v : rec.verdicts)
                                ASSERT_TRUE(v.solvable());
                            ASSERT_TRUE(rec.verdicts.back().archimedean);
                        } else {
                            ASSERT_TRUE(rec.verdicts.back().insolvable());
                        }
                    }
                    // basis is reduced echelon: distinct pivots cleared elsewhere
                    for (std::size_t i = 0; i < G.basis.size(); ++i)
                        for (std::size_t j = 0; j < G.basis.size(); ++j)
                            if (i != j) {
                                ASSERT_FALSE(G.basis[j] & (f2::Vec(1) << f2::lowest_bit(G.basis[i])));
                            }
                }
            }
        }
    }
}

TEST(SelmerGroup, UndecidedIsAHardError)
{
    Fixture f(-2, 5, +1);
    SearchPolicy pol;
    pol.depth = 1;
    pol.verify_prescreen = false;
    EXPECT_THROW(selmer_group(f.ks, f.curve, Direction::Phi, pol), UndecidedError);
}

TEST(KnownMembers, TorsionImages)
{
    Fixture plus(-7, 17, +1), minus(-7, 17, -1);
    auto kp = known_members(plus.ks, plus.curve, Direction::PhiHat);
    ASSERT_EQ(kp.size(), 4u);
    EXPECT_EQ(kp[1].exps, *plus.ks.class_of(QInt(plus.K(), -17L)));
    EXPECT_EQ(kp[2].exps, *plus.ks.class_of(QInt(plus.K(), -19L)));
    auto km = known_members(minus.ks, minus.curve, Direction::PhiHat);
    EXPECT_EQ(km[1].exps, *minus.ks.class_of(QInt(minus.K(), 17L)));
    EXPECT_EQ(km[2].exps, *minus.ks.class_of(QInt(minus.K(), 19L)));
    EXPECT_EQ(known_members(plus.ks, plus.curve, Direction::Phi).size(), 1u);
}

// ---- membership of specific classes ---------------------------------------
// Smallest qualifying twin pairs per clause; iff clauses also cover pairs where the
// class is excluded.

TEST(Membership, MinusPInPhiHatConditionA)
{
    for (long p : {3L, 17L, 59L}) {
        Fixture f(-7, p, +1);
        EXPECT_TRUE(f.member(Direction::PhiHat, QInt(f.K(), -p))) << p;
    }
}

TEST(Membership, MinusQInPhiHatConditionA)
{
    for (long p : {3L, 17L, 59L}) {
        Fixture f(-7, p, +1);
        EXPECT_TRUE(f.member(Direction::PhiHat, QInt(f.K(), -(p + 2)))) << p;
    }
}

TEST(Membership, PAndQInPhiHatForNegativeEps)
{
    for (long p : {3L, 17L, 59L}) {
        Fixture f(-7, p, -1);
        EXPECT_TRUE(f.member(Direction::PhiHat, QInt(f.K(), p))) << p;
        EXPECT_TRUE(f.member(Direction::PhiHat, QInt(f.K(), p + 2))) << p;
    }
}

TEST(Membership, MinusOneInPhiHatIffResidue3_17_31Mod56)
{
    // condition A pairs below 320: 3, 17, 59, 101 (45 mod 56), 227, 269 (45 mod 56), 311
    for (long p : {3L, 17L, 59L, 101L, 227L, 269L, 311L}) {
        Fixture f(-7, p, +1);
        long r = p % 56;
        bool expected = r == 3 || r == 17 || r == 31;
        EXPECT_EQ(f.member(Direction::PhiHat, QInt(f.K(), -1L)), expected) << p;
    }
}

TEST(Membership, MinusOneNotInPhiConditionCPositive)
{
    for (long p : {5L, 29L, 101L}) {
        Fixture f(-2, p, +1);
        EXPECT_FALSE(f.member(Direction::Phi, QInt(f.K(), -1L))) << p;
    }
}

TEST(Membership, MinusOneInPhiConditionCNegative)
{
    for (long p : {5L, 29L, 101L}) {
        Fixture f(-2, p, -1);
        EXPECT_TRUE(f.member(Direction::Phi, QInt(f.K(), -1L))) << p;
    }
}

namespace {

void check_i_in_phi(int eps, std::initializer_list<long> ps, long residue)
{
    for (long p : ps) {
        Fixture f(-1, p, eps);
        EXPECT_EQ(f.member(Direction::Phi, QInt::w(f.K())), p % 8 == residue) << p;
    }
}

void check_mu_gaussian(int eps)
{
    for (long p : {5L, 17L, 29L, 41L}) {
        Fixture f(-1, p, eps);
        QInt mu = f.gen("mu");
        ASSERT_EQ(mu, split_gaussian_prime(p).first);
        EXPECT_EQ(f.member(Direction::PhiHat, mu), mu.b % 4 == 0) << mu.str();
    }
}

void check_mu_eisenstein(int eps)
{
    for (long p : {5L, 11L, 17L, 29L, 41L, 59L, 71L}) {
        Fixture f(-3, p, eps);
        long r = p % 24;
        EXPECT_EQ(f.member(Direction::PhiHat, f.gen("mu")), r == 17 || r == 23) << p;
    }
}

} // namespace

TEST(Membership, IInPhiIffOneMod8CaseD1Positive) { check_i_in_phi(+1, {5L, 17L, 29L, 41L}, 1); }
TEST(Membership, IInPhiIffOneMod8CaseD1Negative) { check_i_in_phi(-1, {5L, 17L, 29L, 41L}, 1); }
TEST(Membership, IInPhiIffSevenMod8CaseD2Positive) { check_i_in_phi(+1, {3L, 11L, 59L, 71L, 107L, 191L}, 7); }
TEST(Membership, IInPhiIffSevenMod8CaseD2Negative) { check_i_in_phi(-1, {3L, 11L, 59L, 71L, 107L, 191L}, 7); }
TEST(Membership, MuInPhiHatIffImaginaryPartDivisibleBy4Positive) { check_mu_gaussian(+1); }
TEST(Membership, MuInPhiHatIffImaginaryPartDivisibleBy4Negative) { check_mu_gaussian(-1); }
TEST(Membership, MuInPhiHatIffResidue17Or23Mod24Positive) { check_mu_eisenstein(+1); }
TEST(Membership, MuInPhiHatIffResidue17Or23Mod24Negative) { check_mu_eisenstein(-1); }

// ---- F_2 linear algebra ---------------------------------------------------

TEST(F2, EchelonRankAndSpan)
{
    std::vector<f2::Vec> vs{0b1011, 0b0110, 0b1101, 0b0000, 0b1011};
    auto b = f2::echelon(vs);
    EXPECT_EQ(b.size(), 2u);
    EXPECT_EQ(f2::rank(vs), 2);
    for (f2::Vec v : vs)
        EXPECT_TRUE(f2::in_span(b, v));
    EXPECT_FALSE(f2::in_span(b, 0b0001));
    auto s = f2::span(b);
    EXPECT_EQ(s.size(), 4u);
    EXPECT_EQ(s.front(), 0u);
}
