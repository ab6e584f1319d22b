#include "twodescent/verify.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace twodescent;

namespace {

// (a | ell) for an odd prime ell, by listing squares
int legendre_brute(long a, long ell)
{
    long r = ((a % ell) + ell) % ell;
    if (r == 0)
        return 0;
    for (long x = 1; x < ell; ++x)
        if (x * x % ell == r)
            return 1;
    return -1;
}

bool coprime_to_disc(const QuadField& K, long p) { return (-K.disc) % p != 0 && (-K.disc) % (p + 2) != 0; }

SweepOptions options(long pmax, std::vector<int> fields, std::vector<int> eps)
{
    SweepOptions o;
    o.pmax = pmax;
    o.fields = std::move(fields);
    o.eps = std::move(eps);
    return o;
}

} // namespace

TEST(ClassifyCondition, Examples)
{
    ConditionTag a = classify_condition(QuadField::from_D(-7), 3);
    EXPECT_EQ(a.name(), "A");
    EXPECT_EQ(a.subcase(), "3 mod 56");
    EXPECT_EQ(a.kronecker, (std::vector<std::pair<long, int>>{{3, -1}, {5, -1}}));
    EXPECT_EQ(classify_condition(QuadField::from_D(-2), 29).name(), "C");
    EXPECT_EQ(classify_condition(QuadField::from_D(-2), 29).subcase(), "5 mod 8");
    EXPECT_TRUE(classify_condition(QuadField::from_D(-2), 3).none());
    EXPECT_EQ(classify_condition(QuadField::from_D(-2), 3).subcase(), "");
    EXPECT_EQ(classify_condition(QuadField::from_D(-1), 5).subcase(), "5 mod 8");
    EXPECT_EQ(classify_condition(QuadField::from_D(-3), 17).subcase(), "17 mod 24");
    EXPECT_TRUE(classify_condition(QuadField::from_D(-7), 11).none()); // 11 splits
    EXPECT_THROW(classify_condition(QuadField::from_D(-7), 7), std::invalid_argument);
    EXPECT_THROW(classify_condition(QuadField::from_D(-7), 5), std::invalid_argument);
}

TEST(ClassifyCondition, DefinitionsAgainstResidueEnumeration)
{
    for (long p : twin_primes_below(2000)) {
        for (const auto& K : QuadField::all()) {
            if (!coprime_to_disc(K, p))
                continue;
            ConditionTag t = classify_condition(K, p);
            bool both_inert = legendre_brute(K.disc, p) == -1 && legendre_brute(K.disc, p + 2) == -1;
            char expect = 0;
            switch (K.D) {
            case -7: expect = both_inert ? 'A' : 0; break;
            case -2: expect = p % 8 == 5 ? 'C' : 0; break;
            case -1: expect = 'D'; break;
            case -3: expect = p % 3 == 2 ? 'E' : 0; break;
            default: expect = both_inert ? 'B' : 0; break;
            }
            ASSERT_EQ(t.tag, expect) << K.name << " p=" << p;
            ASSERT_EQ(t.label_typo_suspected(), expect == 'C');
        }
    }
}

TEST(ClassifyCondition, ConditionAResidueEquivalenceBelow100000)
{
    const auto& K = QuadField::from_D(-7);
    long count = 0;
    for (long p : twin_primes_below(100000)) {
        if (!coprime_to_disc(K, p))
            continue;
        bool by_symbol = kronecker(-7, p) == -1 && kronecker(-7, p + 2) == -1;
        long r = p % 56;
        ASSERT_EQ(by_symbol, r == 3 || r == 17 || r == 31 || r == 45) << p;
        ASSERT_EQ(classify_condition(K, p).tag == 'A', by_symbol);
        ++count;
    }
    EXPECT_GT(count, 1000);
}

TEST(TwinPrimes, AboveThreeAreTwoModThree)
{
    for (long p : twin_primes_below(100000))
        if (p > 3) {
            ASSERT_EQ(p % 3, 2) << p;
        }
    const auto& K = QuadField::from_D(-3);
    for (long p : twin_primes_below(500))
        if (p > 3) {
            ASSERT_EQ(classify_condition(K, p).tag, 'E');
        }
}

TEST(TwinPrimes, Sieve)
{
    auto t = twin_primes_below(500);
    EXPECT_EQ(t.size(), 24u);
    EXPECT_EQ(t.front(), 3);
    EXPECT_EQ(t.back(), 461);
    EXPECT_EQ(twin_primes_below(200).size(), 15u);
    EXPECT_EQ(twin_primes_below(4), (std::vector<long>{3}));
    EXPECT_EQ(twin_primes_below(5), (std::vector<long>{3}));
    EXPECT_EQ(twin_primes_below(6), (std::vector<long>{3, 5}));
    EXPECT_TRUE(twin_primes_below(3).empty());
    for (long p : t)
        ASSERT_TRUE(is_prime(p) && is_prime(p + 2));
}

TEST(ExpectedOutcome, Examples)
{
    const auto& K7 = QuadField::from_D(-7);
    auto a45 = expected_outcome(classify_condition(K7, 101), +1);
    EXPECT_EQ(std::make_pair(a45.dim_phi, a45.dim_phihat), std::make_pair(1, 2));
    EXPECT_EQ(a45.sha, (ShaStatement{ShaClause::ETwo, 1}));
    EXPECT_EQ(a45.row, "A+, p = 45 mod 56");
    auto a31 = expected_outcome(classify_condition(K7, 311), +1);
    EXPECT_EQ(std::make_pair(a31.dim_phi, a31.dim_phihat), std::make_pair(2, 3));
    EXPECT_EQ(a31.sha.value, 3);
    for (int eps : {1, -1}) {
        auto e17 = expected_outcome(classify_condition(QuadField::from_D(-3), 17), eps);
        EXPECT_EQ(std::make_pair(e17.dim_phi, e17.dim_phihat), std::make_pair(1, 4));
        EXPECT_EQ(e17.sha.value, 3);
        auto d5 = expected_outcome(classify_condition(QuadField::from_D(-1), 5), eps);
        EXPECT_EQ(std::make_pair(d5.dim_phi, d5.dim_phihat), std::make_pair(0, 2));
        EXPECT_EQ(d5.sha.clause, ShaClause::Full);
    }
    auto c5 = expected_outcome(classify_condition(QuadField::from_D(-2), 5), -1);
    EXPECT_EQ(std::make_pair(c5.dim_phi, c5.dim_phihat), std::make_pair(1, 3));
    EXPECT_THROW(expected_outcome(classify_condition(QuadField::from_D(-2), 3), 1), std::domain_error);
    EXPECT_THROW(expected_outcome(classify_condition(K7, 3), 0), std::invalid_argument);
}

TEST(ExpectedOutcome, EveryReachableRowExists)
{
    std::set<std::string> rows;
    for (long p : twin_primes_below(100000))
        for (const auto& K : QuadField::all()) {
            if (!coprime_to_disc(K, p))
                continue;
            ConditionTag t = classify_condition(K, p);
            if (t.none())
                continue;
            for (int eps : {1, -1}) {
                ExpectedOutcome o = expected_outcome(t, eps);
                ASSERT_EQ(dimension_identity(o.dim_phi, o.dim_phihat), o.sha.value) << o.row;
                ASSERT_EQ(sha_two_part_reduction(o.dim_phi, o.dim_phihat), o.sha) << o.row;
                rows.insert(o.row);
            }
        }
    // residues mod 56 (A: 4), mod 8 (B: 4, C: 1, D: 4) and mod 24 (E: 4), each for both signs
    EXPECT_EQ(rows.size(), 2u * (4 + 4 + 1 + 4 + 4));
}

TEST(DualIdentity, AgreesWithDimensionIdentity)
{
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b)
            if (a + b >= 2) {
                ASSERT_EQ(dimension_identity_dual(a, b), dimension_identity(a, b));
            }
}

TEST(Sweep, SmallGaussianSweep)
{
    ConformanceReport rep = sweep(options(7, {-1}, {1}));
    ASSERT_EQ(rep.curves.size(), 2u);
    const auto& c3 = rep.curves[0];
    EXPECT_EQ(c3.curve.p, 3);
    EXPECT_EQ(c3.cond.subcase(), "3 mod 8");
    EXPECT_EQ(std::make_pair(c3.dim_phi(), c3.dim_phihat()), std::make_pair(0, 3));
    const auto& c5 = rep.curves[1];
    EXPECT_EQ(c5.curve.p, 5);
    EXPECT_EQ(c5.cond.name(), "D");
    EXPECT_EQ(std::make_pair(c5.dim_phi(), c5.dim_phihat()), std::make_pair(0, 2));
    EXPECT_EQ(c5.report->rank_str(), "0");
    EXPECT_EQ(rep.count_matches(), 2);
    EXPECT_EQ(rep.exit_code(), 0);
    EXPECT_EQ(rep.structural().total(), 0);
    EXPECT_TRUE(rep.certificates().ok());
}

TEST(Sweep, OnlyPThreeBelowFour)
{
    ConformanceReport rep = sweep(options(4, {}, {1, -1}));
    std::set<int> fields;
    for (const auto& c : rep.curves) {
        EXPECT_EQ(c.curve.p, 3);
        fields.insert(c.curve.field().D);
        EXPECT_NE(c.curve.field().disc % 3, 0);
        EXPECT_NE(c.curve.field().disc % 5, 0);
    }
    EXPECT_EQ(fields, (std::set<int>{-1, -2, -7, -11, -19, -43, -67, -163}));
    EXPECT_EQ(rep.curves.size(), 16u);
    EXPECT_EQ(rep.count_mismatches(), 0);
}

TEST(Sweep, RecordOrderAndOutOfScopeRows)
{
    ConformanceReport rep = sweep(options(30, {-7, -2}, {-1, 1}));
    std::vector<std::tuple<int, int, long>> keys;
    for (const auto& c : rep.curves)
        keys.emplace_back(c.curve.field().D, c.curve.eps, c.curve.p);
    // -2 precedes -7 in the field table; eps +1 first
    EXPECT_EQ(std::get<0>(keys.front()), -2);
    EXPECT_EQ(std::get<1>(keys.front()), 1);
    for (std::size_t i = 1; i < keys.size(); ++i) {
        auto [D0, e0, p0] = keys[i - 1];
        auto [D1, e1, p1] = keys[i];
        if (D0 == D1 && e0 == e1) {
            EXPECT_LT(p0, p1);
        }
    }
    bool saw_none = false;
    for (const auto& c : rep.curves)
        if (!c.in_scope()) {
            saw_none = true;
            EXPECT_FALSE(c.match().has_value());
            auto r = record_json(c);
            EXPECT_TRUE(r["expected_phi"].is_null());
            EXPECT_TRUE(r["match"].is_null());
            EXPECT_FALSE(r["dim_sel_phi"].is_null());
        }
    EXPECT_TRUE(saw_none);
    EXPECT_EQ(rep.exit_code(), 0);
}

TEST(Sweep, RejectsBadOptions)
{
    EXPECT_THROW(sweep(options(100, {-5}, {1})), std::invalid_argument);
    EXPECT_THROW(sweep(options(100, {-1}, {2})), std::invalid_argument);
    EXPECT_THROW(sweep(options(0, {-1}, {1})), std::invalid_argument);
}

TEST(Report, JsonSchema)
{
    ConformanceReport rep = sweep(options(20, {-1, -2}, {1, -1}));
    auto j = nlohmann::ordered_json::parse(to_json(rep));
    std::vector<std::string> top;
    for (const auto& [k, v] : j.items())
        top.push_back(k);
    EXPECT_EQ(top, (std::vector<std::string>{"schema_version", "policy", "records", "summary"}));
    EXPECT_EQ(j["schema_version"], 1);
    const std::vector<std::string> keys{"D",
                                        "eps",
                                        "p",
                                        "q",
                                        "condition",
                                        "subcase",
                                        "dim_sel_phi",
                                        "dim_sel_phihat",
                                        "expected_phi",
                                        "expected_phihat",
                                        "identity_value",
                                        "expected_identity",
                                        "rank_lower",
                                        "match"};
    ASSERT_EQ(j["records"].size(), rep.curves.size());
    for (const auto& r : j["records"]) {
        std::vector<std::string> got;
        for (const auto& [k, v] : r.items())
            got.push_back(k);
        ASSERT_EQ(got, keys);
    }
    EXPECT_EQ(j["summary"]["mismatches"], 0);
    EXPECT_EQ(j["summary"]["records"], rep.curves.size());
    // the only C pair below 20 is p = 5, once per eps
    EXPECT_EQ(j["summary"]["condition_label_typo_suspected"]["rows"], 2);
}

TEST(Report, TsvHasOneRowPerCurve)
{
    ConformanceReport rep = sweep(options(20, {-1}, {1}));
    std::string tsv = to_tsv(rep);
    std::istringstream is(tsv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line))
        lines.push_back(line);
    ASSERT_EQ(lines.size(), rep.curves.size() + 2);
    EXPECT_EQ(lines[0], "# schema_version\t1");
    EXPECT_EQ(std::count(lines[1].begin(), lines[1].end(), '\t'), 16);
    for (std::size_t i = 2; i < lines.size(); ++i)
        EXPECT_EQ(std::count(lines[i].begin(), lines[i].end(), '\t'), 16);
}

TEST(Report, DeterministicAndIndependentOfJobs)
{
    SweepOptions a = options(60, {-1, -7, -11}, {1, -1});
    a.policy.height = 300;
    SweepOptions b = a;
    b.policy.jobs = 3;
    std::string ja = to_json(sweep(a));
    EXPECT_EQ(ja, to_json(sweep(a)));
    EXPECT_EQ(ja, to_json(sweep(b)));
    EXPECT_EQ(to_tsv(sweep(a)), to_tsv(sweep(b)));
}

TEST(Explain, MinusTwoForPFortyFiveMod56)
{
    CurveSpec c(QuadField::from_D(-7), 101, +1);
    ExplainResult r = explain(c, "-2", Direction::Phi);
    ASSERT_EQ(r.records.size(), 1u);
    const ClassRecord& rec = r.records[0].second;
    EXPECT_TRUE(rec.member);
    std::vector<std::string> places;
    for (const auto& v : rec.verdicts) {
        EXPECT_TRUE(v.solvable());
        if (!v.archimedean) {
            ASSERT_TRUE(v.cert);
            places.push_back(v.place);
        }
    }
    EXPECT_EQ(places, (std::vector<std::string>{"pi2", "pi2bar", "p", "q"}));
    EXPECT_NE(explain_text(r).find("member of S^(phi): yes"), std::string::npos);
    auto j = nlohmann::ordered_json::parse(explain_json(r));
    EXPECT_EQ(j["results"][0]["member"], true);
    EXPECT_EQ(j["results"][0]["places"].size(), 5u);
}

TEST(Explain, MinusOneOverSqrtMinusTwo)
{
    CurveSpec c(QuadField::from_D(-2), 5, +1);
    ExplainResult r = explain(c, "-1", Direction::Phi);
    const ClassRecord& rec = r.records[0].second;
    EXPECT_FALSE(rec.member);
    bool insolvable_at_pi2 = false;
    for (const auto& v : rec.verdicts)
        insolvable_at_pi2 = insolvable_at_pi2 || (v.place == "pi2" && v.insolvable());
    EXPECT_TRUE(insolvable_at_pi2);
}

TEST(Explain, TrivialClassAndProducts)
{
    CurveSpec c(QuadField::from_D(-7), 17, +1);
    ExplainResult one = explain(c, "1", std::nullopt);
    ASSERT_EQ(one.records.size(), 2u);
    for (const auto& [d, rec] : one.records)
        EXPECT_TRUE(rec.member) << to_string(d);
    EXPECT_EQ(one.label, "1");
    // p * q^3 * 4 lies in the class of p * q
    ExplainResult pq = explain(c, "p*q^3*4", Direction::PhiHat);
    EXPECT_EQ(pq.label, explain(c, "17*19", Direction::PhiHat).label);
    EXPECT_TRUE(pq.records[0].second.member); // torsion image
    EXPECT_EQ(explain(c, "pi2*pi2bar", Direction::Phi).label, explain(c, "2", Direction::Phi).label);
}

TEST(Explain, UnknownClassListsGenerators)
{
    CurveSpec c(QuadField::from_D(-7), 17, +1);
    try {
        explain(c, "mu", Direction::Phi);
        FAIL() << "expected an error";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("<-1, pi2, pi2bar, p, q>"), std::string::npos) << e.what();
    }
    EXPECT_THROW(explain(c, "3", Direction::Phi), std::invalid_argument);
    EXPECT_THROW(explain(c, "0", Direction::Phi), std::invalid_argument);
    EXPECT_THROW(explain(c, "", Direction::Phi), std::invalid_argument);
}

TEST(Report, ExitCodesAndMatchFlags)
{
    ConformanceReport rep = sweep(options(7, {-1}, {1}));
    ASSERT_EQ(rep.exit_code(), 0);
    // a wrong expected row is reported as a mismatch from the stored groups
    rep.curves[1].expected->dim_phi = 5;
    EXPECT_EQ(rep.curves[1].match(), false);
    EXPECT_EQ(rep.count_mismatches(), 1);
    EXPECT_EQ(rep.exit_code(), 2);
    auto j = nlohmann::ordered_json::parse(to_json(rep));
    EXPECT_EQ(j["summary"]["mismatch_list"][0], "D=-1 eps=+1 p=5");
    // an undecided curve has nothing to compare and takes precedence in the exit code
    rep.curves[0].undecided = "no decision";
    EXPECT_FALSE(rep.curves[0].match().has_value());
    EXPECT_EQ(rep.exit_code(), 3);
}
