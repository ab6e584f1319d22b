#pragma once

// Condition classification, the expected Selmer dimensions per congruence row,
// twin-prime sweeps with structural and certificate checks, and reports.

#include "descent.hpp"
#include "sharank.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace twodescent {

// ---- conditions -----------------------------------------------------------

struct ConditionTag {
    char tag = 0;   // 'A'..'E', 0 for none
    int modulus = 0;
    long residue = 0;
    std::vector<std::pair<long, int>> kronecker; // (ell, (disc | ell)) for ell = p, q

    bool none() const { return tag == 0; }
    std::string name() const { return none() ? "none" : std::string(1, tag); }
    std::string subcase() const
    {
        if (modulus == 0)
            return "";
        return std::to_string(residue) + " mod " + std::to_string(modulus);
    }
    // the stated hypothesis of the identity clause for C rows carries the label (B)
    bool label_typo_suspected() const { return tag == 'C'; }
};

inline bool condition_a_by_residue(long p)
{
    long r = p % 56;
    return r == 3 || r == 17 || r == 31 || r == 45;
}

inline ConditionTag classify_condition(const QuadField& K, long p)
{
    long q = p + 2;
    if (!is_prime(p) || !is_prime(q))
        throw std::invalid_argument("classify_condition: not a twin prime pair");
    if ((-K.disc) % p == 0 || (-K.disc) % q == 0)
        throw std::invalid_argument("classify_condition: p q not prime to the discriminant");
    ConditionTag t;
    int kp = kronecker(K.disc, p), kq = kronecker(K.disc, q);
    t.kronecker = {{p, kp}, {q, kq}};
    switch (K.D) {
    case -7: {
        bool by_symbol = kp == -1 && kq == -1;
        if (by_symbol != condition_a_by_residue(p))
            throw std::logic_error("classify_condition: residue test for A disagrees with the Kronecker symbols at p = " +
                                   std::to_string(p));
        if (by_symbol) {
            t.tag = 'A';
            t.modulus = 56;
        }
        break;
    }
    case -11:
    case -19:
    case -43:
    case -67:
    case -163:
        if (kp == -1 && kq == -1) {
            t.tag = 'B';
            t.modulus = 8;
        }
        break;
    case -2:
        if (p % 8 == 5) {
            t.tag = 'C';
            t.modulus = 8;
        }
        break;
    case -1:
        t.tag = 'D';
        t.modulus = 8;
        break;
    case -3:
        if (p % 3 == 2) {
            t.tag = 'E';
            t.modulus = 24;
        }
        break;
    default: break;
    }
    if (t.modulus)
        t.residue = p % t.modulus;
    return t;
}

struct ExpectedOutcome {
    int dim_phi = 0;
    int dim_phihat = 0;
    ShaStatement sha;
    std::string row;
};

inline ExpectedOutcome expected_outcome(const ConditionTag& t, int eps)
{
    if (t.none())
        throw std::domain_error("expected_outcome: outside theorem scope");
    if (eps != 1 && eps != -1)
        throw std::invalid_argument("expected_outcome: eps must be +1 or -1");
    auto row = [&](int a, int b, ShaClause c, int v) {
        ExpectedOutcome o{a, b, {c, v}, t.name() + (eps > 0 ? "+" : "-")};
        if (!t.subcase().empty())
            o.row += ", p = " + t.subcase();
        return o;
    };
    long r = t.residue;
    auto gap = [&]() -> ExpectedOutcome {
        throw std::logic_error("expected_outcome: no row for condition " + t.name() + " with p = " + t.subcase());
    };
    switch (t.tag) {
    case 'A':
        if (r == 31)
            return row(2, 3, ShaClause::ThreeTerm, 3);
        if (eps > 0) {
            if (r == 3 || r == 17)
                return row(0, 3, ShaClause::EPrimeTwo, 1);
            if (r == 45)
                return row(1, 2, ShaClause::ETwo, 1);
        } else {
            if (r == 3 || r == 45)
                return row(0, 3, ShaClause::EPrimeTwo, 1);
            if (r == 17)
                return row(1, 2, ShaClause::ETwo, 1);
        }
        return gap();
    case 'B': return row(1, 3, ShaClause::ThreeTerm, 2);
    case 'C':
        if (eps > 0)
            return row(0, 3, ShaClause::EPrimeTwo, 1);
        return row(1, 3, ShaClause::ThreeTerm, 2);
    case 'D':
        switch (r) {
        case 1: return row(1, 3, ShaClause::ThreeTerm, 2);
        case 3: return row(0, 3, ShaClause::EPrimeTwo, 1);
        case 5: return row(0, 2, ShaClause::Full, 0);
        case 7: return row(1, 4, ShaClause::ThreeTerm, 3);
        default: return gap();
        }
    case 'E':
        if (r == 5 || r == 11)
            return row(0, 3, ShaClause::EPrimeTwo, 1);
        if (r == 17 || r == 23)
            return row(1, 4, ShaClause::ThreeTerm, 3);
        return gap();
    default: return gap();
    }
}

// ---- twin primes ----------------------------------------------------------

// p < pmax with p and p + 2 prime.
inline std::vector<long> twin_primes_below(long pmax)
{
    std::vector<long> out;
    if (pmax <= 3)
        return out;
    std::vector<bool> composite(static_cast<std::size_t>(pmax + 2), false);
    for (long i = 2; i * i <= pmax + 1; ++i)
        if (!composite[i])
            for (long j = i * i; j <= pmax + 1; j += i)
                composite[j] = true;
    for (long p = 3; p < pmax; ++p)
        if (!composite[p] && !composite[p + 2])
            out.push_back(p);
    return out;
}

// ---- per-curve analysis ---------------------------------------------------

struct StructuralChecks {
    int closure = 0;
    int identity_member = 0;
    int known_members = 0;
    int conjugation = 0;
    int prescreen = 0;
    int dual_identity = 0;

    int total() const { return closure + identity_member + known_members + conjugation + prescreen + dual_identity; }
    StructuralChecks& operator+=(const StructuralChecks& o)
    {
        closure += o.closure;
        identity_member += o.identity_member;
        known_members += o.known_members;
        conjugation += o.conjugation;
        prescreen += o.prescreen;
        dual_identity += o.dual_identity;
        return *this;
    }
};

struct CertificateChecks {
    long solvable = 0;
    long reverified = 0;
    long insolvable = 0;
    long within_bound = 0;
    long prescreened = 0;

    bool ok() const { return solvable == reverified && insolvable == within_bound; }
    CertificateChecks& operator+=(const CertificateChecks& o)
    {
        solvable += o.solvable;
        reverified += o.reverified;
        insolvable += o.insolvable;
        within_bound += o.within_bound;
        prescreened += o.prescreened;
        return *this;
    }
};

struct CurveAnalysis {
    CurveSpec curve;
    ConditionTag cond;
    std::optional<ExpectedOutcome> expected;
    std::string generators;
    std::optional<SelmerGroup> phi;
    std::optional<SelmerGroup> phihat;
    std::optional<DescentReport> report;
    PointSearchResult points;
    StructuralChecks structural;
    CertificateChecks certificates;
    std::string undecided; // message when a place could not be decided
    std::uint64_t digest = 0;

    bool decided() const { return undecided.empty(); }
    bool in_scope() const { return expected.has_value(); }
    int dim_phi() const { return phi->dim(); }
    int dim_phihat() const { return phihat->dim(); }
    int identity_value() const { return dimension_identity(dim_phi(), dim_phihat()); }

    bool dims_match() const
    {
        return decided() && in_scope() && dim_phi() == expected->dim_phi && dim_phihat() == expected->dim_phihat;
    }
    bool identity_match() const
    {
        return decided() && in_scope() && identity_value() == expected->sha.value &&
               sha_two_part_reduction(dim_phi(), dim_phihat()) == expected->sha;
    }
    // recomputed from the stored groups on every call; empty when there is nothing to compare
    std::optional<bool> match() const
    {
        if (!in_scope() || !decided())
            return std::nullopt;
        return dims_match() && identity_match();
    }
};

namespace detail {

struct Fnv {
    std::uint64_t h = 1469598103934665603ULL;
    void add(const std::string& s)
    {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    }
};

inline void digest_group(Fnv& f, const KS2& ks, const SelmerGroup& G)
{
    f.add(to_string(G.dir));
    for (const auto& rec : G.grid) {
        f.add(ks.label(rec.exps));
        for (const auto& v : rec.verdicts) {
            f.add(v.place + ":" + to_string(v.kind) + ":" + std::to_string(v.bound) + ":" + std::to_string(v.depth) +
                  (v.by_prescreen ? ":pre" : ""));
            if (v.cert) {
                const auto& c = *v.cert;
                f.add(std::string(to_string(c.chart)) + ":" + c.z0.str() + ":" + c.w0.str() + ":" +
                      (c.fval ? std::to_string(*c.fval) : "inf") + ":" + (c.dval ? std::to_string(*c.dval) : "inf"));
            }
        }
    }
}

inline void check_group(const KS2& ks, const CurveSpec& c, const SelmerGroup& G, CurveAnalysis& out)
{
    if (!G.closed())
        ++out.structural.closure;
    if (!G.contains(0))
        ++out.structural.identity_member;
    for (const auto& k : known_members(ks, c, G.dir))
        if (!G.contains(k.exps))
            ++out.structural.known_members;
    if (!conjugation_stable(ks, G))
        ++out.structural.conjugation;
    for (const auto& rec : G.grid) {
        if (rec.prescreen_rejected && !rec.prescreen_sound)
            ++out.structural.prescreen;
        for (const auto& v : rec.verdicts) {
            if (v.archimedean)
                continue;
            const LocalField* L = ks.place_by_label(v.place);
            if (v.solvable()) {
                ++out.certificates.solvable;
                if (L && v.cert && verify_certificate(rec.space, *L, *v.cert))
                    ++out.certificates.reverified;
            } else if (v.insolvable()) {
                ++out.certificates.insolvable;
                if (v.by_prescreen)
                    ++out.certificates.prescreened;
                if (v.depth <= v.bound)
                    ++out.certificates.within_bound;
            }
        }
    }
}

} // namespace detail

// rank read off the exact sequence for E' (E'(K)[2] = Z/2, with a one-dimensional kernel term):
// dim E'(K)/2E'(K) = dim_phi + dim_phihat - 1 and rank = that - 1.
inline int dimension_identity_dual(int dim_phi, int dim_phihat)
{
    int e_prime_two_torsion = 1;
    int kernel_term = 1;
    return dim_phi + dim_phihat - kernel_term - e_prime_two_torsion;
}

inline CurveAnalysis analyze_curve(const CurveSpec& c, const SearchPolicy& policy)
{
    CurveAnalysis out;
    out.curve = c;
    out.cond = classify_condition(c.field(), c.p);
    if (!out.cond.none())
        out.expected = expected_outcome(out.cond, c.eps);
    KS2 ks(c.field(), c.p, c.q);
    out.generators = ks.str();
    try {
        out.phi = selmer_group(ks, c, Direction::Phi, policy);
        out.phihat = selmer_group(ks, c, Direction::PhiHat, policy);
    } catch (const UndecidedError& e) {
        out.undecided = e.what();
        out.phi.reset();
        out.phihat.reset();
        return out;
    }
    detail::check_group(ks, c, *out.phi, out);
    detail::check_group(ks, c, *out.phihat, out);
    if (dimension_identity_dual(out.dim_phi(), out.dim_phihat()) != out.identity_value())
        ++out.structural.dual_identity;
    out.points = point_search(ks, c, policy.height);
    out.report = make_report(c, out.dim_phi(), out.dim_phihat(), out.points.rank_lower);
    detail::Fnv f;
    detail::digest_group(f, ks, *out.phi);
    detail::digest_group(f, ks, *out.phihat);
    out.digest = f.h;
    return out;
}

inline std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

// ---- sweeps ---------------------------------------------------------------

struct SweepOptions {
    long pmax = 500;
    std::vector<int> fields; // D values; empty means all nine
    std::vector<int> eps{1, -1};
    SearchPolicy policy;
};

struct ConformanceReport {
    SweepOptions options;
    std::vector<CurveAnalysis> curves;

    long count_matches() const
    {
        long n = 0;
        for (const auto& c : curves)
            n += c.match().value_or(false);
        return n;
    }
    long count_mismatches() const
    {
        long n = 0;
        for (const auto& c : curves)
            n += c.match().has_value() && !*c.match();
        return n;
    }
    long count_undecided() const
    {
        long n = 0;
        for (const auto& c : curves)
            n += !c.decided();
        return n;
    }
    long count_in_scope() const
    {
        long n = 0;
        for (const auto& c : curves)
            n += c.in_scope();
        return n;
    }
    StructuralChecks structural() const
    {
        StructuralChecks s;
        for (const auto& c : curves)
            s += c.structural;
        return s;
    }
    CertificateChecks certificates() const
    {
        CertificateChecks s;
        for (const auto& c : curves)
            s += c.certificates;
        return s;
    }
    // decided curves whose found points exceed the identity bound
    long rank_bound_violations() const
    {
        long n = 0;
        for (const auto& c : curves)
            if (c.decided() && c.points.rank_lower > c.identity_value())
                ++n;
        return n;
    }
    // identity value 0 but a non-torsion point was found
    long torsion_violations() const
    {
        long n = 0;
        for (const auto& c : curves)
            if (c.decided() && c.identity_value() == 0 && !c.points.only_two_torsion_on_e())
                ++n;
        return n;
    }
    // twin primes p > 3 are 2 mod 3, so E must cover every Q(sqrt(-3)) pair but p = 3
    long condition_e_gaps() const
    {
        long n = 0;
        for (const auto& c : curves)
            if (c.curve.field().D == -3 && c.curve.p > 3 && c.cond.tag != 'E')
                ++n;
        return n;
    }
    std::uint64_t digest() const
    {
        detail::Fnv f;
        for (const auto& c : curves)
            f.add(hex64(c.digest));
        return f.h;
    }
    int exit_code() const
    {
        if (count_undecided())
            return 3;
        if (count_mismatches())
            return 2;
        return 0;
    }
};

inline std::vector<const QuadField*> select_fields(const std::vector<int>& Ds)
{
    std::vector<const QuadField*> out;
    for (const auto& K : QuadField::all())
        if (Ds.empty() || std::find(Ds.begin(), Ds.end(), K.D) != Ds.end())
            out.push_back(&K);
    for (int D : Ds)
        QuadField::from_D(D); // throws on an unknown field
    return out;
}

// Records are ordered by field (table order), then eps (+1 first), then p.
inline ConformanceReport sweep(const SweepOptions& opt)
{
    if (opt.pmax < 1)
        throw std::invalid_argument("sweep: pmax must be positive");
    for (int e : opt.eps)
        if (e != 1 && e != -1)
            throw std::invalid_argument("sweep: eps must be +1 or -1");
    ConformanceReport rep;
    rep.options = opt;
    auto pairs = twin_primes_below(opt.pmax);
    std::vector<int> eps = opt.eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    std::vector<CurveSpec> tasks;
    for (const QuadField* K : select_fields(opt.fields))
        for (int e : eps)
            for (long p : pairs)
                if ((-K->disc) % p != 0 && (-K->disc) % (p + 2) != 0)
                    tasks.emplace_back(*K, p, e);

    rep.curves.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            try {
                rep.curves[i] = analyze_curve(tasks[i], opt.policy);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    int jobs = std::max(1, opt.policy.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return rep;
}

// ---- reports --------------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

inline nlohmann::ordered_json record_json(const CurveAnalysis& c)
{
    using nlohmann::ordered_json;
    ordered_json r;
    r["D"] = c.curve.field().D;
    r["eps"] = c.curve.eps;
    r["p"] = c.curve.p;
    r["q"] = c.curve.q;
    r["condition"] = c.cond.name();
    r["subcase"] = c.cond.none() ? ordered_json(nullptr) : ordered_json(c.cond.subcase());
    r["dim_sel_phi"] = c.decided() ? ordered_json(c.dim_phi()) : ordered_json(nullptr);
    r["dim_sel_phihat"] = c.decided() ? ordered_json(c.dim_phihat()) : ordered_json(nullptr);
    r["expected_phi"] = c.in_scope() ? ordered_json(c.expected->dim_phi) : ordered_json(nullptr);
    r["expected_phihat"] = c.in_scope() ? ordered_json(c.expected->dim_phihat) : ordered_json(nullptr);
    r["identity_value"] = c.decided() ? ordered_json(c.identity_value()) : ordered_json(nullptr);
    r["expected_identity"] = c.in_scope() ? ordered_json(c.expected->sha.value) : ordered_json(nullptr);
    r["rank_lower"] = c.decided() ? ordered_json(c.points.rank_lower) : ordered_json(nullptr);
    auto m = c.match();
    r["match"] = m ? ordered_json(*m) : ordered_json(nullptr);
    return r;
}

inline nlohmann::ordered_json policy_json(const SearchPolicy& p)
{
    nlohmann::ordered_json j;
    j["depth"] = p.depth;
    j["prec"] = p.prec;
    j["verify_prescreen"] = p.verify_prescreen;
    j["height"] = p.height;
    return j;
}

inline std::string curve_key(const CurveAnalysis& c)
{
    return "D=" + std::to_string(c.curve.field().D) + " eps=" + (c.curve.eps > 0 ? "+1" : "-1") +
           " p=" + std::to_string(c.curve.p);
}

inline nlohmann::ordered_json summary_json(const ConformanceReport& rep)
{
    using nlohmann::ordered_json;
    ordered_json s;
    ordered_json scope;
    scope["pmax"] = rep.options.pmax;
    ordered_json fields = ordered_json::array();
    for (const QuadField* K : select_fields(rep.options.fields))
        fields.push_back(K->D);
    scope["fields"] = fields;
    scope["eps"] = rep.options.eps;
    s["scope"] = scope;
    s["records"] = rep.curves.size();
    s["in_scope"] = rep.count_in_scope();
    s["out_of_scope"] = static_cast<long>(rep.curves.size()) - rep.count_in_scope();
    s["matches"] = rep.count_matches();
    s["mismatches"] = rep.count_mismatches();
    s["undecided"] = rep.count_undecided();
    ordered_json mism = ordered_json::array(), und = ordered_json::array();
    long typo_rows = 0;
    for (const auto& c : rep.curves) {
        if (c.match().has_value() && !*c.match())
            mism.push_back(curve_key(c));
        if (!c.decided())
            und.push_back(curve_key(c) + ": " + c.undecided);
        typo_rows += c.cond.label_typo_suspected();
    }
    s["mismatch_list"] = mism;
    s["undecided_list"] = und;
    auto st = rep.structural();
    s["structural_violations"] = {{"closure", st.closure},
                                  {"identity_member", st.identity_member},
                                  {"known_members", st.known_members},
                                  {"conjugation", st.conjugation},
                                  {"prescreen", st.prescreen},
                                  {"dual_identity", st.dual_identity}};
    auto ce = rep.certificates();
    s["certificates"] = {{"solvable", ce.solvable},
                         {"reverified", ce.reverified},
                         {"insolvable", ce.insolvable},
                         {"within_bound", ce.within_bound},
                         {"by_prescreen", ce.prescreened},
                         {"digest", hex64(rep.digest())}};
    s["points"] = {{"height", rep.options.policy.height},
                   {"rank_lower_above_identity", rep.rank_bound_violations()},
                   {"nontorsion_at_identity_zero", rep.torsion_violations()}};
    s["condition_e_gaps"] = rep.condition_e_gaps();
    s["condition_label_typo_suspected"] = {
        {"condition", "C"},
        {"rows", typo_rows},
        {"note", "the identity clause for p = 5 mod 8 over Q(sqrt(-2)) is stated under condition (B); treated as C"}};
    return s;
}

inline std::string to_json(const ConformanceReport& rep)
{
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["policy"] = policy_json(rep.options.policy);
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.curves)
        j["records"].push_back(record_json(c));
    j["summary"] = summary_json(rep);
    return j.dump(2) + "\n";
}

inline std::string to_tsv(const ConformanceReport& rep)
{
    std::ostringstream os;
    os << "# schema_version\t" << kSchemaVersion << "\n";
    os << "D\teps\tp\tq\tcondition\tsubcase\tdim_sel_phi\tdim_sel_phihat\texpected_phi\texpected_phihat\t"
          "identity_value\texpected_identity\trank_lower\tmatch\tclause\tlabel_typo_suspected\tdigest\n";
    auto cell = [](const nlohmann::ordered_json& v) {
        if (v.is_null())
            return std::string("NA");
        if (v.is_string())
            return v.get<std::string>();
        return v.dump();
    };
    for (const auto& c : rep.curves) {
        auto r = record_json(c);
        bool first = true;
        for (const auto& [k, v] : r.items()) {
            os << (first ? "" : "\t") << cell(v);
            first = false;
        }
        os << "\t" << (c.decided() ? to_string(sha_two_part_reduction(c.dim_phi(), c.dim_phihat()).clause) : "NA");
        os << "\t" << (c.cond.label_typo_suspected() ? 1 : 0) << "\t" << hex64(c.digest) << "\n";
    }
    return os.str();
}

// ---- explain --------------------------------------------------------------

// Parses a product like "-2", "pi2*pi2bar*-1", "mu_p^3*q" into an element of O_K.
inline QInt parse_class_expression(const KS2& ks, const std::string& expr)
{
    const QuadField& K = *ks.K;
    auto fail = [&](const std::string& why) -> QInt {
        throw std::invalid_argument("unknown class '" + expr + "' (" + why + "); valid generators: " + ks.str() +
                                    ", integers, w");
    };
    QInt x(K, 1L);
    std::stringstream ss(expr);
    std::string tok;
    bool any = false;
    while (std::getline(ss, tok, '*')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (tok.empty())
            return fail("empty factor");
        any = true;
        unsigned power = 1;
        if (auto caret = tok.find('^'); caret != std::string::npos) {
            std::string e = tok.substr(caret + 1);
            if (e.empty() || e.find_first_not_of("0123456789") != std::string::npos || e.size() > 3)
                return fail("bad exponent");
            power = static_cast<unsigned>(std::stoul(e));
            tok = tok.substr(0, caret);
        }
        QInt f(K, 1L);
        if (tok == "-1" || tok == "-")
            f = QInt(K, -1L);
        else {
            bool neg = tok[0] == '-';
            std::string body = neg ? tok.substr(1) : tok;
            if (body.empty())
                return fail("empty factor");
            if (body.find_first_not_of("0123456789") == std::string::npos) {
                f = QInt(K, mpz_class(body));
            } else if (body == "w") {
                f = QInt::w(K);
            } else {
                auto it = std::find(ks.labels.begin(), ks.labels.end(), body);
                if (it == ks.labels.end())
                    return fail("unknown factor '" + body + "'");
                f = ks.gens[static_cast<std::size_t>(it - ks.labels.begin())];
            }
            if (neg)
                f = -f;
        }
        x *= f.pow(power);
    }
    if (!any)
        return fail("empty expression");
    if (x.is_zero())
        return fail("zero");
    return x;
}

struct ExplainResult {
    CurveSpec curve;
    std::string expression;
    f2::Vec exps = 0;
    std::string label;
    std::string generators;
    std::vector<std::pair<Direction, ClassRecord>> records;
};

inline ExplainResult explain(const CurveSpec& c, const std::string& expr, std::optional<Direction> dir,
                             const SearchPolicy& policy = {})
{
    KS2 ks(c.field(), c.p, c.q);
    QInt x = parse_class_expression(ks, expr);
    auto cls = ks.class_of(x);
    if (!cls)
        throw std::invalid_argument("unknown class '" + expr + "': " + x.str() +
                                    " is not in K(S,2); valid generators: " + ks.str());
    ExplainResult r;
    r.curve = c;
    r.expression = expr;
    r.exps = *cls;
    r.label = ks.label(*cls);
    r.generators = ks.str();
    for (Direction d : {Direction::Phi, Direction::PhiHat})
        if (!dir || *dir == d)
            r.records.emplace_back(d, decide_class(ks, c, d, *cls, policy, false));
    return r;
}

inline nlohmann::ordered_json verdict_json(const Verdict& v)
{
    nlohmann::ordered_json j;
    j["place"] = v.place;
    j["verdict"] = to_string(v.kind);
    if (v.archimedean)
        return j;
    j["bound"] = v.bound;
    j["depth"] = v.depth;
    j["nodes"] = v.nodes;
    j["by_prescreen"] = v.by_prescreen;
    if (v.cert) {
        const auto& c = *v.cert;
        j["certificate"] = {{"chart", to_string(c.chart)},
                            {"z0", c.z0.str()},
                            {"W0", c.w0.str()},
                            {"v_f", c.fval ? nlohmann::ordered_json(*c.fval) : nlohmann::ordered_json("inf")},
                            {"v_dfdW", c.dval ? nlohmann::ordered_json(*c.dval) : nlohmann::ordered_json("inf")}};
    }
    return j;
}

inline std::string explain_json(const ExplainResult& r)
{
    nlohmann::ordered_json j;
    j["curve"] = r.curve.str();
    j["generators"] = r.generators;
    j["expression"] = r.expression;
    j["class"] = r.label;
    j["exponents"] = r.exps;
    j["results"] = nlohmann::ordered_json::array();
    for (const auto& [d, rec] : r.records) {
        nlohmann::ordered_json e;
        e["direction"] = to_string(d);
        e["space"] = rec.space.str();
        e["normalization"] = rec.space.normalization;
        e["member"] = rec.member;
        e["places"] = nlohmann::ordered_json::array();
        for (const auto& v : rec.verdicts)
            e["places"].push_back(verdict_json(v));
        j["results"].push_back(e);
    }
    return j.dump(2) + "\n";
}

inline std::string explain_text(const ExplainResult& r)
{
    std::ostringstream os;
    os << r.curve.str() << "\n";
    os << "K(S,2) = " << r.generators << "\n";
    os << "d = " << r.expression << "  ->  class " << r.label << "\n";
    for (const auto& [d, rec] : r.records) {
        os << "\n[" << to_string(d) << "] " << to_string(rec.space.kind) << "_d: " << rec.space.str() << "\n";
        if (rec.space.normalization != "none")
            os << "  normalized by " << rec.space.normalization << "\n";
        for (const auto& v : rec.verdicts) {
            os << "  " << std::left << std::setw(8) << v.place << to_string(v.kind);
            if (v.archimedean) {
                os << "\n";
                continue;
            }
            if (v.by_prescreen)
                os << " (valuation parity)";
            if (v.cert) {
                const auto& c = *v.cert;
                os << "  " << to_string(c.chart) << " z0 = " << c.z0.str() << ", W0 = " << c.w0.str() << ", v(f) = "
                   << (c.fval ? std::to_string(*c.fval) : "inf") << ", v(df/dW) = "
                   << (c.dval ? std::to_string(*c.dval) : "inf");
            } else if (v.insolvable()) {
                os << "  exhausted at depth " << v.depth << " <= B = " << v.bound;
            }
            os << "\n";
        }
        os << "  member of S^(" << to_string(d) << "): " << (rec.member ? "yes" : "no") << "\n";
    }
    return os.str();
}

} // namespace twodescent
