// Command-line driver: descent, sweep and explain.

#include "twodescent/twodescent.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace td = twodescent;

namespace {

constexpr int kExitUsage = 4;

int parse_eps(const std::string& s)
{
    if (s == "+1" || s == "1")
        return 1;
    if (s == "-1")
        return -1;
    throw std::invalid_argument("eps must be +1 or -1, got '" + s + "'");
}

std::optional<td::Direction> parse_dir(const std::string& s)
{
    if (s.empty() || s == "both")
        return std::nullopt;
    if (s == "phi")
        return td::Direction::Phi;
    if (s == "phihat")
        return td::Direction::PhiHat;
    throw std::invalid_argument("dir must be phi or phihat, got '" + s + "'");
}

void print_group(const td::KS2& ks, const td::SelmerGroup& G)
{
    std::cout << "S^(" << td::to_string(G.dir) << "): dim " << G.dim() << ", basis {";
    for (std::size_t i = 0; i < G.basis.size(); ++i)
        std::cout << (i ? ", " : "") << ks.label(G.basis[i]);
    std::cout << "}\n";
    for (const auto& rec : G.grid) {
        std::cout << "  " << (rec.member ? "+ " : "- ") << ks.label(rec.exps);
        if (!rec.member && !rec.verdicts.empty()) {
            const auto& v = rec.verdicts.back();
            std::cout << "  (no point at " << v.place << (v.by_prescreen ? ", valuation parity" : "") << ")";
        }
        std::cout << "\n";
    }
}

int run_descent(int D, long p, const std::string& eps_s, const std::string& dir_s, long height)
{
    const auto& K = td::QuadField::from_D(D);
    td::CurveSpec c(K, p, parse_eps(eps_s));
    auto dir = parse_dir(dir_s);
    td::SearchPolicy policy;
    policy.height = height;
    td::KS2 ks(K, c.p, c.q);
    std::cout << c.str() << "\n";
    std::cout << "K(S,2) = " << ks.str() << "\n";
    auto cond = td::classify_condition(K, p);
    std::cout << "condition " << cond.name();
    if (!cond.none())
        std::cout << " (p = " << cond.subcase() << ")";
    std::cout << "\n";
    std::optional<td::SelmerGroup> g[2];
    for (td::Direction d : {td::Direction::Phi, td::Direction::PhiHat}) {
        if (dir && *dir != d)
            continue;
        g[static_cast<int>(d)] = td::selmer_group(ks, c, d, policy);
        print_group(ks, *g[static_cast<int>(d)]);
    }
    if (g[0] && g[1]) {
        auto pts = td::point_search(ks, c, height);
        auto rep = td::make_report(c, g[0]->dim(), g[1]->dim(), pts.rank_lower);
        std::cout << "rank + dim TS(E)[phi] + dim TS(E')[phihat] = " << rep.identity_value << "\n";
        std::cout << "clause: " << rep.sha.str() << "\n";
        std::cout << "rank in " << rep.rank_str() << " (points with N(x numerator) <= " << height << ")\n";
        for (const auto& P : pts.points_e)
            if (!P.is_two_torsion())
                std::cout << "  E  " << P.str() << "\n";
        for (const auto& P : pts.points_e_prime)
            if (!P.is_two_torsion())
                std::cout << "  E' " << P.str() << "\n";
        if (!cond.none()) {
            auto ex = td::expected_outcome(cond, c.eps);
            bool ok = ex.dim_phi == rep.dim_sel_phi && ex.dim_phihat == rep.dim_sel_phihat && ex.sha == rep.sha;
            std::cout << "expected (" << ex.row << "): dims (" << ex.dim_phi << ", " << ex.dim_phihat << "), "
                      << ex.sha.str() << " -> " << (ok ? "match" : "MISMATCH") << "\n";
            return ok ? 0 : 2;
        }
    }
    return 0;
}

std::vector<int> parse_fields(const std::string& s)
{
    std::vector<int> out;
    if (s == "all")
        return out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        int D = std::stoi(tok, &used);
        if (used != tok.size())
            throw std::invalid_argument("bad field '" + tok + "'");
        out.push_back(td::QuadField::from_D(D).D);
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"2-isogeny descent for y^2 = x(x + eps p)(x + eps q) over imaginary quadratic fields"};
    app.require_subcommand(1);

    int D = 0;
    long p = 0;
    std::string eps_s, dir_s, d_expr, fields_s = "all", eps_sel = "both", format = "json", explain_format = "text", out_path;
    long pmax = 500, height = 10000;
    int depth = 0, prec = 0, jobs = 1;

    auto* descent = app.add_subcommand("descent", "Selmer groups, identity and rank bounds for one curve");
    descent->add_option("--field", D, "field, by squarefree D or discriminant")->required();
    descent->add_option("--p", p, "smaller twin prime")->required();
    descent->add_option("--eps", eps_s, "+1 or -1")->required();
    descent->add_option("--dir", dir_s, "phi or phihat (default both)");
    descent->add_option("--height", height, "point search bound")->check(CLI::PositiveNumber);

    auto* sw = app.add_subcommand("sweep", "conformance sweep over twin primes p < pmax");
    sw->add_option("--pmax", pmax, "bound on p")->check(CLI::PositiveNumber);
    sw->add_option("--fields", fields_s, "all or a comma list of D");
    sw->add_option("--eps", eps_sel, "both, +1 or -1");
    sw->add_option("--format", format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));
    sw->add_option("--out", out_path, "report path (default stdout)");
    sw->add_option("--depth", depth, "override the depth bound")->check(CLI::NonNegativeNumber);
    sw->add_option("--prec", prec, "override the Hensel precision")->check(CLI::NonNegativeNumber);
    sw->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sw->add_option("--height", height, "point search bound")->check(CLI::PositiveNumber);

    auto* ex = app.add_subcommand("explain", "per-place verdicts and certificates for one class");
    ex->add_option("--field", D, "field, by squarefree D or discriminant")->required();
    ex->add_option("--p", p, "smaller twin prime")->required();
    ex->add_option("--eps", eps_s, "+1 or -1")->required();
    ex->add_option("--d", d_expr, "class expression, e.g. -2 or pi2*q")->required();
    ex->add_option("--dir", dir_s, "phi or phihat (default both)");
    ex->add_option("--format", explain_format, "text or json")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*descent)
            return run_descent(D, p, eps_s, dir_s, height);

        if (*sw) {
            td::SweepOptions opt;
            opt.pmax = pmax;
            opt.fields = parse_fields(fields_s);
            if (eps_sel == "both")
                opt.eps = {1, -1};
            else
                opt.eps = {parse_eps(eps_sel)};
            opt.policy.depth = depth;
            opt.policy.prec = prec;
            opt.policy.jobs = jobs;
            opt.policy.height = height;
            auto t0 = std::chrono::steady_clock::now();
            auto rep = td::sweep(opt);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::string text = format == "tsv" ? td::to_tsv(rep) : td::to_json(rep);
            if (out_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream f(out_path, std::ios::binary);
                if (!(f << text))
                    throw std::runtime_error("cannot write " + out_path);
            }
            std::cerr << rep.curves.size() << " curves, " << rep.count_matches() << " matched, "
                      << rep.count_mismatches() << " mismatched, " << rep.count_undecided() << " undecided, "
                      << secs << " s\n";
            return rep.exit_code();
        }

        if (*ex) {
            const auto& K = td::QuadField::from_D(D);
            td::CurveSpec c(K, p, parse_eps(eps_s));
            auto r = td::explain(c, d_expr, parse_dir(dir_s));
            std::cout << (explain_format == "json" ? td::explain_json(r) : td::explain_text(r));
            return 0;
        }
    } catch (const td::UndecidedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
