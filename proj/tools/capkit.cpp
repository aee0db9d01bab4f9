// capkit: dyadic Hausdorff contents, Choquet integration, dimensional BMO
// seminorms and the associated covering/maximal/decomposition calculus on
// resolution-limited grids. See README.md for the file formats.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "capkit/bmo.hpp"
#include "capkit/calculus.hpp"
#include "capkit/choquet.hpp"
#include "capkit/content.hpp"
#include "capkit/corpus.hpp"
#include "capkit/io.hpp"
#include "capkit/potential.hpp"
#include "capkit/report.hpp"
#include "capkit/suite.hpp"

namespace {

using namespace capkit;

DyadicCube parse_cube(const std::string& s, int d) {
    // "level:i0,i1,i2"
    DyadicCube c;
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("cube must be level:i0[,i1[,i2]]");
    c.level = std::stoi(s.substr(0, colon));
    std::istringstream rest(s.substr(colon + 1));
    std::string tok;
    int t = 0;
    while (std::getline(rest, tok, ',')) {
        if (t >= d) throw std::invalid_argument("cube has more indices than dimensions");
        c.index[static_cast<std::size_t>(t++)] = std::stoll(tok);
    }
    if (t != d) throw std::invalid_argument("cube needs one index per dimension");
    return c;
}

CubeFamily load_family(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open file");
    std::string line;
    if (!std::getline(in, line) || line != "fam v1")
        throw ParseError(path.string() + ":1: expected header 'fam v1'");
    int d = 0, n = 0;
    {
        if (!std::getline(in, line)) throw ParseError(path.string() + ":2: missing 'd= n=' line");
        std::istringstream ss(line);
        std::string td, tn;
        ss >> td >> tn;
        if (td.rfind("d=", 0) != 0 || tn.rfind("n=", 0) != 0)
            throw ParseError(path.string() + ":2: expected 'd=<int> n=<int>'");
        d = std::stoi(td.substr(2));
        n = std::stoi(tn.substr(2));
    }
    std::array<double, kMaxDim> origin{0, 0, 0};
    double side = 1.0;
    {
        if (!std::getline(in, line)) throw ParseError(path.string() + ":3: missing origin/side line");
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok.rfind("origin=", 0) != 0) throw ParseError(path.string() + ":3: expected origin=...");
        origin[0] = std::stod(tok.substr(7));
        for (int t = 1; t < d; ++t) {
            ss >> tok;
            origin[static_cast<std::size_t>(t)] = std::stod(tok);
        }
        ss >> tok;
        if (tok.rfind("side=", 0) != 0) throw ParseError(path.string() + ":3: expected side=...");
        side = std::stod(tok.substr(5));
    }
    RootCube root(d, origin, side, n);
    std::vector<DyadicCube> cubes;
    int line_no = 3;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        DyadicCube c;
        if (!(ss >> c.level)) continue;  // blank line
        for (int t = 0; t < d; ++t)
            if (!(ss >> c.index[static_cast<std::size_t>(t)]))
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": cube needs " +
                                 std::to_string(d) + " indices");
        cubes.push_back(c);
    }
    return CubeFamily(root, std::move(cubes));
}

std::string cube_text(const DyadicCube& c, int d) {
    std::string s = std::to_string(c.level);
    for (int t = 0; t < d; ++t) s += "," + std::to_string(c.index[static_cast<std::size_t>(t)]);
    return s;
}

void maybe_write(const std::string& out_dir, ReportRecord rec) {
    if (out_dir.empty()) return;
    const auto path = write_report(out_dir, rec);
    std::cerr << "report: " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacitary toolkit: dyadic contents, Choquet integrals, dimensional BMO"};
    app.require_subcommand(1);

    std::string out_dir;
    std::uint64_t seed = 7;
    bool deterministic = true;
    app.add_option("--out-dir", out_dir, "directory for JSON reports (keyed by config hash)");
    app.add_option("--seed", seed, "seed for randomized corpora and suites");
    app.add_flag("--deterministic,!--parallel", deterministic,
                 "serial bit-reproducible kernels (default); --parallel enables OpenMP");

    // content
    auto* c_content = app.add_subcommand("content", "dyadic Hausdorff content of a set");
    std::string content_set;
    double content_beta = 0.5;
    bool content_bracket = false;
    std::string content_cube;
    c_content->add_option("--set", content_set, "dst v1 set file")->required();
    c_content->add_option("--beta", content_beta, "content exponent")->required();
    c_content->add_flag("--bracket", content_bracket, "print lower,dyadic,upper spherical bracket");
    c_content->add_option("--cube", content_cube, "restrict to cube level:i0[,i1[,i2]]");

    // choquet
    auto* c_choquet = app.add_subcommand("choquet", "Choquet integral of a nonnegative grid");
    std::string choquet_grid, choquet_cube;
    double choquet_beta = 0.5;
    c_choquet->add_option("--grid", choquet_grid)->required();
    c_choquet->add_option("--beta", choquet_beta)->required();
    c_choquet->add_option("--cube", choquet_cube, "integrate over cube level:i0[,i1[,i2]]");

    // maximal
    auto* c_maximal = app.add_subcommand("maximal", "capacitary maximal function");
    std::string maximal_grid, maximal_out;
    double maximal_beta = 0.5;
    c_maximal->add_option("--grid", maximal_grid)->required();
    c_maximal->add_option("--beta", maximal_beta)->required();
    c_maximal->add_option("--out", maximal_out, "output dgf path")->required();

    // czd
    auto* c_czd = app.add_subcommand("czd", "stopping-time decomposition at height lambda");
    std::string czd_grid;
    double czd_beta = 1.0, czd_lambda = 1.0;
    c_czd->add_option("--grid", czd_grid)->required();
    c_czd->add_option("--beta", czd_beta)->required();
    c_czd->add_option("--lambda", czd_lambda)->required();

    // ov
    auto* c_ov = app.add_subcommand("ov", "covering selection of a cube family");
    std::string ov_family;
    double ov_beta = 0.5;
    c_ov->add_option("--family", ov_family, "fam v1 file")->required();
    c_ov->add_option("--beta", ov_beta)->required();

    // bmo
    auto* c_bmo = app.add_subcommand("bmo", "dimensional BMO seminorm");
    std::string bmo_grid;
    double bmo_beta = 0.5, bmo_p = 1.0;
    int bmo_shifts = 1;
    c_bmo->add_option("--grid", bmo_grid)->required();
    c_bmo->add_option("--beta", bmo_beta)->required();
    c_bmo->add_option("--p", bmo_p, "p-seminorm exponent (default 1)");
    c_bmo->add_option("--shifts", bmo_shifts, "sampled shifted lattices (default 1 = dyadic)");

    // jn
    auto* c_jn = app.add_subcommand("jn", "level-set decay against the exponential bound");
    std::string jn_grid, jn_cube, jn_csv;
    double jn_beta = 0.5, jn_cprime = 0.0;
    c_jn->add_option("--grid", jn_grid)->required();
    c_jn->add_option("--beta", jn_beta)->required();
    c_jn->add_option("--cprime", jn_cprime, "measured quasi-additivity constant (measured here when omitted)");
    c_jn->add_option("--cube", jn_cube, "decay curve cube (default root)");
    c_jn->add_option("--csv", jn_csv, "write t,content,bound curve to this file");

    // expint
    auto* c_exp = app.add_subcommand("expint", "exponential integrability check");
    std::string exp_grid, exp_cube;
    double exp_beta = 0.5, exp_cprime = 0.0, exp_cfrac = 0.5;
    c_exp->add_option("--grid", exp_grid)->required();
    c_exp->add_option("--beta", exp_beta)->required();
    c_exp->add_option("--cprime", exp_cprime, "measured constant (measured here when omitted)");
    c_exp->add_option("--cfrac", exp_cfrac, "exponent as a fraction of the decay rate c");
    c_exp->add_option("--cube", exp_cube);

    // nesting
    auto* c_nest = app.add_subcommand("nesting", "seminorm nesting across dimensions");
    std::string nest_grid;
    double nest_alpha = 0.5, nest_beta = 1.0, nest_cprime = 0.0;
    c_nest->add_option("--grid", nest_grid)->required();
    c_nest->add_option("--alpha", nest_alpha)->required();
    c_nest->add_option("--beta", nest_beta)->required();
    c_nest->add_option("--cprime", nest_cprime, "measured constant (measured here when omitted)");

    // restrict
    auto* c_restrict = app.add_subcommand("restrict", "axis slice and BMO comparison");
    std::string restrict_grid, restrict_offset, restrict_out;
    int restrict_k = 1;
    c_restrict->add_option("--grid", restrict_grid)->required();
    c_restrict->add_option("--k", restrict_k, "kept leading axes")->required();
    c_restrict->add_option("--offset", restrict_offset, "leaf indices of dropped axes, comma separated");
    c_restrict->add_option("--out", restrict_out, "write the slice grid here");

    // compose
    auto* c_compose = app.add_subcommand("compose", "Lipschitz composition bound");
    std::string compose_grid, compose_phi;
    double compose_beta = 0.5;
    c_compose->add_option("--grid", compose_grid)->required();
    c_compose->add_option("--beta", compose_beta)->required();
    c_compose->add_option("--phi", compose_phi, "breakpoint file: lines 'x y'")->required();

    // gen-fractal
    auto* c_gen = app.add_subcommand("gen-fractal", "self-similar measure from an IFS spec");
    std::string gen_spec, gen_out;
    int gen_d = 1, gen_n = 10;
    double gen_side = 1.0;
    std::string gen_origin = "0";
    c_gen->add_option("--spec", gen_spec, "IFS spec file")->required();
    c_gen->add_option("--d", gen_d);
    c_gen->add_option("--n", gen_n)->required();
    c_gen->add_option("--side", gen_side);
    c_gen->add_option("--origin", gen_origin, "comma separated");
    c_gen->add_option("--out", gen_out)->required();

    // riesz
    auto* c_riesz = app.add_subcommand("riesz", "potential of a discrete measure");
    std::string riesz_measure, riesz_out;
    double riesz_alpha = 0.5;
    c_riesz->add_option("--measure", riesz_measure)->required();
    c_riesz->add_option("--alpha", riesz_alpha)->required();
    c_riesz->add_option("--out", riesz_out)->required();

    // adams
    auto* c_adams = app.add_subcommand("adams", "embedding ratio of a measure's potential");
    std::string adams_measure;
    double adams_alpha = 0.5, adams_eps = 0.25;
    c_adams->add_option("--measure", adams_measure)->required();
    c_adams->add_option("--alpha", adams_alpha)->required();
    c_adams->add_option("--eps", adams_eps)->required();

    // diverge
    auto* c_div = app.add_subcommand("diverge", "endpoint resolution sweep");
    std::string div_spec, div_nsweep = "6,8,10,12";
    int div_d = 1;
    double div_alpha = 0.5, div_eps = 0.25;
    c_div->add_option("--spec", div_spec)->required();
    c_div->add_option("--d", div_d);
    c_div->add_option("--alpha", div_alpha)->required();
    c_div->add_option("--nsweep", div_nsweep, "comma separated resolutions");
    c_div->add_option("--eps", div_eps, "contrast exponent offset");

    // corpus
    auto* c_corpus = app.add_subcommand("corpus", "deterministic test function files");
    std::string corpus_kind, corpus_out = ".";
    int corpus_d = 1, corpus_n = 10;
    c_corpus->add_option("--kind", corpus_kind, "log-singularity|cantor-indicator|random-step|ramp")
        ->required();
    c_corpus->add_option("--d", corpus_d);
    c_corpus->add_option("--n", corpus_n)->required();
    c_corpus->add_option("--out", corpus_out, "output directory");

    // suite
    auto* c_suite = app.add_subcommand("suite", "full verification battery");
    bool suite_fast = false;
    int suite_only = 0;
    c_suite->add_flag("--fast", suite_fast, "reduced sizes for a smoke run");
    c_suite->add_option("--only", suite_only, "run a single numbered check");

    CLI11_PARSE(app, argc, argv);
    const Exec ex = deterministic ? Exec::Serial : Exec::Parallel;

    try {
        if (*c_content) {
            const DyadicSet E = read_set(content_set);
            const ContentParams p(content_beta);
            if (content_bracket) {
                const ContentBracket b = spherical_bracket(E, p);
                std::cout << format_double(b.lower) << "," << format_double(b.dyadic_value) << ","
                          << format_double(b.upper) << "\n";
            } else {
                const DyadicCube cube =
                    content_cube.empty() ? DyadicCube{} : parse_cube(content_cube, E.root.d);
                std::cout << format_double(dyadic_content(E, p, cube, ex)) << "\n";
            }
        } else if (*c_choquet) {
            const GridFunction f = read_grid(choquet_grid);
            const DyadicCube cube =
                choquet_cube.empty() ? DyadicCube{} : parse_cube(choquet_cube, f.root.d);
            std::cout << format_double(choquet_integral(f, ContentParams(choquet_beta), cube, ex))
                      << "\n";
        } else if (*c_maximal) {
            const GridFunction f = read_grid(maximal_grid);
            write_grid(maximal_out, maximal_function(f, ContentParams(maximal_beta), ex));
        } else if (*c_czd) {
            const GridFunction f = read_grid(czd_grid);
            const CZDecomposition cz =
                cz_decompose(f, DyadicCube{}, ContentParams(czd_beta), czd_lambda, ex);
            for (std::size_t i = 0; i < cz.cubes.cubes.size(); ++i)
                std::cout << cube_text(cz.cubes.cubes[i], f.root.d) << ","
                          << format_double(cz.averages[i]) << "\n";
        } else if (*c_ov) {
            const CubeFamily fam = load_family(ov_family);
            const OVSelection sel = melnikov_select(fam, ContentParams(ov_beta));
            for (const DyadicCube& q : sel.ancestors.cubes)
                std::cout << "ancestor," << cube_text(q, fam.root.d) << "\n";
            for (const DyadicCube& q : sel.subfamily.cubes)
                std::cout << "subfamily," << cube_text(q, fam.root.d) << "\n";
            std::cout << "packing," << format_double(sel.packing_constant_observed) << "\n";
        } else if (*c_bmo) {
            const GridFunction u = read_grid(bmo_grid);
            const ContentParams p(bmo_beta);
            if (bmo_p != 1.0) {
                std::cout << format_double(p_seminorm(u, p, bmo_p, ex)) << "\n";
            } else if (bmo_shifts > 1) {
                const SampledSeminorm s = seminorm_sampled(u, p, bmo_shifts, ex);
                std::cout << format_double(s.dyadic) << "," << format_double(s.sampled) << "\n";
            } else {
                std::cout << format_double(seminorm_dyadic(u, p, ex)) << "\n";
            }
        } else if (*c_jn) {
            const GridFunction u = read_grid(jn_grid);
            const ContentParams p(jn_beta);
            const double measured =
                jn_cprime > 0.0 ? jn_cprime
                                : measure_packing_constant(u.root.d, jn_beta, u.root.n, seed, ex);
            const JNConstants k = jn_constants(p, std::max(measured, 1.0 + 1e-9), 1.0);
            const JNVerifyReport rep = jn_verify(u, p, k, ex);
            const DyadicCube cube = jn_cube.empty() ? DyadicCube{} : parse_cube(jn_cube, u.root.d);
            const DecayFit fit = decay_curve(u, cube, p, ex);
            std::ostream* curve = &std::cout;
            std::ofstream csv;
            if (!jn_csv.empty()) {
                csv.open(jn_csv);
                curve = &csv;
            }
            *curve << "t,content,bound\n";
            const double cap = std::pow(cube_side(u.root, cube), jn_beta);
            for (std::size_t i = 0; i < fit.thresholds.size(); ++i)
                *curve << format_double(fit.thresholds[i]) << "," << format_double(fit.contents[i])
                       << ","
                       << format_double(k.big_c * cap *
                                        std::exp(-k.small_c * fit.thresholds[i] / rep.norm))
                       << "\n";
            nlohmann::json j{{"seminorm", rep.norm},
                             {"cprime", k.c_prime},
                             {"c_beta", k.c_beta},
                             {"C", k.big_c},
                             {"c", k.small_c},
                             {"max_content_over_bound", rep.max_ratio},
                             {"cubes", rep.cubes},
                             {"thresholds", rep.thresholds},
                             {"fit_c", fit.c_fit},
                             {"fit_C", fit.C_fit},
                             {"fit_r2", fit.r_squared},
                             {"pass", rep.pass}};
            std::cout << j.dump(2) << "\n";
            ReportRecord rec;
            rec.command = "jn";
            rec.params = {{"grid", jn_grid}, {"beta", jn_beta}, {"cprime", k.c_prime}};
            rec.seed = seed;
            rec.results = j;
            maybe_write(out_dir, rec);
            if (!rep.pass) return 1;
        } else if (*c_exp) {
            const GridFunction u = read_grid(exp_grid);
            const ContentParams p(exp_beta);
            const double measured =
                exp_cprime > 0.0 ? exp_cprime
                                 : measure_packing_constant(u.root.d, exp_beta, u.root.n, seed, ex);
            const JNConstants k = jn_constants(p, std::max(measured, 1.0 + 1e-9), 1.0);
            const ExpIntReport rep = exp_integrability_sweep(u, p, exp_cfrac * k.small_c, k, ex);
            nlohmann::json j{{"bound_constant", rep.bound_constant},
                             {"worst_ratio", rep.worst_ratio},
                             {"cubes", rep.cubes},
                             {"cprime", k.c_prime},
                             {"pass", rep.pass}};
            std::cout << j.dump(2) << "\n";
            ReportRecord rec;
            rec.command = "expint";
            rec.params = {{"grid", exp_grid}, {"beta", exp_beta}, {"cfrac", exp_cfrac}};
            rec.seed = seed;
            rec.results = j;
            maybe_write(out_dir, rec);
            if (!rep.pass) return 1;
        } else if (*c_nest) {
            const GridFunction u = read_grid(nest_grid);
            const double measured =
                nest_cprime > 0.0
                    ? nest_cprime
                    : measure_packing_constant(u.root.d, nest_alpha, u.root.n, seed, ex);
            const NestingReport rep = nesting_check(u, ContentParams(nest_alpha),
                                                    ContentParams(nest_beta),
                                                    std::max(measured, 1.0 + 1e-9), ex);
            nlohmann::json j{{"norm_alpha", rep.norm_alpha},
                             {"norm_beta", rep.norm_beta},
                             {"ratio", rep.ratio},
                             {"bound_constant", rep.bound_constant},
                             {"max_power_excess", rep.max_power_excess},
                             {"max_integrated_excess", rep.max_integrated_excess},
                             {"pass", rep.pass}};
            std::cout << j.dump(2) << "\n";
            if (!rep.pass) return 1;
        } else if (*c_restrict) {
            const GridFunction u = read_grid(restrict_grid);
            std::vector<std::int64_t> offs;
            if (!restrict_offset.empty()) {
                std::istringstream ss(restrict_offset);
                std::string tok;
                while (std::getline(ss, tok, ',')) offs.push_back(std::stoll(tok));
            }
            const auto [slice, rep] = restrict_hyperplane(u, restrict_k, offs, ex);
            if (!restrict_out.empty()) write_grid(restrict_out, slice);
            nlohmann::json j{{"k", rep.k},
                             {"slice_classical", rep.slice_classical},
                             {"full_seminorm", rep.full_seminorm},
                             {"ratio", rep.ratio}};
            std::cout << j.dump(2) << "\n";
        } else if (*c_compose) {
            const GridFunction u = read_grid(compose_grid);
            std::ifstream in(compose_phi);
            if (!in) throw std::runtime_error(compose_phi + ": cannot open file");
            std::vector<double> xs, ys;
            double x, y;
            while (in >> x >> y) {
                xs.push_back(x);
                ys.push_back(y);
            }
            const PiecewiseLinear phi(xs, ys);
            const ComposeReport rep = compose_lipschitz(u, phi, ContentParams(compose_beta), ex);
            nlohmann::json j{
                {"lhs", rep.lhs}, {"rhs", rep.rhs}, {"lipschitz", rep.lip}, {"pass", rep.pass}};
            std::cout << j.dump(2) << "\n";
            if (!rep.pass) return 1;
        } else if (*c_gen) {
            std::array<double, kMaxDim> origin{0, 0, 0};
            {
                std::istringstream ss(gen_origin);
                std::string tok;
                int t = 0;
                while (std::getline(ss, tok, ',') && t < gen_d) origin[static_cast<std::size_t>(t++)] = std::stod(tok);
            }
            const RootCube root(gen_d, origin, gen_side, gen_n);
            const IFSSpec spec = load_ifs_spec(gen_spec, gen_d);
            write_measure(gen_out, hutchinson_measure(spec, root));
        } else if (*c_riesz) {
            const DiscreteMeasure mu = read_measure(riesz_measure);
            write_grid(riesz_out, riesz_potential(mu, riesz_alpha, ex));
        } else if (*c_adams) {
            const DiscreteMeasure mu = read_measure(adams_measure);
            const AdamsReport rep = adams_embedding_check(mu, adams_alpha, adams_eps, ex);
            nlohmann::json j{{"alpha", rep.alpha},
                             {"eps", rep.eps},
                             {"beta", rep.beta},
                             {"seminorm", rep.seminorm},
                             {"morrey", rep.morrey},
                             {"ratio", rep.ratio},
                             {"series_near", rep.series_near},
                             {"series_far", rep.series_far},
                             {"gamma", rep.gamma},
                             {"boundary", "root cube with an implicit zero-mass collar"}};
            std::cout << j.dump(2) << "\n";
            ReportRecord rec;
            rec.command = "adams";
            rec.params = {{"measure", adams_measure}, {"alpha", adams_alpha}, {"eps", adams_eps}};
            rec.seed = seed;
            rec.results = j;
            maybe_write(out_dir, rec);
        } else if (*c_div) {
            const IFSSpec spec = load_ifs_spec(div_spec, div_d);
            std::vector<int> sweep;
            {
                std::istringstream ss(div_nsweep);
                std::string tok;
                while (std::getline(ss, tok, ',')) sweep.push_back(std::stoi(tok));
            }
            const DivergenceReport rep =
                divergence_example(spec, div_d, {0.0, 0.0, 0.0}, 1.0, div_alpha, sweep, div_eps, ex);
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& pt : rep.points)
                pts.push_back({{"n", pt.n},
                               {"energy", pt.energy},
                               {"l1_endpoint", pt.l1_endpoint},
                               {"l1_eps", pt.l1_eps}});
            nlohmann::json j{{"points", pts},
                             {"dimension_matched", rep.dimension_matched},
                             {"energy_increasing", rep.energy_increasing},
                             {"endpoint_increasing", rep.endpoint_increasing},
                             {"increments_non_collapsing", rep.increments_non_collapsing},
                             {"eps_last_rel_change", rep.eps_last_rel_change},
                             {"eps_norm_stable", rep.eps_norm_stable}};
            std::cout << j.dump(2) << "\n";
        } else if (*c_corpus) {
            const RootCube root = RootCube::unit(corpus_d, corpus_n);
            const auto files =
                corpus_generate(seed, corpus_kind_from_string(corpus_kind), root, corpus_out);
            for (const auto& f : files) std::cout << f.string() << "\n";
        } else if (*c_suite) {
            SuiteOptions opt;
            opt.seed = seed;
            opt.ex = ex;
            opt.fast = suite_fast;
            opt.out_dir = out_dir;
            opt.only = suite_only;
            const auto results = run_acceptance(opt, std::cout);
            for (const auto& r : results)
                if (!r.pass) return 1;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
