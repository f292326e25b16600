// Command-line surface for the pseudorot library: rotation-vector
// classification, the staged conjugation construction, measurement campaigns,
// and verification reports. Exit codes: 0 all checks passed, 1 a check
// failed, 2 input error, 3 budget refusal.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pseudorot/anosovkatok.hpp"
#include "pseudorot/centralizer.hpp"
#include "pseudorot/diophantine.hpp"
#include "pseudorot/displacement.hpp"
#include "pseudorot/rotation.hpp"
#include "pseudorot/torusmap.hpp"

using namespace pseudorot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitBudget = 3;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

BigRat parse_rat(const std::string& s) {
    try {
        return rat_from_string(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse rational: " + s);
    }
}

// Component specs: "rat:p/q", "surd:sqrtK", "surd:sqrtK+r", "surd:sqrtK-r",
// or a plain decimal (kept as a float frequency).
Frequency parse_component(const std::string& spec) {
    if (spec.rfind("rat:", 0) == 0) return Frequency::rational(parse_rat(spec.substr(4)));
    if (spec.rfind("surd:", 0) == 0) {
        std::string body = spec.substr(5);
        if (body.rfind("sqrt", 0) != 0)
            throw std::runtime_error("surd spec must start with 'sqrt': " + spec);
        std::size_t i = 4;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
        if (i == 4) throw std::runtime_error("surd spec missing radicand: " + spec);
        BigInt k(body.substr(4, i - 4));
        BigRat shift(0);
        if (i < body.size()) {
            char sign = body[i];
            if (sign != '+' && sign != '-')
                throw std::runtime_error("bad surd tail at position " + std::to_string(i) +
                                         ": " + spec);
            shift = parse_rat(body.substr(i + 1));
            if (sign == '-') shift = -shift;
        }
        return Frequency::surd(shift, BigRat(1), k);
    }
    if (spec.find('/') != std::string::npos) return Frequency::rational(parse_rat(spec));
    std::size_t pos = 0;
    double v = std::stod(spec, &pos);
    if (pos != spec.size()) throw std::runtime_error("cannot parse component: " + spec);
    return Frequency::from_double(v);
}

// "a,b" -> two components; a single component needs --omega2.
std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    return parts;
}

Vec2 parse_vec2(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != 2) throw std::runtime_error("expected 'x,y': " + s);
    return {std::stod(parts[0]), std::stod(parts[1])};
}

std::string classify_verdict(const Vector2& w) {
    if (!w.has_exact()) return "undecided (floating-point input)";
    if (w.is_rational_vector()) return "rational vector";
    // scan relations by increasing size (positive coefficients first) so the
    // smallest one is reported
    std::vector<int> order{0};
    for (int k = 1; k <= 10; ++k) {
        order.push_back(k);
        order.push_back(-k);
    }
    for (int size = 1; size <= 20; ++size)
        for (int c : order)
        for (int d : order) {
            if ((c == 0 && d == 0) || std::abs(c) + std::abs(d) != size) continue;
            try {
                Frequency lin = Frequency::linear(BigRat(c), w.exact->first, BigRat(d),
                                                  w.exact->second, BigRat(0));
                if (lin.kind() == Frequency::Kind::Rational)
                    return "semi-irrational vector (relation " + std::to_string(c) + "*w1 + " +
                           std::to_string(d) + "*w2 rational)";
            } catch (const std::domain_error&) {
                // incompatible exact forms admit no small rational relation
            }
        }
    return "totally irrational vector (no relation with |c|,|d| <= 10)";
}

AreaPreservingMap load_map(const std::string& path) {
    return deserialize(read_file(path));
}

SimpleDisc parse_disc(const std::string& spec) {
    auto parts = split(spec, ':');
    if (parts.size() != 2) throw std::runtime_error("disc spec must be kind:params: " + spec);
    auto nums = split(parts[1], ',');
    if (parts[0] == "round" && nums.size() == 3)
        return SimpleDisc::round(Vec2{std::stod(nums[0]), std::stod(nums[1])},
                                 std::stod(nums[2]));
    if (parts[0] == "rect" && nums.size() == 4)
        return SimpleDisc::rect(Vec2{std::stod(nums[0]), std::stod(nums[1])},
                                Vec2{std::stod(nums[2]), std::stod(nums[3])});
    throw std::runtime_error("unsupported disc spec: " + spec);
}

struct CommonOpts {
    std::uint64_t seed = 0;
    int grid = 64;
    int samples = 8;
    int horizon = 200;
    double tolerance = 1e-6;
    std::string out_dir = ".";

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed")->envname("PSEUDOROT_SEED");
        cmd->add_option("--grid", grid, "grid resolution")->check(CLI::PositiveNumber);
        cmd->add_option("--samples", samples, "sample count")->check(CLI::PositiveNumber);
        cmd->add_option("--horizon", horizon, "iteration horizon / N_max")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tolerance", tolerance, "numeric tolerance")
            ->check(CLI::Range(1e-300, 1.0));
        cmd->add_option("--out-dir", out_dir, "output directory");
    }
    std::string path(const std::string& name) const { return out_dir + "/" + name; }
};

int cmd_classify(const std::string& omega_spec, const std::string& omega2_spec,
                 const std::string& relation_spec, std::int64_t ell,
                 const std::string& liouville_spec, int cf_terms, int brjuno_budget) {
    if (!liouville_spec.empty()) {
        std::string growth;
        int stages = 0;
        for (const auto& kv : split(liouville_spec, ',')) {
            auto p = split(kv, '=');
            if (p.size() != 2) throw std::runtime_error("bad --liouville field: " + kv);
            if (p[0] == "growth") growth = p[1];
            else if (p[0] == "stages") stages = std::stoi(p[1]);
            else throw std::runtime_error("unknown --liouville field: " + p[0]);
        }
        if (growth.empty() || stages < 1)
            throw std::runtime_error("--liouville needs growth=...,stages=N");
        Vector2 w = build_liouville_vector(GrowthSpec::parse(growth), stages);
        const auto& qs = w.exact->first.stage_denominators();
        std::printf("liouville vector: growth %s, %d stages\n", growth.c_str(), stages);
        std::printf("stage denominators:");
        for (const auto& q : qs) std::printf(" %s", q.str().c_str());
        std::printf("\n");
        std::int64_t n_max = 1;
        for (const auto& q : qs)
            if (q <= 100000) n_max = std::max<std::int64_t>(n_max, q.convert_to<std::int64_t>());
        auto scores = super_liouville_score(w, n_max, 1.0);
        std::printf("score table (at stage denominators, score = ln||n w||_T / n):\n");
        double witness = 0.0;
        for (const auto& q : qs) {
            if (q > n_max) continue;
            auto n = q.convert_to<std::int64_t>();
            double s = scores[static_cast<std::size_t>(n) - 1].second;
            witness = std::min(witness, s);
            std::printf("  n=%" PRId64 "  score=%s\n", n, fmt(s).c_str());
        }
        std::printf("diverging witness: min score %s\n", fmt(witness).c_str());
        return kExitOk;
    }

    if (omega_spec.empty()) throw std::runtime_error("classify needs --omega or --liouville");
    auto parts = split(omega_spec, ',');
    Frequency a, b;
    if (parts.size() == 2 && omega2_spec.empty()) {
        a = parse_component(parts[0]);
        b = parse_component(parts[1]);
    } else if (parts.size() == 1 && !omega2_spec.empty()) {
        a = parse_component(parts[0]);
        b = parse_component(omega2_spec);
    } else {
        throw std::runtime_error("give --omega \"spec,spec\" or --omega spec --omega2 spec");
    }
    Vector2 w = (a.has_exact() && b.has_exact()) ? Vector2::exact_pair(a, b)
                                                 : Vector2::from_doubles(a.value(), b.value());

    std::printf("omega = (%s, %s)\n", fmt(w.v.x).c_str(), fmt(w.v.y).c_str());
    std::printf("verdict: %s\n", classify_verdict(w).c_str());

    auto cf = continued_fraction(a, cf_terms);
    std::printf("continued fraction of w1: quotients");
    for (const auto& t : cf.partial_quotients) std::printf(" %s", t.str().c_str());
    std::printf("\n  q:");
    for (const auto& q : cf.q) std::printf(" %s", q.str().c_str());
    std::printf("\n");

    auto brj = brjuno_report(a, brjuno_budget);
    std::printf("brjuno report (w1): %s", brj.classification.c_str());
    if (!brj.partial_sums.empty())
        std::printf(", last partial sum %s", fmt(brj.partial_sums.back()).c_str());
    std::printf("\n");

    if (!relation_spec.empty()) {
        auto nums = split(relation_spec, ',');
        if (nums.size() != 4) throw std::runtime_error("--relation needs c,d,p,q");
        RationalRelation rel{std::stoll(nums[0]), std::stoll(nums[1]), std::stoll(nums[2]),
                             std::stoll(nums[3])};
        CharacterData cd = character_data(w, rel, ell);
        std::printf("character number: %" PRId64 "\n", cd.character_number);
        std::printf("character vectors: +-(%" PRId64 ",%" PRId64 ")\n",
                    cd.character_vector.first, cd.character_vector.second);
        std::printf("completion A = [[%" PRId64 ",%" PRId64 "],[%" PRId64 ",%" PRId64 "]]\n",
                    cd.A.a, cd.A.b, cd.A.c, cd.A.d);
        std::printf("alpha' = %s, beta = %s, L = %" PRId64 "\n", fmt(cd.alpha_prime.value()).c_str(),
                    fmt(cd.beta.value()).c_str(), cd.L);
    }
    return kExitOk;
}

int cmd_build_ak(int stages, const std::string& out, const std::string& report_path,
                 const std::string& state_path, const CommonOpts& opts,
                 const std::string& q_cap) {
    ConstructionParams params;
    params.seed = opts.seed;
    params.grid_resolution = opts.grid;
    if (!q_cap.empty()) params.q_cap = BigInt(q_cap);
    CounterexampleResult res = counterexample(stages, params);
    write_file(out, serialize(res.f));
    write_file(report_path, res.report);
    if (!state_path.empty()) write_file(state_path, serialize_stage(res.state));
    std::printf("stage %d map written to %s (q has %zu digits)\n", stages, out.c_str(),
                res.state.q.str().size());
    std::printf("report written to %s; all checks %s\n", report_path.c_str(),
                res.all_pass ? "passed" : "FAILED");
    return res.all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_measure(const std::string& map_path, const std::string& what, const CommonOpts& opts,
                const std::string& rho_spec, const std::string& direction_spec) {
    AreaPreservingMap map = load_map(map_path);
    if (what == "rotation") {
        auto est = estimate_rotation_vector(map, opts.samples, opts.horizon, opts.seed);
        std::ostringstream csv;
        csv << "rho_x,rho_y,residual\n"
            << fmt(est.rho.x) << "," << fmt(est.rho.y) << "," << fmt(est.residual) << "\n";
        write_file(opts.path("rotation.csv"), csv.str());
        std::printf("rho = (%s, %s), residual %s\n", fmt(est.rho.x).c_str(),
                    fmt(est.rho.y).c_str(), fmt(est.residual).c_str());
        return kExitOk;
    }
    if (what == "deviation") {
        Vec2 rho = rho_spec.empty()
                       ? estimate_rotation_vector(map, opts.samples, opts.horizon, opts.seed).rho
                       : parse_vec2(rho_spec);
        std::optional<Vec2> dir;
        if (!direction_spec.empty()) dir = parse_vec2(direction_spec);
        auto dev = deviation_series(map, rho, opts.samples, opts.horizon, dir, opts.seed);
        write_file(opts.path("deviation.csv"), deviation_series_csv(dev));
        std::printf("kappa_hat = %s", fmt(dev.kappa_hat).c_str());
        if (dev.has_direction) std::printf(", kappa_hat_v = %s", fmt(dev.kappa_hat_v).c_str());
        std::printf("\n");
        return kExitOk;
    }
    if (what == "rigidity") {
        auto cands = rigidity_search(map, opts.horizon, GridSpec{opts.grid, {0.0, 0.0}});
        write_file(opts.path("rigidity.csv"), rigidity_csv(cands));
        if (!cands.empty()) {
            const auto& best = cands.back();
            std::printf("best candidate: n=%d, c0=%s, c1=%s\n", best.n, fmt(best.c0_dist).c_str(),
                        fmt(best.c1_dist).c_str());
        }
        std::printf("%zu rigidity candidates written\n", cands.size());
        return kExitOk;
    }
    if (what == "rotation-set") {
        auto est = estimate_rotation_set(map, opts.samples, opts.horizon, opts.seed,
                                         opts.tolerance > 1e-3 ? opts.tolerance : 1e-3);
        write_file(opts.path("rotation_set.csv"), hull_csv(est));
        std::printf("hull diameter %s, pseudo-rotation: %s\n", fmt(est.diameter).c_str(),
                    est.pseudo_rotation ? "yes" : "no");
        return kExitOk;
    }
    throw std::runtime_error("unknown --what: " + what);
}

int cmd_verify(const std::string& map_path, const std::string& prop, const CommonOpts& opts,
               double kappa, bool kappa_given, int discs, int mc_points,
               const std::string& disc_spec, const std::string& with_path, int n_iter) {
    AreaPreservingMap map = load_map(map_path);
    GridSpec grid{opts.grid, {0.0, 0.0}};

    auto measured_kappa = [&](const Vec2& omega) {
        auto dev = deviation_series(map, omega, opts.samples, opts.horizon, omega, opts.seed);
        return dev.kappa_hat_v;
    };

    if (prop == "displacement") {
        Vec2 omega = estimate_rotation_vector(map, opts.samples, opts.horizon, opts.seed).rho;
        double k = kappa_given ? kappa : measured_kappa(omega);
        FundamentalDomain F = FundamentalDomain::corner_at(Vec2{0.0, 0.0});
        std::mt19937_64 rng(opts.seed + 2024);
        std::uniform_real_distribution<double> uc(0.3, 0.7), ur(0.1, 0.18), us(0.1, 0.3);
        std::vector<DiscCampaignRecord> records;
        int alarms = 0;
        for (int i = 0; i < discs; ++i) {
            SimpleDisc disc = [&] {
                switch (i % 3) {
                case 0: return SimpleDisc::round(Vec2{uc(rng), uc(rng)}, ur(rng));
                case 1: {
                    double x = uc(rng), y = uc(rng), a = us(rng) / 2, b = us(rng) / 2;
                    return SimpleDisc::rect(Vec2{x - a, y - b}, Vec2{x + a, y + b});
                }
                default:
                    return SimpleDisc::snake(Vec2{uc(rng) - 0.1, uc(rng) - 0.1}, 0.1,
                                             {{0, 0}, {1, 0}, {1, 1}});
                }
            }();
            auto res = verify_disc_displacement(map, k, F, disc, mc_points, omega,
                                                opts.seed + 1000 + i);
            if (res.alarm) ++alarms;
            records.push_back({disc.describe(), res.area, res.threshold,
                               res.verdict == DiscVerdict::Intersects ? "intersects"
                               : res.verdict == DiscVerdict::DisjointWithMargin
                                   ? "disjoint-with-margin"
                                   : "inconclusive",
                               res.hits, res.margin, res.alarm});
        }
        std::string report = campaign_report(records);
        write_file(opts.path("displacement_report.json"), report);
        std::printf("%d discs, %d alarms (kappa %s)\n", discs, alarms, fmt(k).c_str());
        return alarms == 0 ? kExitOk : kExitCheckFailed;
    }
    if (prop == "c0bound") {
        double k = kappa_given
                       ? kappa
                       : measured_kappa(
                             estimate_rotation_vector(map, opts.samples, opts.horizon, opts.seed)
                                 .rho);
        auto res = c0_bound_check(map, k, grid);
        std::printf("d_C0(f, Id) = %s, bound = %s, hypothesis %s: %s\n", fmt(res.lhs).c_str(),
                    fmt(res.rhs).c_str(), res.hypothesis_ok ? "ok" : "violated",
                    res.pass ? "pass" : "FAIL");
        if (!res.note.empty()) std::printf("note: %s\n", res.note.c_str());
        return res.pass ? kExitOk : kExitCheckFailed;
    }
    if (prop == "kac") {
        if (disc_spec.empty()) throw std::runtime_error("verify kac needs --disc");
        SimpleDisc disc = parse_disc(disc_spec);
        auto stats = first_return_stats(map, disc, opts.horizon, opts.samples, opts.seed);
        write_file(opts.path("return_histogram.csv"), return_histogram_csv(stats));
        std::printf("kac estimate %s +- %s, return fraction %s: %s\n",
                    fmt(stats.kac_estimate).c_str(), fmt(stats.kac_sigma).c_str(),
                    fmt(stats.return_fraction).c_str(), stats.kac_pass ? "pass" : "FAIL");
        return stats.kac_pass ? kExitOk : kExitCheckFailed;
    }
    if (prop == "centralizer") {
        if (with_path.empty()) throw std::runtime_error("verify centralizer needs --with");
        AreaPreservingMap g = load_map(with_path);
        double k = kappa_given
                       ? kappa
                       : measured_kappa(
                             estimate_rotation_vector(map, opts.samples, opts.horizon, opts.seed)
                                 .rho);
        auto res = verify_uniform_bound(map, k, g, n_iter, grid, opts.tolerance);
        write_file(opts.path("spread.csv"), spread_csv(res));
        auto hom = verify_homomorphism(map, g, grid);
        std::printf("max spread %s vs bound %s: %s (commutator defect %s)\n",
                    fmt(res.max_spread).c_str(), fmt(res.bound).c_str(),
                    res.pass ? "pass" : "FAIL", fmt(res.commutator).c_str());
        std::printf("rotation homomorphism check: %s (error %s)\n",
                    hom.pass ? "pass" : "FAIL", fmt(hom.error).c_str());
        return (res.pass && hom.pass) ? kExitOk : kExitCheckFailed;
    }
    throw std::runtime_error("unknown --prop: " + prop);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudorot: area-preserving torus map toolkit"};
    app.require_subcommand(1);
    // config keys live in [subcommand] sections; flags always win
    app.set_config("--config", "", "config file (TOML/INI, overridden by flags)");

    // classify
    auto* classify = app.add_subcommand("classify", "classify a rotation vector");
    std::string omega_spec, omega2_spec, relation_spec, liouville_spec;
    std::int64_t ell = 1;
    int cf_terms = 12, brjuno_budget = 30;
    classify->add_option("--omega", omega_spec, "vector spec, e.g. rat:1/3,2/5 or surd:sqrt2-1");
    classify->add_option("--omega2", omega2_spec, "second coordinate spec");
    classify->add_option("--relation", relation_spec, "rational relation c,d,p,q");
    classify->add_option("--ell", ell, "multiplier for L = ell*q");
    classify->add_option("--liouville", liouville_spec, "e.g. growth=2^q,stages=3");
    classify->add_option("--cf-terms", cf_terms, "continued fraction terms");
    classify->add_option("--brjuno-budget", brjuno_budget, "Brjuno sum budget");

    // build-ak
    auto* build = app.add_subcommand("build-ak", "run the staged conjugation construction");
    int stages = 1;
    std::string out = "f_n.json", report_path = "ak_report.json", state_path, q_cap;
    CommonOpts build_opts;
    build->add_option("--stages", stages, "number of stages")->required();
    build->add_option("--out", out, "output map file");
    build->add_option("--report", report_path, "output report file");
    build->add_option("--state", state_path, "optional stage-state output file");
    build->add_option("--q-cap", q_cap, "budget cap for q_n (integer)");
    build_opts.attach(build);

    // measure
    auto* measure = app.add_subcommand("measure", "measurement campaigns producing CSVs");
    std::string map_path, what, rho_spec, direction_spec;
    CommonOpts measure_opts;
    measure->add_option("--map", map_path, "map file")->required();
    measure->add_option("--what", what, "rotation|deviation|rigidity|rotation-set")->required();
    measure->add_option("--rho", rho_spec, "rotation vector x,y (default: measured)");
    measure->add_option("--direction", direction_spec, "deviation direction x,y");
    measure_opts.attach(measure);

    // verify
    auto* verify = app.add_subcommand("verify", "verification reports with pass/fail exit");
    std::string v_map, prop, disc_spec, with_path;
    double kappa = 0.0;
    int discs = 200, mc_points = 50, n_iter = 20;
    CommonOpts verify_opts;
    verify->add_option("--map", v_map, "map file")->required();
    verify->add_option("--prop", prop, "displacement|c0bound|kac|centralizer")->required();
    auto* kappa_opt = verify->add_option("--kappa", kappa, "BMM constant (default: measured)");
    verify->add_option("--discs", discs, "disc count for the displacement campaign");
    verify->add_option("--mc-points", mc_points, "Monte-Carlo points per disc");
    verify->add_option("--disc", disc_spec, "disc spec round:cx,cy,r or rect:x0,y0,x1,y1");
    verify->add_option("--with", with_path, "second map file (centralizer)");
    verify->add_option("--n-iter", n_iter, "iterate count for the uniform bound");
    verify_opts.attach(verify);

    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (*classify)
            return cmd_classify(omega_spec, omega2_spec, relation_spec, ell, liouville_spec,
                                cf_terms, brjuno_budget);
        if (*build)
            return cmd_build_ak(stages, out, report_path, state_path, build_opts, q_cap);
        if (*measure) return cmd_measure(map_path, what, measure_opts, rho_spec, direction_spec);
        if (*verify)
            return cmd_verify(v_map, prop, verify_opts, kappa, kappa_opt->count() > 0, discs,
                              mc_points, disc_spec, with_path, n_iter);
    } catch (const BudgetExceeded& e) {
        std::fprintf(stderr, "budget refusal: %s\n", e.what());
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInputError;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInputError;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        bool input = msg.rfind("parse error", 0) == 0 || msg.rfind("cannot open", 0) == 0 ||
                     msg.rfind("cannot write", 0) == 0 || msg.rfind("cannot parse", 0) == 0 ||
                     msg.find("needs --") != std::string::npos ||
                     msg.rfind("unknown --", 0) == 0 || msg.rfind("unsupported", 0) == 0 ||
                     msg.rfind("expected ", 0) == 0 || msg.rfind("bad ", 0) == 0 ||
                     msg.rfind("give --", 0) == 0 || msg.rfind("disc spec", 0) == 0 ||
                     msg.rfind("surd spec", 0) == 0 || msg.rfind("--liouville", 0) == 0;
        std::fprintf(stderr, "%s: %s\n", input ? "input error" : "check failed", msg.c_str());
        return input ? kExitInputError : kExitCheckFailed;
    }
    return kExitInputError;
}
