#include "rdlab/cli.hpp"
#include "rdlab/entire.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/experiments.hpp"
#include "rdlab/io.hpp"
#include "rdlab/kernels.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

namespace rdlab {

namespace fs = std::filesystem;

namespace {

fs::path output_root() {
    if (const char* env = std::getenv("RDLAB_OUTPUT_ROOT")) return env;
    return ".";
}

fs::path resolve_out(const std::string& out, const std::string& sub) {
    fs::path p = out.empty() ? output_root() / ("rdlab_" + sub) : fs::path(out);
    fs::create_directories(p);
    return p;
}

// Expand "key = value" config entries into --key=value arguments placed
// before the command-line ones, which therefore take precedence. Unknown
// keys surface as unknown options and are rejected.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::vector<std::string> pre;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw std::invalid_argument("--config needs a file path");
            auto m = io::Manifest::load(args[i + 1]);
            for (const auto& [k, v] : m.entries())
                pre.push_back("--" + k + "=" + v);
            ++i;
        } else if (args[i].rfind("--config=", 0) == 0) {
            auto m = io::Manifest::load(args[i].substr(9));
            for (const auto& [k, v] : m.entries())
                pre.push_back("--" + k + "=" + v);
        } else {
            out.push_back(args[i]);
        }
    }
    if (!pre.empty() && !out.empty())
        out.insert(out.begin() + 1, pre.begin(), pre.end());
    else if (!pre.empty())
        out = pre;
    return out;
}

void take_last_everywhere(CLI::App* app) {
    for (auto* opt : app->get_options())
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    for (auto* sub : app->get_subcommands({})) take_last_everywhere(sub);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::string list_to_string(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += io::fmt(v[i]);
    }
    return s;
}

std::size_t grid_hash(const std::string& reaction, double dx, double dt,
                      double halfwidth) {
    std::string key = reaction + "|" + io::fmt(dx) + "|" + io::fmt(dt) + "|" +
                      io::fmt(halfwidth);
    return std::hash<std::string>{}(key);
}

fs::path cache_path(std::size_t hash) {
    fs::path dir = output_root() / "rdlab_cache";
    fs::create_directories(dir);
    char buf[32];
    std::snprintf(buf, sizeof buf, "calib_%016zx.kv", hash);
    return dir / buf;
}

// ---- shared per-command state ----

struct CommonOpts {
    std::string reaction = "cubic:0.3";
    std::string out;
    unsigned long seed = 20240817;
    bool serial = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--reaction", c.reaction,
                    "cubic:<alpha>, fisher, or poly:c0,c1,...");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--seed", c.seed, "seed for perturbation placement");
    cmd->add_flag("--serial", c.serial, "run grid kernels on the serial path");
}

void apply_exec_policy(const CommonOpts& c) {
    kernels::exec_policy() =
        c.serial ? kernels::Exec::Serial : kernels::Exec::Parallel;
}

struct FrontOpts {
    double speed = 0.0; // monostable request; 0 means c_min
    double ctol = 1e-10;
    bool reflect = false;
};

int cmd_front(const CommonOpts& c, const FrontOpts& o) {
    apply_exec_policy(c);
    auto f = ReactionTerm::parse(c.reaction);
    fs::path out = resolve_out(c.out, "front");

    FrontProfile p = f.assumption() == AssumptionClass::Bistable
                         ? solve_front_bistable(f, o.ctol)
                         : solve_front_monostable(
                               f, o.speed > 0.0 ? o.speed : minimal_speed(f));
    auto e = edge_eigenvalues(f, p.speed());
    auto tb = fit_tail_constants(p, e);

    io::write_profile_csv(out / "profile.csv", p);
    if (o.reflect) io::write_profile_csv(out / "profile_reflected.csv", p.reflect());

    io::Manifest rep;
    rep.set("c", p.speed());
    rep.set("lambda1", e.lambda1);
    rep.set("lambda2", e.lambda2);
    rep.set("mu1", e.mu1);
    rep.set("mu2", e.mu2);
    rep.set("M3", tb.M3);
    rep.set("M3_tilde", tb.M3_tilde);
    rep.set("M4", tb.M4);
    rep.set("M4_tilde", tb.M4_tilde);
    rep.set("residual", profile_residual(p, f));
    rep.set("integral01", f.integral01());
    rep.set("case", to_string(f.case_tag()));
    if (f.assumption() == AssumptionClass::Monostable)
        rep.set("c_min", minimal_speed(f));
    rep.save(out / "front_report.kv");

    io::Manifest run;
    run.set("reaction", c.reaction);
    run.set("ctol", o.ctol);
    if (o.speed > 0.0) run.set("speed", o.speed);
    run.save(out / "run.kv");

    std::cout << "front: c = " << io::fmt(p.speed()) << " (case "
              << to_string(f.case_tag()) << "), wrote "
              << (out / "profile.csv").string() << "\n";
    return 0;
}

struct EvolveOpts {
    std::string u0 = "front";
    double halfwidth = 0.0;
    double dx = 0.05;
    double dt = 0.0;
    double T = 5.0;
    double snapshot_dt = 0.25;
    std::string boundary = "neumann"; // or dirichlet-envelope
    double schauder_r = 0.0;
};

int cmd_evolve(const CommonOpts& c, const EvolveOpts& o) {
    apply_exec_policy(c);
    auto f = ReactionTerm::parse(c.reaction);
    fs::path out = resolve_out(c.out, "evolve");

    std::function<double(double)> init;
    std::function<double(double)> bleft, bright;
    double X = o.halfwidth;
    if (o.u0 == "front") {
        auto p = std::make_shared<FrontProfile>(
            f.assumption() == AssumptionClass::Bistable
                ? solve_front_bistable(f)
                : solve_front_monostable(f, minimal_speed(f)));
        double cspeed = p->speed();
        if (X <= 0.0)
            X = recommended_halfwidth(p->resolved_halfspan(1e-8), cspeed, o.T);
        init = [p](double x) { return p->value(x); };
        double Xc = X;
        bleft = [p, cspeed, Xc](double t) { return p->value(-Xc + cspeed * t); };
        bright = [p, cspeed, Xc](double t) { return p->value(Xc + cspeed * t); };
    } else if (o.u0.rfind("const:", 0) == 0) {
        double v = std::stod(o.u0.substr(6));
        init = [v](double) { return v; };
        if (X <= 0.0) X = 20.0;
    } else if (o.u0.rfind("bump:", 0) == 0) {
        auto vals = parse_list(o.u0.substr(5));
        if (vals.size() < 3)
            throw std::invalid_argument("bump:<low>,<high>,<halfwidth>[,<edge>]");
        double lo = vals[0], hi = vals[1], W = vals[2];
        double edge = vals.size() > 3 ? vals[3] : 2.0;
        init = [=](double x) {
            return lo + (hi - lo) * 0.5 *
                            (std::tanh((x + W) / edge) - std::tanh((x - W) / edge));
        };
        if (X <= 0.0) X = W + 40.0;
    } else if (o.u0.rfind("file:", 0) == 0) {
        auto traj = io::read_snapshots(o.u0.substr(5));
        const GridField& g = traj.snaps.back();
        double x0 = g.x0, dxg = g.dx;
        auto vals = std::make_shared<std::vector<double>>(g.u);
        init = [x0, dxg, vals](double x) {
            double s = (x - x0) / dxg;
            std::size_t i = std::min(std::size_t(std::max(0.0, s)), vals->size() - 2);
            double w = s - double(i);
            return (1.0 - w) * (*vals)[i] + w * (*vals)[i + 1];
        };
        if (X <= 0.0) X = -g.x0;
    } else {
        throw std::invalid_argument("unknown u0 spec: " + o.u0);
    }

    EvolveParams prm;
    prm.T = o.T;
    prm.dt = o.dt;
    prm.snapshot_dt = o.snapshot_dt;
    if (o.boundary == "neumann") {
        prm.boundary = NeumannBC{};
    } else if (o.boundary == "dirichlet-envelope") {
        if (!bleft)
            throw std::invalid_argument(
                "dirichlet-envelope boundary needs u0=front");
        prm.boundary = DirichletBC{bleft, bright};
    } else {
        throw std::invalid_argument("boundary must be neumann or dirichlet-envelope");
    }

    GridField u0 = GridField::sample(X, o.dx, 0.0, init);
    Trajectory traj = evolve(u0, f, prm);

    io::write_snapshots(out / "snapshots.snap", traj);
    io::write_field_csv(out / "final.csv", traj.snaps.back());
    {
        std::vector<std::pair<double, double>> norms;
        for (const auto& s : traj.snaps)
            norms.emplace_back(s.t, kernels::max_abs(s.u));
        io::write_series_csv(out / "norms.csv", "sup_abs_u", norms);
    }

    io::Manifest run;
    run.set("reaction", c.reaction);
    run.set("u0", o.u0);
    run.set("halfwidth", X);
    run.set("dx", o.dx);
    run.set("dt", o.dt);
    run.set("T", o.T);
    run.set("snapshot_dt", o.snapshot_dt);
    run.set("boundary", o.boundary);
    if (o.schauder_r > 0.0) run.set("schauder_r", o.schauder_r);
    run.save(out / "run.kv");

    int rc = 0;
    if (o.schauder_r > 0.0) {
        auto rep = derivative_bounds(traj, f, o.schauder_r);
        io::Manifest m;
        m.set("r", rep.r);
        m.set("L0", rep.L0);
        m.set("L1", rep.L1);
        m.set("L2", rep.L2);
        m.set("L3", rep.L3);
        m.set("L4", rep.L4);
        m.set("observed_sup_ux", rep.observed_sup_ux);
        m.set("observed_sup_uxx", rep.observed_sup_uxx);
        m.set("observed_sup_ut", rep.observed_sup_ut);
        m.set("pass", rep.pass);
        m.save(out / "schauder.kv");
        if (!rep.pass) rc = 1;
        std::cout << "schauder: sup_ux " << io::fmt(rep.observed_sup_ux)
                  << " <= L2 " << io::fmt(rep.L2) << " : "
                  << (rep.pass ? "pass" : "FAIL") << "\n";
    }
    std::cout << "evolve: " << traj.snaps.size() << " snapshots, final t = "
              << io::fmt(traj.t_back()) << "\n";
    return rc;
}

struct EntireOpts {
    std::string case_override = "auto";
    std::string n_list = "10,20,30";
    double dx = 0.05;
    double dt = 0.0;
    double halfwidth = 0.0;
    double t_end = 60.0;
    double min_t_end = 1.0;
    double m7 = 0.0, m8 = 0.0, m9 = 0.0, B = 0.0; // 0 -> calibrate or cache
    double p1_0 = 0.0, p2_0 = 0.0;
    double p3_0 = 1.0; // sentinel: 1 -> derived default
    double c1 = 2.0, c2 = 2.5;
    double alpha_tilde = 0.25;
    double rho0 = 3e-4;
    std::string variant = "u11";
    bool no_cache = false;
};

int cmd_entire(const CommonOpts& c, const EntireOpts& o) {
    apply_exec_policy(c);
    auto f = ReactionTerm::parse(c.reaction);
    fs::path out = resolve_out(c.out, "entire");

    CaseTag tag = f.case_tag();
    if (o.case_override != "auto") {
        std::string want = o.case_override;
        if (want != to_string(tag))
            throw std::invalid_argument("case override '" + want +
                                        "' does not match the reaction's case '" +
                                        to_string(tag) + "'");
    }
    if (tag == CaseTag::Balanced)
        throw std::invalid_argument(
            "balanced reaction terms have zero speed; no entire-solution case");

    EntireParams eprm;
    eprm.n_list = parse_list(o.n_list);
    eprm.dx = o.dx;
    eprm.dt = o.dt;
    eprm.halfwidth = o.halfwidth;
    eprm.t_end_cap = o.t_end;
    eprm.min_t_end = o.min_t_end;

    io::Manifest man;
    man.set("reaction", c.reaction);
    man.set("case", to_string(tag));

    std::size_t h = grid_hash(c.reaction, o.dx, o.dt, o.halfwidth);
    io::Manifest cache;
    bool have_cache = false;
    if (!o.no_cache && fs::exists(cache_path(h))) {
        cache = io::Manifest::load(cache_path(h));
        have_cache = true;
    }

    VerifyGrid vg;
    vg.dx = 0.05;
    vg.dt = 0.5;

    int rc = 0;
    auto record_checks = [&](const EntireSolutionApprox& a,
                             const FrontProfile& p) {
        man.set("halfwidth", a.halfwidth);
        man.set("t_end", a.t_end);
        man.set("settle_time", a.settle_time);
        man.set("cauchy_gaps", list_to_string(a.cauchy_gaps));
        bool gaps_ok = true;
        for (std::size_t i = 1; i < a.cauchy_gaps.size(); ++i)
            gaps_ok = gaps_ok && a.cauchy_gaps[i] < a.cauchy_gaps[i - 1];
        man.set("cauchy_decreasing", gaps_ok);
        man.set("confinement_below_sub", a.confinement.below_sub);
        man.set("confinement_above_super", a.confinement.above_super);
        man.set("confinement_below_sub_analytic",
                a.confinement.below_sub_analytic);
        man.set("confinement_above_super_analytic",
                a.confinement.above_super_analytic);
        man.set("confinement_pass", a.confinement.pass);

        auto sc = compute_constants(f);
        int sign = a.limit > 0.5 ? +1 : -1;
        auto mono = check_time_monotonicity(a, sign, sc.theta);
        man.set("dt_sign_pass", mono.pass);
        man.set("b_bar", mono.b_bar);
        man.set("b_tilde", mono.b_tilde);

        double t_early = a.principal().t_front() + 2.0;
        double t_late = std::min(-2.0, t_early + 4.0);
        auto asym = check_asymptotics(a, p, t_early, t_late);
        man.set("y1", asym.y1);
        man.set("y2", asym.y2);
        man.set("asymptotics_decay", asym.decay_ok);
        man.set("final_gap", asym.final_gap);

        if (!a.confinement.pass || !mono.pass || !gaps_ok || !asym.pass) rc = 1;

        for (std::size_t k = 0; k < a.members.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof name, "member_n%g.snap",
                          a.n_list[k]);
            io::write_snapshots(out / name, a.members[k]);
        }
        io::write_field_csv(out / "principal_final.csv",
                            a.principal().snaps.back());
        return mono;
    };

    if (tag == CaseTag::C1 || tag == CaseTag::C2) {
        auto p = solve_front_bistable(f);
        man.set("c", p.speed());
        bool is_c1 = tag == CaseTag::C1;
        double M = is_c1 ? o.m7 : o.m8;
        std::string key = is_c1 ? "m7" : "m8";
        if (M <= 0.0 && have_cache && cache.has(key)) M = cache.get_double(key);
        double lam1 = p.tail_rate_left();
        if (M <= 0.0) {
            M = calibrate_amplitude([&](double m) {
                if (is_c1) {
                    auto env = build_envelope_C1(p, m, o.p1_0);
                    return verify_inequality(env.super, f, vg).pass;
                }
                double p3d = default_c2_p3_initial(p.speed(), lam1, m, o.p2_0);
                auto env = build_envelope_C2(p, m, o.p2_0, p3d);
                return verify_inequality(env.super, f, vg).pass &&
                       verify_inequality(env.sub, f, vg).pass;
            });
            cache.set(key, M);
        }
        man.set(key, M);
        EnvelopePair env;
        if (is_c1) {
            env = build_envelope_C1(p, M, o.p1_0);
            man.set("p1_0", o.p1_0);
            man.set("x6", c1_sub_shift(p, M, o.p1_0));
        } else {
            double p3d = o.p3_0 <= 0.0
                             ? o.p3_0
                             : default_c2_p3_initial(p.speed(), lam1, M, o.p2_0);
            env = build_envelope_C2(p, M, o.p2_0, p3d);
            man.set("p2_0", o.p2_0);
            man.set("p3_0", p3d);
            ShiftFunction p3(ShiftKind::P3, p.speed(), lam1, M, p3d);
            man.set("x7", p3.x7());
            man.set("x8", p3.x8());
        }
        auto a = construct_entire(f, env, p, eprm);
        auto mono = record_checks(a, p);
        cache.set("b_bar", mono.b_bar);

        double x6 = is_c1 ? c1_sub_shift(p, M, o.p1_0) : 0.0;
        auto mrep = check_M_condition(a, f, p, true, x6);
        man.set("m_plus_pass", mrep.pass);
        man.set("m_plus_d", mrep.d);
        man.set("m_plus_T", mrep.T);
        if (!mrep.pass) rc = 1;
    } else if (tag == CaseTag::C3 || tag == CaseTag::C4) {
        auto p = solve_front_bistable(f);
        man.set("c", p.speed());
        double B = o.B;
        if (B <= 0.0 && have_cache && cache.has("B")) B = cache.get_double("B");
        double B_init = B > 0.0 ? B : 1.0;
        auto env = build_envelope_annihilating(p, B_init);
        auto a = construct_entire(f, env, p, eprm);
        auto mono = record_checks(a, p);
        cache.set("b_tilde", mono.b_tilde);

        if (B <= 0.0) {
            B = calibrate_band_B(a, p);
            cache.set("B", B);
        }
        man.set("B", B);
        auto band = check_band(a, p, B);
        man.set("band_pass", band.pass);
        man.set("band_worst_left", band.worst_left);
        man.set("band_worst_right", band.worst_right);
        double sym = check_symmetry(a);
        man.set("symmetry", sym);
        auto mrep = check_M_condition(a, f, p, false);
        man.set("m_minus_pass", mrep.pass);
        if (!band.pass || sym > 1e-10 || !mrep.pass) rc = 1;
    } else { // monostable
        auto p1 = solve_front_monostable(f, o.c1);
        auto p2 = solve_front_monostable(f, o.c2);
        man.set("c1", p1.speed());
        man.set("c2", p2.speed());
        MonostableEnvelopeParams mp;
        mp.alpha_tilde = o.alpha_tilde;
        mp.rho0 = o.rho0;
        if (o.variant == "u3") mp.variant = MonostableVariant::U3;
        else if (o.variant == "u10") mp.variant = MonostableVariant::U10;
        else if (o.variant == "u01") mp.variant = MonostableVariant::U01;
        else if (o.variant == "u11") mp.variant = MonostableVariant::U11;
        else throw std::invalid_argument("variant must be u3|u10|u01|u11");

        double M = o.m9;
        if (M <= 0.0 && have_cache && cache.has("m9")) M = cache.get_double("m9");
        if (M <= 0.0) {
            M = calibrate_amplitude([&](double m) {
                MonostableEnvelopeParams q = mp;
                q.m9 = m;
                auto env = build_envelope_monostable(p1, p2, f, q);
                VerifyGrid g = vg;
                g.x0 = -60;
                g.x1 = 60;
                return verify_inequality(env.super, f, g).pass;
            });
            cache.set("m9", M);
        }
        mp.m9 = M;
        man.set("m9", M);
        man.set("alpha_tilde", o.alpha_tilde);
        man.set("rho0", o.rho0);
        man.set("variant", o.variant);
        auto env = build_envelope_monostable(p1, p2, f, mp);
        auto a = construct_entire(f, env, p1, eprm);
        record_checks(a, p1);
    }

    if (!o.no_cache) cache.save(cache_path(h));

    io::Manifest run;
    run.set("reaction", c.reaction);
    run.set("case", o.case_override);
    run.set("n_list", o.n_list);
    run.set("dx", o.dx);
    run.set("dt", o.dt);
    run.set("halfwidth", o.halfwidth);
    run.set("t_end", o.t_end);
    run.set("min_t_end", o.min_t_end);
    if (man.has("m7")) run.set("m7", man.get("m7"));
    if (man.has("m8")) run.set("m8", man.get("m8"));
    if (man.has("m9")) run.set("m9", man.get("m9"));
    if (man.has("B")) run.set("B", man.get("B"));
    run.set("p1_0", o.p1_0);
    run.set("p2_0", o.p2_0);
    run.set("c1", o.c1);
    run.set("c2", o.c2);
    run.set("alpha_tilde", o.alpha_tilde);
    run.set("rho0", o.rho0);
    run.set("variant", o.variant);
    run.save(out / "run.kv");

    man.set("pass", rc == 0);
    man.save(out / "manifest.kv");
    std::cout << "entire: case " << to_string(tag) << ", "
              << (rc == 0 ? "all checks passed" : "CHECKS FAILED") << ", see "
              << (out / "manifest.kv").string() << "\n";
    return rc;
}

struct StabilityOpts {
    std::string experiment = "front";
    int pattern = 1;
    double delta = 0.02;
    double T = 0.0; // 0 -> per-experiment default
    double dx = 0.05;
    double beta1 = 0.1;
    double bump_halfwidth = 30.0;
    std::string entire_dir; // reuse an existing entire run for sandwich
    std::string n_list = "10,20,30";
};

int cmd_stability(const CommonOpts& c, const StabilityOpts& o) {
    apply_exec_policy(c);
    auto f = ReactionTerm::parse(c.reaction);
    fs::path out = resolve_out(c.out, "stability");

    io::CsvTable table;
    table.header = {"experiment", "delta",   "fitted_rate", "prefactor",
                    "residual",   "predicted_rate", "final_dev", "first_hit",
                    "pass",       "note"};
    auto add_report = [&](const StabilityReport& r) {
        table.add_row({r.experiment, io::fmt(r.perturbation_size),
                       io::fmt(r.fitted_rate), io::fmt(r.fitted_prefactor),
                       io::fmt(r.fit_residual), io::fmt(r.predicted_rate),
                       io::fmt(r.final_deviation), io::fmt(r.first_hit_time),
                       r.pass ? "true" : "false", r.note});
    };

    int rc = 0;
    if (o.experiment == "constant") {
        double alpha = f.alpha();
        double T = o.T > 0.0 ? o.T : 60.0;
        GridField u0 = GridField::sample(40.0, o.dx, 0.0, [&](double x) {
            switch (o.pattern) {
            case 1: return 0.9 - 0.7 * std::exp(-x * x / 64.0);
            case 2: return alpha + 0.05;
            case 3: return 0.05 + 0.85 * std::exp(-x * x);
            default: return alpha - 0.05;
            }
        });
        auto rep = constant_convergence(f, u0, o.pattern, T);
        add_report(rep);
        if (!rep.pass) rc = 1;
    } else if (o.experiment == "front") {
        auto p = solve_front_bistable(f);
        double T = o.T > 0.0 ? o.T : 25.0;
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> center(-5.0, 5.0);
        double x0 = center(rng);
        auto rep = front_stability(
            f, p,
            [x0](double x) { return std::exp(-(x - x0) * (x - x0) / 4.0); },
            o.delta, T, o.dx);
        add_report(rep);
        io::write_series_csv(out / "front_shifts.csv", "shift",
                             [&] {
                                 std::vector<std::pair<double, double>> s;
                                 for (std::size_t i = 0;
                                      i < rep.shift_estimates.size(); ++i)
                                     s.emplace_back(0.25 * double(i),
                                                    rep.shift_estimates[i]);
                                 return s;
                             }());
        if (!rep.pass) rc = 1;
    } else if (o.experiment == "diverging") {
        auto p = solve_front_bistable(f);
        double T = o.T > 0.0 ? o.T : 60.0;
        DivergingPairSpec spec;
        spec.beta = o.beta1;
        spec.halfwidth = o.bump_halfwidth;
        spec.expand_to_1 = f.integral01() > 0.0;
        auto rep = diverging_pair(f, p, spec, T, o.dx);
        StabilityReport r;
        r.experiment = "diverging_pair";
        r.perturbation_size = o.beta1;
        r.fitted_rate = rep.speed_left;
        r.fitted_prefactor = rep.speed_right;
        r.predicted_rate = p.speed();
        r.final_deviation = rep.half_deviation;
        r.pass = rep.pass;
        r.note = rep.two_fronts ? "two fronts" :
                 (rep.collapsed ? "collapsed (below-threshold outcome)" : "no fronts");
        add_report(r);
        if (!rep.pass && !rep.collapsed) rc = 1;
    } else if (o.experiment == "sandwich") {
        auto sc = compute_constants(f);
        if (o.delta > sc.theta)
            throw std::invalid_argument("delta exceeds the collar width theta");
        auto p = solve_front_bistable(f);
        auto e = edge_eigenvalues(f, p.speed());
        auto tails = fit_tail_constants(p, e);

        EnvelopePair env;
        double M;
        if (f.case_tag() == CaseTag::C1) {
            VerifyGrid vg;
            vg.dx = 0.05;
            vg.dt = 0.5;
            M = calibrate_amplitude([&](double m) {
                auto envc = build_envelope_C1(p, m, 0.0);
                return verify_inequality(envc.super, f, vg).pass;
            });
            env = build_envelope_C1(p, M, 0.0);
        } else if (f.case_tag() == CaseTag::C3 || f.case_tag() == CaseTag::C4) {
            env = build_envelope_annihilating(p, 1.0);
        } else {
            throw std::invalid_argument(
                "sandwich experiment supports C1 or C3/C4 reactions here");
        }
        EntireParams eprm;
        eprm.n_list = parse_list(o.n_list);
        eprm.dx = o.dx;
        auto a = construct_entire(f, env, p, eprm);
        int sign = a.limit > 0.5 ? +1 : -1;
        auto mono = check_time_monotonicity(a, sign, sc.theta);
        if (sign > 0) sc.b_bar = mono.b_bar; else sc.b_tilde = mono.b_tilde;

        double T = o.T > 0.0 ? o.T : 45.0;
        auto rep = sandwich_stability(a, f, sc, p, tails, o.delta, T);
        StabilityReport r;
        r.experiment = "sandwich";
        r.perturbation_size = o.delta;
        r.fitted_rate = rep.fitted_rate;
        r.fit_residual = rep.fit_residual;
        r.predicted_rate = rep.predicted_rate;
        r.final_deviation = std::max(rep.worst_below, rep.worst_above);
        r.pass = rep.pass;
        r.note = rep.sandwich_pass ? "sandwich held" : "sandwich violated";
        add_report(r);
        if (!rep.pass) rc = 1;
    } else if (o.experiment == "lbound") {
        auto p = solve_front_bistable(f);
        auto e = edge_eigenvalues(f, p.speed());
        auto tb = fit_tail_constants(p, e);
        auto sc = compute_constants(f);
        LowerBoundInputs in;
        in.alpha = f.alpha();
        in.beta1 = o.beta1;
        in.beta = 0.5;
        in.M3 = tb.M3;
        in.M4 = tb.M4;
        in.b = sc.b;
        in.w = sc.w;
        in.c = p.speed();
        in.mu2 = e.mu2;
        in.lambda1 = e.lambda1;
        double bound;
        if (p.speed() > 0.0) {
            in.q0 = std::max(0.55, 1.0 - in.alpha - in.beta1 + 0.05);
            in.q1 = 0.5 * (in.q0 + 1.0);
            bound = lower_bound_L1(in);
        } else {
            in.q0 = in.alpha - in.beta1 + 0.25 * in.beta1;
            in.q1 = in.alpha - 0.25 * in.beta1;
            bound = lower_bound_L2(in);
        }
        StabilityReport r;
        r.experiment = p.speed() > 0.0 ? "lower_bound_L1" : "lower_bound_L2";
        r.perturbation_size = o.beta1;
        r.fitted_rate = bound;
        r.pass = bound > 0.0;
        r.note = "bump half-width lower bound";
        add_report(r);
        if (!r.pass) rc = 1;
    } else {
        throw std::invalid_argument("unknown experiment: " + o.experiment);
    }

    table.save(out / "stability.csv");
    io::Manifest run;
    run.set("reaction", c.reaction);
    run.set("experiment", o.experiment);
    run.set("pattern", double(o.pattern));
    run.set("delta", o.delta);
    run.set("T", o.T);
    run.set("dx", o.dx);
    run.set("beta1", o.beta1);
    run.set("bump_halfwidth", o.bump_halfwidth);
    run.set("n_list", o.n_list);
    run.save(out / "run.kv");
    std::cout << "stability: wrote " << (out / "stability.csv").string()
              << (rc == 0 ? " (pass)" : " (FAIL)") << "\n";
    return rc;
}

struct SweepOpts {
    int count = 20;
    std::string family = "mixed"; // cubic | quartic | mixed
    double ctol = 1e-10;
};

int cmd_sweep(const CommonOpts& c, const SweepOpts& o) {
    apply_exec_policy(c);
    fs::path out = resolve_out(c.out, "sweep");
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> ua(0.15, 0.85);
    std::uniform_real_distribution<double> ub(-0.6, 1.5);

    io::CsvTable table;
    table.header = {"reaction", "integral", "c", "sign_consistent"};
    int rc = 0;
    for (int k = 0; k < o.count; ++k) {
        bool quartic = o.family == "quartic" || (o.family == "mixed" && k % 2 == 1);
        double alpha = ua(rng);
        ReactionTerm f = ReactionTerm::cubic(alpha);
        if (quartic) {
            double beta = ub(rng);
            std::vector<double> cubic{0.0, -alpha, 1.0 + alpha, -1.0};
            std::vector<double> coeffs(cubic.size() + 1, 0.0);
            for (std::size_t i = 0; i < cubic.size(); ++i) {
                coeffs[i] += cubic[i];
                coeffs[i + 1] += beta * cubic[i];
            }
            f = ReactionTerm::polynomial(coeffs);
        }
        auto p = solve_front_bistable(f, o.ctol);
        double I = f.integral01();
        bool consistent = std::abs(I) <= 1e-8 ? std::abs(p.speed()) < 1e-6
                                              : I * p.speed() > 0.0;
        if (!consistent) rc = 1;
        table.add_row({f.spec(), io::fmt(I), io::fmt(p.speed()),
                       consistent ? "true" : "false"});
    }
    table.save(out / "sweep.csv");
    io::Manifest run;
    run.set("count", double(o.count));
    run.set("family", o.family);
    run.set("seed", double(c.seed));
    run.set("ctol", o.ctol);
    run.save(out / "run.kv");
    std::cout << "sweep: " << o.count << " reactions, "
              << (rc == 0 ? "sign law holds" : "sign law VIOLATED") << "\n";
    return rc;
}

int cmd_report(const std::string& dir) {
    fs::path d = dir;
    if (!fs::exists(d)) throw std::invalid_argument("no such directory: " + dir);
    bool found = false;
    for (const auto& entry : fs::directory_iterator(d)) {
        auto p = entry.path();
        if (p.extension() == ".kv") {
            found = true;
            std::cout << "== " << p.filename().string() << " ==\n";
            auto m = io::Manifest::load(p);
            for (const auto& [k, v] : m.entries())
                std::cout << "  " << k << " = " << v << "\n";
        } else if (p.extension() == ".csv") {
            found = true;
            std::ifstream is(p);
            std::string line;
            std::size_t rows = 0;
            std::string header;
            while (std::getline(is, line)) {
                if (rows == 0) header = line;
                ++rows;
            }
            std::cout << "== " << p.filename().string() << " == (" << rows - 1
                      << " rows)\n  " << header << "\n";
        }
    }
    if (!found) std::cout << "nothing to report in " << dir << "\n";
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"numerical laboratory for fronts and entire solutions of "
                 "1D reaction-diffusion equations"};
    app.require_subcommand(1);

    CommonOpts common;
    FrontOpts fo;
    EvolveOpts eo;
    EntireOpts no;
    StabilityOpts so;
    SweepOpts wo;
    std::string report_dir = ".";

    auto* front = app.add_subcommand("front", "solve a traveling front");
    add_common(front, common);
    front->add_option("--speed", fo.speed, "requested speed (monostable)");
    front->add_option("--ctol", fo.ctol, "speed bisection tolerance");
    front->add_flag("--reflect", fo.reflect, "also write the reflected profile");

    auto* evolve_cmd = app.add_subcommand("evolve", "evolve initial data");
    add_common(evolve_cmd, common);
    evolve_cmd->add_option("--u0", eo.u0, "front | const:<v> | bump:<lo>,<hi>,<W>[,<edge>] | file:<snap>");
    evolve_cmd->add_option("--halfwidth", eo.halfwidth, "domain half-width (0 = auto)");
    evolve_cmd->add_option("--dx", eo.dx, "grid spacing");
    evolve_cmd->add_option("--dt", eo.dt, "time step (0 = default)");
    evolve_cmd->add_option("--T", eo.T, "final time");
    evolve_cmd->add_option("--snapshot-dt", eo.snapshot_dt, "snapshot spacing");
    evolve_cmd->add_option("--boundary", eo.boundary, "neumann | dirichlet-envelope");
    evolve_cmd->add_option("--schauder-r", eo.schauder_r,
                           "emit the derivative-bound report for this window r");

    auto* entire_cmd = app.add_subcommand("entire", "construct an entire solution");
    add_common(entire_cmd, common);
    entire_cmd->add_option("--case", no.case_override, "auto | C1 | C2 | C3 | C4 | monostable");
    entire_cmd->add_option("--n-list", no.n_list, "backward start times");
    entire_cmd->add_option("--dx", no.dx, "grid spacing");
    entire_cmd->add_option("--dt", no.dt, "time step (0 = default)");
    entire_cmd->add_option("--halfwidth", no.halfwidth, "domain half-width (0 = auto)");
    entire_cmd->add_option("--t-end", no.t_end, "forward horizon cap");
    entire_cmd->add_option("--min-t-end", no.min_t_end, "do not stop before this time");
    entire_cmd->add_option("--m7", no.m7, "amplitude for the C1 envelopes (0 = calibrate)");
    entire_cmd->add_option("--m8", no.m8, "amplitude for the C2 envelopes (0 = calibrate)");
    entire_cmd->add_option("--m9", no.m9, "amplitude for the monostable envelopes (0 = calibrate)");
    entire_cmd->add_option("--B", no.B, "band constant for C3/C4 (0 = calibrate)");
    entire_cmd->add_option("--p1-0", no.p1_0, "p1(0) <= 0");
    entire_cmd->add_option("--p2-0", no.p2_0, "p2(0) <= 0");
    entire_cmd->add_option("--p3-0", no.p3_0, "p3(0) (default derived)");
    entire_cmd->add_option("--c1", no.c1, "first monostable speed");
    entire_cmd->add_option("--c2", no.c2, "second monostable speed");
    entire_cmd->add_option("--alpha-tilde", no.alpha_tilde, "monostable shift rate");
    entire_cmd->add_option("--rho0", no.rho0, "homogeneous solution value at t=0");
    entire_cmd->add_option("--variant", no.variant, "u3 | u10 | u01 | u11");
    entire_cmd->add_flag("--no-cache", no.no_cache, "skip the calibration cache");

    auto* stab = app.add_subcommand("stability", "run a stability experiment");
    add_common(stab, common);
    stab->add_option("--experiment", so.experiment,
                     "constant | front | diverging | sandwich | lbound");
    stab->add_option("--pattern", so.pattern, "constant-convergence pattern 1..4");
    stab->add_option("--delta", so.delta, "perturbation size");
    stab->add_option("--T", so.T, "horizon (0 = default)");
    stab->add_option("--dx", so.dx, "grid spacing");
    stab->add_option("--beta1", so.beta1, "bump height margin");
    stab->add_option("--bump-halfwidth", so.bump_halfwidth, "bump half-width");
    stab->add_option("--n-list", so.n_list, "backward start times (sandwich)");

    auto* sweep = app.add_subcommand("sweep", "speed-integral sign law sweep");
    add_common(sweep, common);
    sweep->add_option("--count", wo.count, "number of random reactions");
    sweep->add_option("--family", wo.family, "cubic | quartic | mixed");
    sweep->add_option("--ctol", wo.ctol, "speed bisection tolerance");

    auto* report = app.add_subcommand("report", "summarize an output directory");
    report->add_option("--in", report_dir, "directory to summarize");

    take_last_everywhere(&app);

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    // CLI11 parses reversed argv
    std::vector<std::string> rev(expanded.rbegin(), expanded.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (front->parsed()) return cmd_front(common, fo);
        if (evolve_cmd->parsed()) return cmd_evolve(common, eo);
        if (entire_cmd->parsed()) return cmd_entire(common, no);
        if (stab->parsed()) return cmd_stability(common, so);
        if (sweep->parsed()) return cmd_sweep(common, wo);
        if (report->parsed()) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace rdlab
