#include "runners.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "output.hpp"
#include "polylab/collapse.hpp"
#include "polylab/copoly.hpp"
#include "polylab/error.hpp"
#include "polylab/homopin.hpp"
#include "polylab/randpin.hpp"
#include "polylab/randpot.hpp"
#include "polylab/undirected.hpp"

namespace polylab::app {

using nlohmann::json;

std::string tool_version() { return "0.1.0"; }

namespace {

struct Emitter {
    const RunConfig& cfg;
    RunOutput out;

    void table(const std::string& stem, const Table& t) {
        if (cfg.format == "json")
            out.files.push_back({stem + ".json", dump_json(t.to_json())});
        else
            out.files.push_back({stem + ".csv", t.to_csv()});
    }
    void report(const std::string& stem, const json& j) { out.files.push_back({stem + ".json", dump_json(j)}); }
};

int as_int(const RunConfig& c, const std::string& k, long lo, long hi) {
    const long v = c.integer(k);
    if (v < lo || v > hi)
        throw ConfigError("config", k + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return int(v);
}

double b01(bool b) { return b ? 1.0 : 0.0; }

// ---- homopin

TailedLaw homopin_law(const RunConfig& c) {
    const auto w = c.text("walk");
    const auto nh = std::size_t(as_int(c, "n_head", 16, 10000000));
    if (w == "srw") return TailedLaw::srw(nh);
    if (w == "lazy") return homopin::lazy_return_law({c.num("p")}, nh);
    return TailedLaw::zeta_law(c.num("a"), nh);
}

void run_homopin(Emitter& e) {
    const auto& c = e.cfg;
    const auto mode = c.text("mode");
    if (mode == "pinned" || mode == "wetting") {
        const TailedLaw R = homopin_law(c);
        const auto spec = mode == "pinned" ? homopin::PinningSpec::pinned(R)
                                           : homopin::PinningSpec::wetting(R, R.scaled(0.5));
        const auto zs = c.grid("zeta");
        const bool closed = mode == "pinned" && c.text("walk") == "srw";
        Table t{{"zeta", "f", "contact_fraction"}, {}};
        if (closed) t.columns.push_back("f_closed_form");
        std::vector<std::vector<double>> rows(zs.size());
        parallel_for(zs.size(), c.threads, [&](std::size_t i) {
            const double z = zs[i];
            rows[i] = {z, homopin::free_energy(spec, z), homopin::contact_fraction(spec, z)};
            if (closed) rows[i].push_back(z > 0 ? 0.5 * (z - std::log(2.0 - std::exp(-z))) : 0.0);
        });
        for (auto& r : rows) t.add(std::move(r));
        e.table("homopin_" + mode, t);
        e.report("homopin_report", {{"mode", mode}, {"walk", c.text("walk")}, {"zeta_c", spec.zeta_c()}});
    } else if (mode == "reentrance") {
        const homopin::PulledModel model({c.num("p")}, std::size_t(as_int(c, "n_head", 16, 10000000)));
        const auto curve = homopin::force_temperature_curve(model, c.grid("T"), c.threads);
        Table t{{"T", "F_c"}, {}};
        for (std::size_t i = 0; i < curve.size(); ++i) t.add({curve.xs[i], curve.ys[i]});
        e.table("homopin_reentrance", t);
        e.report("homopin_report", {{"mode", mode}, {"p", c.num("p")}, {"reentrant", homopin::reentrance_detect(curve)}});
    } else {
        const auto fit = homopin::critical_exponent_fit(homopin_law(c));
        e.report("homopin_report", {{"mode", mode},
                                    {"walk", c.text("walk")},
                                    {"a", fit.a},
                                    {"exponent", fit.exponent},
                                    {"amplitude", fit.amplitude},
                                    {"reference_amplitude", fit.reference_amplitude}});
    }
}

// ---- collapse

void run_collapse(Emitter& e) {
    const auto& c = e.cfg;
    const auto mode = c.text("mode");
    if (mode == "critical-point") {
        const auto cp = collapse::collapse_point();
        e.report("collapse_report", {{"mode", mode}, {"x_c", cp.x_c}, {"gamma_c", cp.gamma_c}});
        return;
    }
    if (mode == "free-energy") {
        const auto g = c.grid("gamma");
        const auto f = collapse::free_energy_curve(g, c.threads);
        const auto d = collapse::touch_density(g, c.threads);
        Table t{{"gamma", "f", "touch_density"}, {}};
        for (std::size_t i = 0; i < g.size(); ++i) t.add({g[i], f.ys[i], d.ys[i]});
        e.table("collapse_free_energy", t);
        const auto cp = collapse::collapse_point();
        e.report("collapse_report", {{"mode", mode}, {"gamma_c", cp.gamma_c}});
        return;
    }
    const int n_max = as_int(c, "n_max", 1, 20);
    const auto table = collapse::enumerate(n_max, c.threads);
    if (mode == "enumerate") {
        Table t{{"n", "m", "count"}, {}};
        for (int n = 1; n <= n_max; ++n)
            for (std::size_t m = 0; m < table.c[std::size_t(n)].size(); ++m)
                t.add({double(n), double(m), double(table.c[std::size_t(n)][m])});
        e.table("collapse_enumeration", t);
        e.report("collapse_report", {{"mode", mode}, {"n_max", n_max}, {"normalization", collapse::arbitrate_normalization(table).describe()}});
        return;
    }
    const auto pts = collapse::critical_points(c.grid("x"), table, c.threads);
    Table t{{"x", "y_series", "unc_series", "y_singular", "unc_singular", "on_hyperbola"}, {}};
    for (const auto& p : pts) t.add({p.x, p.y_series, p.unc_series, p.y_singular, p.unc_singular, b01(p.on_hyperbola)});
    e.table("collapse_critical_curve", t);
    e.report("collapse_report", {{"mode", mode}, {"n_max", n_max}, {"normalization", collapse::arbitrate_normalization(table).describe()}});
}

// ---- undirected

void run_undirected(Emitter& e) {
    const auto& c = e.cfg;
    const auto mode = c.text("mode");
    const int d = as_int(c, "d", 1, 3);
    const auto ns = c.int_grid("n");
    if (ns.front() < 1) throw ConfigError("config", "n must be >= 1");
    if (mode == "identity") {
        const long paths = as_int(c, "paths", 1, 100000000);
        Table t{{"n", "paths", "max_abs_residual4d", "nonzero_residuals"}, {}};
        for (int n : ns) {
            std::vector<std::int64_t> res(static_cast<std::size_t>(paths));
            const SeedSpec ss{c.seed};
            parallel_for(res.size(), c.threads, [&](std::size_t k) {
                Stream s = ss.stream(k);
                res[k] = undirected::local_time_identity_check(undirected::LatticePath::random(d, std::size_t(n), s)).residual4d;
            });
            std::int64_t worst = 0, bad = 0;
            for (auto r : res) {
                worst = std::max<std::int64_t>(worst, std::abs(r));
                bad += r != 0;
            }
            t.add({double(n), double(paths), double(worst), double(bad)});
        }
        e.table("undirected_identity", t);
        e.report("undirected_report", {{"mode", mode}, {"d", d}});
        return;
    }
    if (mode == "exact") {
        Table t{{"n", "logZ", "mean_I", "mean_J", "mean_end2", "mean_range"}, {}};
        for (int n : ns) {
            const auto g = undirected::exact_gibbs_small(c.num("beta"), c.num("gamma"), n, d);
            t.add({double(n), g.logZ, g.mean_I, g.mean_J, g.mean_end2, g.mean_range});
        }
        e.table("undirected_exact", t);
        e.report("undirected_report", {{"mode", mode}, {"d", d}, {"beta", c.num("beta")}, {"gamma", c.num("gamma")}});
        return;
    }
    undirected::McConfig base;
    base.beta = c.num("beta");
    base.gamma = c.num("gamma");
    base.d = d;
    base.sweeps = std::size_t(as_int(c, "sweeps", 10, 100000000));
    base.box_eps = c.num("box_eps");
    base.seed = c.seed;
    const auto fit = undirected::scaling_fit(base, ns, c.threads);
    Table t{{"n", "range", "range_se", "end2", "end2_se", "I", "I_se", "J", "J_se", "inside", "acc_local", "acc_pivot"}, {}};
    for (std::size_t i = 0; i < fit.ns.size(); ++i) {
        const auto& g = fit.diag[i];
        t.add({double(fit.ns[i]), g.range.mean, g.range.stderr_, g.end2.mean, g.end2.stderr_, g.I.mean, g.I.stderr_, g.J.mean,
               g.J.stderr_, g.inside.mean, g.acceptance_local, g.acceptance_pivot});
    }
    e.table("undirected_mc", t);
    json r = {{"mode", mode}, {"d", d}, {"beta", base.beta}, {"gamma", base.gamma}};
    if (fit.ns.size() > 1) {
        r["nu"] = fit.nu;
        r["range_slope"] = fit.range_slope;
    }
    e.report("undirected_report", r);
}

// ---- randpin

randpin::RandomPinningSpec randpin_spec(const RunConfig& c) {
    const auto law = DisorderLaw::from_name(c.text("law"));
    const TailedLaw R = c.text("tail") == "srw" ? TailedLaw::srw(256) : TailedLaw::zeta_law(c.num("a"));
    return randpin::RandomPinningSpec::make(R, law);
}

void run_randpin(Emitter& e) {
    const auto& c = e.cfg;
    const auto mode = c.text("mode");
    const auto spec = randpin_spec(c);
    if (mode == "chi") {
        const auto ch = randpin::chi(spec.R, std::size_t(as_int(c, "chi_n_max", 16, 1 << 24)));
        const auto rb = randpin::relevance_bounds(spec, std::size_t(c.integer("chi_n_max")));
        e.report("randpin_report", {{"mode", mode},
                                    {"a", spec.a},
                                    {"chi", ch.value},
                                    {"chi_tail_bound", ch.tail_bound},
                                    {"chi_divergent", ch.divergent},
                                    {"beta_c_star", rb.beta_c_star},
                                    {"beta_c_star_star", rb.beta_c_star_star},
                                    {"h_R", rb.h_R},
                                    {"harris", randpin::to_string(randpin::harris_classify(spec))}});
        return;
    }
    const auto n = std::size_t(as_int(c, "n", 2, 100000000));
    const int reps = as_int(c, "replicas", 16, 1000000);
    if (mode == "hc") {
        Table t{{"beta", "annealed", "hc_lo", "hc_hi"}, {}};
        for (double b : c.grid("beta")) {
            const auto iv = randpin::hc_que_interval(spec, b, n, reps, c.seed, c.threads, as_int(c, "steps", 1, 60));
            t.add({b, randpin::annealed_hc(spec.mu0, b), iv.lo, iv.hi});
        }
        e.table("randpin_hc", t);
        e.report("randpin_report", {{"mode", mode}, {"n", n}, {"replicas", reps}});
        return;
    }
    const double beta = c.num("beta");
    Table t{{"h", "f", "stderr", "min_f", "finite_size_floor", "annealed", "localized"}, {}};
    for (double h : c.grid("h")) {
        const auto q = randpin::quenched_f(spec, beta, h, n, reps, c.seed, c.threads);
        t.add({h, q.est.mean, q.est.stderr_, q.diag.min_f, q.diag.finite_size_floor, q.diag.annealed,
               b01(q.est.mean > 3.0 * q.est.stderr_)});
    }
    e.table("randpin_f", t);
    e.report("randpin_report", {{"mode", mode}, {"beta", beta}, {"n", n}, {"replicas", reps}, {"hc_annealed", randpin::annealed_hc(spec.mu0, beta)}});
}

// ---- copoly

void run_copoly(Emitter& e) {
    const auto& c = e.cfg;
    const auto mode = c.text("mode");
    copoly::CopolySpec spec;
    spec.mu0 = DisorderLaw::from_name(c.text("law"));
    if (mode == "bounds") {
        Table t{{"beta", "lower", "upper", "approximation", "duality_residual"}, {}};
        for (double b : c.grid("beta")) {
            const auto bd = copoly::hc_bounds(b, spec.mu0);
            t.add({b, bd.lower, bd.upper, copoly::slope_approximation(b), copoly::duality_check(spec.mu0, b)});
        }
        e.table("copoly_bounds", t);
        e.report("copoly_report", {{"mode", mode}, {"law", spec.mu0.name()}});
        return;
    }
    const auto n = std::size_t(as_int(c, "n", 2, 100000000));
    const int reps = as_int(c, "replicas", 16, 1000000);
    if (mode == "g") {
        const double beta = c.num("beta");
        Table t{{"h", "g", "stderr", "min_g", "finite_size_floor", "localized"}, {}};
        for (double h : c.grid("h")) {
            const auto q = copoly::quenched_g(spec, beta, h, n, reps, c.seed, c.threads);
            t.add({h, q.est.mean, q.est.stderr_, q.min_g, q.finite_size_floor, b01(q.localized)});
        }
        e.table("copoly_g", t);
        const auto bd = copoly::hc_bounds(beta, spec.mu0);
        e.report("copoly_report", {{"mode", mode}, {"beta", beta}, {"lower", bd.lower}, {"upper", bd.upper}});
        return;
    }
    if (mode == "slope") {
        const auto rows = copoly::slope_estimate(spec, c.grid("beta"), n, reps, c.seed, c.threads, as_int(c, "steps", 1, 40));
        Table t{{"beta", "lower_over_beta", "upper_over_beta", "mc_lo_over_beta", "mc_hi_over_beta", "contained"}, {}};
        for (const auto& r : rows)
            t.add({r.beta, r.lower_over_beta, r.upper_over_beta, r.mc_lo_over_beta, r.mc_hi_over_beta, b01(r.contained)});
        e.table("copoly_slope", t);
        e.report("copoly_report", {{"mode", mode}, {"n", n}, {"replicas", reps}});
        return;
    }
    const auto deltas = c.grid("delta");
    const auto sm = copoly::smoothing_bound(spec.mu0, deltas);
    const double beta = c.num("beta");
    const double upper = copoly::hc_bounds(beta, spec.mu0).upper;
    Table t{{"delta", "three_halves_sigma", "quarter_delta2", "envelope"}, {}};
    if (c.flag("mc")) t.columns.insert(t.columns.end(), {"g_mc", "g_stderr"});
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        std::vector<double> row = {deltas[i], sm.three_halves_sigma[i], sm.quarter_delta2[i], sm.envelope[i]};
        if (c.flag("mc")) {
            const auto q = copoly::quenched_g(spec, beta, std::max(0.0, upper - deltas[i]), n, reps, c.seed, c.threads);
            row.push_back(q.est.mean);
            row.push_back(q.est.stderr_);
        }
        t.add(std::move(row));
    }
    e.table("copoly_smoothing", t);
    e.report("copoly_report", {{"mode", mode}, {"beta", beta}, {"upper", upper}});
}

// ---- randpot

void run_randpot(Emitter& e) {
    const auto& c = e.cfg;
    const auto law = DisorderLaw::from_name(c.text("law"));
    const double beta = c.num("beta");
    const int d = as_int(c, "d", 1, 3), n = as_int(c, "n", 1, 100000);
    const auto st = randpot::exact_Y(law, beta, d, n, as_int(c, "replicas", 2, 10000000), c.seed, c.threads);
    Table t{{"n", "meanY", "stderrY", "medianY", "maxend", "msd_over_n"}, {}};
    for (int i = 1; i <= n; ++i)
        t.add({double(i), st.meanY[std::size_t(i)], st.stderrY[std::size_t(i)], st.medianY[std::size_t(i)],
               st.maxend[std::size_t(i)], st.msd_over_n[std::size_t(i)]});
    e.table("randpot_Y", t);

    const auto pi = randpot::pi_d(d, as_int(c, "horizon", 100, 100000000), as_int(c, "pi_replicas", 100, 1000000000), c.seed, c.threads);
    const auto bb = randpot::beta_bounds(law, d, pi);
    const auto D = randpot::deltas(law, beta);
    e.report("randpot_bounds", {{"d", d},
                                {"law", law.name()},
                                {"beta", beta},
                                {"delta1", D.delta1},
                                {"delta2", D.delta2},
                                {"pi_d", {{"estimate", pi.estimate}, {"stderr", pi.stderr_}, {"ci", {pi.lo, pi.hi}}, {"exact", pi.exact}}},
                                {"beta_c1", bb.beta_c1},
                                {"beta_c1_ci", {bb.beta_c1_lo, bb.beta_c1_hi}},
                                {"beta_c2", bb.beta_c2},
                                {"frac_Y_below_half", st.frac_below_half},
                                {"frac_Y_below_tenth", st.frac_below_tenth}});
}

}  // namespace

RunOutput run_model(const RunConfig& cfg) {
    validate(cfg);
    Emitter e{cfg, {}};
    const auto& m = cfg.subcommand;
    if (m == "homopin") run_homopin(e);
    else if (m == "collapse") run_collapse(e);
    else if (m == "undirected") run_undirected(e);
    else if (m == "randpin") run_randpin(e);
    else if (m == "copoly") run_copoly(e);
    else if (m == "randpot") run_randpot(e);
    else throw ConfigError("config", "unknown subcommand '" + m + "'");
    return std::move(e.out);
}

json write_outputs(const RunConfig& cfg, const RunOutput& out, double wall_seconds) {
    const std::filesystem::path dir(cfg.out_dir);
    json files = json::array();
    for (const auto& f : out.files) {
        write_atomic(dir / f.name, f.bytes);
        files.push_back({{"file", f.name}, {"sha256", sha256_hex(f.bytes)}, {"bytes", f.bytes.size()}});
    }
    json manifest = {{"tool", "polylab"}, {"version", tool_version()}, {"config", cfg.to_json()}, {"wall_seconds", wall_seconds}, {"outputs", files}};
    write_atomic(dir / "manifest.json", dump_json(manifest));
    return manifest;
}

std::vector<std::string> verify_manifest(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f) throw ConfigError("config", "cannot open " + manifest_path);
    const json m = json::parse(f, nullptr, false);
    if (m.is_discarded() || !m.contains("outputs")) throw ConfigError("config", manifest_path + " is not a manifest");
    const auto dir = std::filesystem::path(manifest_path).parent_path();
    std::vector<std::string> bad;
    for (const auto& o : m["outputs"]) {
        const auto name = o.at("file").get<std::string>();
        std::ifstream in(dir / name, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        if (!in || sha256_hex(ss.str()) != o.at("sha256").get<std::string>()) bad.push_back(name);
    }
    return bad;
}

}  // namespace polylab::app
