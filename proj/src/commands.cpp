#include "fraclab/cli.hpp"

#include "fraclab/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace fraclab {

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json header(const std::string& command) {
    Json j;
    j["version"] = kVersion;
    j["command"] = command;
    return j;
}

void set_violation(CommandResult& res, const std::string& module, const std::string& invariant) {
    if (res.exit_code == 1) return;
    res.exit_code = 1;
    res.report["violation"] = {{"module", module}, {"invariant", invariant}};
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss << std::setprecision(17) << x;
    return ss.str();
}

Json manifold_json(const ManifoldBlock& mb) {
    Json j;
    j["n"] = mb.n;
    j["warping"] = mb.warping.name();
    if (mb.warping.kind() == WarpingKind::log_blend) j["c"] = mb.warping.blend();
    j["r_max"] = mb.r_max;
    j["nodes"] = mb.nodes;
    j["grid"] = mb.grid.kind == GridKind::graded ? "graded" : "uniform";
    j["grid_scale"] = mb.grid.scale;
    return j;
}

Json assumptions_json(const AssumptionReport& a) {
    Json j;
    j["sup_correction"] = a.sup_correction;
    j["volume_ratio_min"] = a.volume_ratio_min;
    j["volume_ratio_max"] = a.volume_ratio_max;
    j["ricci_ok"] = a.ricci_ok;
    j["slope_bound_ok"] = a.slope_bound_ok;
    j["passes"] = a.passes;
    j["thresholds"] = {{"c_max", a.thresholds.c_max}, {"v_lo", a.thresholds.v_lo}, {"v_hi", a.thresholds.v_hi}};
    j["failures"] = a.failures;
    return j;
}

Json fit_json(const ScalingFit& f, double tol) {
    Json j;
    j["case_id"] = f.case_id;
    j["gamma"] = f.gamma;
    if (f.case_id == "case1") j["alpha"] = f.alpha;
    j["fitted_exponent"] = f.fitted_exponent;
    j["predicted_exponent"] = f.predicted_exponent;
    j["residual"] = f.residual;
    j["passes"] = f.within(tol);
    Json samples = Json::array();
    for (const auto& s : f.samples) samples.push_back({{"scale", s.scale}, {"integral", s.integral}, {"tail", s.tail}});
    j["samples"] = samples;
    return j;
}

SpectralOperator build_operator(const ManifoldBlock& mb, const OperatorBlock& ob) {
    return assemble(build_model(mb), ob.bc);
}

}  // namespace

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

CommandResult cmd_check_manifold(const RunConfig& cfg) {
    const auto mb = manifold_block(cfg);
    const auto model = build_model(mb);
    const auto rep = check_assumptions(*model, mb.thresholds);
    CommandResult res;
    res.report = header("check-manifold");
    res.report["manifold"] = manifold_json(mb);
    res.report["assumptions"] = assumptions_json(rep);
    if (!rep.passes) set_violation(res, "manifold", rep.failures.empty() ? "assumptions" : rep.failures.front());
    return res;
}

CommandResult cmd_verify_lemmas(const RunConfig& cfg) {
    const auto mb = manifold_block(cfg);
    const auto wb = weight_block(cfg);
    const auto lb = lemmas_block(cfg, mb, wb);
    const auto model = build_model(mb);

    CommandResult res;
    res.report = header("verify-lemmas");
    res.report["manifold"] = manifold_json(mb);
    res.report["tolerance"] = lb.tolerance;

    bool wedge_ok = true;
    Json wedge = Json::array();
    for (double y : lb.minwedge_y) {
        const auto w = minwedge_check(y);
        wedge_ok = wedge_ok && w.holds();
        wedge.push_back({{"y", y}, {"min", w.lhs}, {"ratio", w.rhs}, {"holds", w.holds()}});
    }
    res.report["minwedge"] = {{"passes", wedge_ok}, {"samples", wedge}};
    if (!wedge_ok) set_violation(res, "lemmas", "minwedge_two_sided_bound");

    std::ostringstream csv;
    csv << "case_id,gamma,scale,integral,tail\n";
    Json fits = Json::array();
    auto add = [&](const ScalingFit& f) {
        fits.push_back(fit_json(f, lb.tolerance));
        for (const auto& s : f.samples)
            csv << f.case_id << ',' << fmt(f.gamma) << ',' << fmt(s.scale) << ',' << fmt(s.integral) << ','
                << fmt(s.tail) << '\n';
        if (!f.within(lb.tolerance)) set_violation(res, "lemmas", f.case_id + "_exponent");
    };
    for (const auto& c : lb.case1) add(integral_case1(*model, c.gamma, c.alpha, c.scales));
    for (const auto& c : lb.case2) add(integral_case2(*model, c.gamma, c.scales));
    for (const auto& c : lb.case3) add(integral_case3(*model, c.gamma, c.scales));
    res.report["fits"] = fits;
    res.files["samples.csv"] = csv.str();
    return res;
}

CommandResult cmd_verify_weight(const RunConfig& cfg) {
    const auto mb = manifold_block(cfg);
    const auto ob = operator_block(cfg);
    const auto wb = weight_block(cfg);
    const auto op = build_operator(mb, ob);
    const auto& m = op.model();
    WeightParams wp{wb.alpha, mb.n, 0, wb.N.value_or(1.0)};

    CommandResult res;
    res.report = header("verify-weight");
    res.report["manifold"] = manifold_json(mb);
    res.report["bc"] = to_string(ob.bc);
    res.report["alpha"] = wb.alpha;

    const auto fb = verify_frac_bound(op, wp, wb.t_values, wb.spread_tolerance);
    Json jb;
    jb["t_values"] = fb.t_values;
    jb["sup_ratio"] = fb.sup_ratio;
    jb["spread"] = fb.spread;
    jb["spread_bound"] = fb.spread_bound;
    jb["interior_nodes"] = fb.interior_nodes;
    jb["asserted"] = fb.asserted;
    jb["passes"] = fb.passes;
    res.report["frac_bound"] = jb;
    if (fb.asserted && !fb.passes) set_violation(res, "weight", "frac_bound_spread");

    std::ostringstream csv;
    csv << "t,r,ratio\n";
    for (const auto& s : fb.ratios) csv << fmt(s.t) << ',' << fmt(s.r) << ',' << fmt(s.ratio) << '\n';
    res.files["ratios.csv"] = csv.str();

    if (mb.n == 1 && wb.alpha == 1.0) {
        const auto gold = check_poisson_identity(op, wb.gold_t_values, wb.gold_tolerance);
        res.report["poisson_identity"] = {{"t_values", gold.t_values},
                                          {"max_error", gold.max_error},
                                          {"sup_ratio", gold.sup_ratio},
                                          {"tolerance", gold.tolerance},
                                          {"passes", gold.passes}};
        if (!gold.passes) set_violation(res, "weight", "poisson_identity");
    } else {
        res.report["poisson_identity"] = nullptr;
    }

    const auto ns = h_norm_scaling(m, wp, wb.norm_T_values, wb.norm_tolerance);
    res.report["norm_scaling"] = {{"T_values", ns.T_values},
                                  {"norms", ns.norms},
                                  {"fitted_exponent", ns.fitted_exponent},
                                  {"predicted_exponent", ns.predicted_exponent},
                                  {"claimed_exponent", ns.claimed_exponent},
                                  {"matches_prediction", ns.matches_prediction},
                                  {"matches_claim", ns.matches_claim},
                                  {"claim_discrepancy", !ns.matches_claim}};

    if (wb.alpha < 2.0) {
        const Field h = h_field(m, wb.t_values.front(), wp);
        QuadratureScheme q = QuadratureScheme::defaults_for(op, ob.s_min_factor, ob.s_max_factor);
        q.panels = ob.panels;
        q.rule = ob.rule;
        q.end_corrections = ob.end_corrections;
        const Field a = apply_fractional(op, wb.alpha, h);
        const Field b = subordination_apply(op, wb.alpha, h, q);
        res.report["subordination_check"] = {{"t", wb.t_values.front()},
                                             {"relative_l2_difference", (a - b).norm() / a.norm()}};
    }
    return res;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    const auto mb = manifold_block(cfg);
    const auto ob = operator_block(cfg);
    const auto wb = weight_block(cfg);
    const auto nl = nonlinearity_block(cfg);
    const auto sb = simulation_block(cfg);
    const auto op = build_operator(mb, ob);
    const auto& m = op.model();

    const double amplitude = sb.mass ? bump_amplitude_for_mass(m, sb.radius, *sb.mass) : sb.amplitude;
    const Field f0 = bump_field(m, amplitude, sb.radius);
    WeightParams wp{wb.alpha, mb.n, 0, 1.0};
    std::vector<ShiftTrial> trace;
    if (wb.N) {
        wp.shift_N = *wb.N;
    } else {
        const auto sel = choose_shift(m, f0, wb.alpha, wb.n_threshold);
        wp.shift_N = sel.N;
        trace = sel.trace;
    }
    FieldState u0{f0.cast<std::complex<double>>(), 0.0};
    auto rep = run_simulation(op, nl, wp, u0, sb.params);
    rep.shift_trace = trace;

    CommandResult res;
    Json& j = res.report;
    j = header("simulate");
    j["manifold"] = manifold_json(mb);
    j["bc"] = to_string(ob.bc);
    j["alpha"] = rep.alpha;
    j["n"] = rep.n;
    j["p"] = rep.p;
    j["form"] = to_string(rep.form);
    j["beta"] = rep.n * (rep.p - 1.0) / rep.alpha;
    j["N"] = rep.N;
    j["N_mode"] = wb.N ? "fixed" : "auto";
    Json jt = Json::array();
    for (const auto& s : rep.shift_trace) jt.push_back({{"N", s.N}, {"ratio", s.ratio}});
    j["N_trace"] = jt;
    j["initial_data"] = {{"kind", "bump"}, {"amplitude", amplitude}, {"radius", sb.radius}, {"mass", rep.mass0}};
    j["simulation"] = {{"dt", sb.params.dt},
                       {"t_end", sb.params.t_end},
                       {"blowup_factor", sb.params.blowup_factor},
                       {"step_control", sb.params.step_control},
                       {"sample_every", sb.params.sample_every}};
    j["steps"] = rep.steps;
    j["stop_reason"] = rep.stop_reason;
    j["t_blow_observed"] = opt(rep.t_blow_observed);
    j["t_blow_fitted"] = opt(rep.t_blow_fitted);
    j["t_star_theory"] = opt(rep.t_star_theory);
    j["t_blow_over_t_star"] = opt(rep.t_ratio);
    j["C_emp"] = opt(rep.inequality_margin);
    j["phi_increasing"] = rep.phi_increasing;
    j["holder_ok"] = rep.holder_ok;
    j["warnings"] = rep.warnings;
    Json series = Json::array();
    for (const auto& r : rep.series)
        series.push_back({{"t", r.t}, {"phi", r.phi}, {"l2", r.l2}, {"linf", r.linf}, {"w_l2", r.w_l2}});
    j["series"] = series;

    std::ostringstream csv;
    csv << "t,phi,l2,linf\n";
    for (const auto& r : rep.series) csv << fmt(r.t) << ',' << fmt(r.phi) << ',' << fmt(r.l2) << ',' << fmt(r.linf) << '\n';
    res.files["series.csv"] = csv.str();

    if (!rep.holder_ok) set_violation(res, "solver", "holder_lower_bound");
    const bool nonneg = f0.minCoeff() >= 0.0;
    if (nl.form == NonlinearityForm::forcing && nonneg && !rep.phi_increasing)
        set_violation(res, "solver", "phi_monotone");
    return res;
}

CommandResult cmd_lifespan(const RunConfig& cfg) {
    const auto mb = manifold_block(cfg);
    const auto wb = weight_block(cfg);
    const auto nl = nonlinearity_block(cfg);
    const auto lb = lifespan_block(cfg);
    const auto est = lifespan_upper_bound(lb.N, lb.phi0, nl.p, wb.alpha, mb.n);
    const double normalized_C = (1.0 - est.beta) / (nl.p - 1.0);
    const double C = lb.C.value_or(normalized_C);
    const double t_ode = ode_blowup_oracle(lb.N, lb.phi0, nl.p, wb.alpha, mb.n, C);

    CommandResult res;
    Json& j = res.report;
    j = header("lifespan");
    j["N"] = est.N;
    j["phi0"] = est.phi0;
    j["p"] = est.p;
    j["p_conjugate"] = est.p_conjugate();
    j["alpha"] = est.alpha;
    j["n"] = est.n;
    j["beta"] = est.beta;
    j["t_star"] = est.t_star;
    j["C"] = C;
    j["C_normalized"] = normalized_C;
    j["t_ode"] = t_ode;
    j["ratio"] = t_ode / est.t_star;
    if (!lb.C || *lb.C == normalized_C) {
        const bool agree = std::abs(t_ode / est.t_star - 1.0) <= 0.01;
        j["agreement_asserted"] = true;
        if (!agree) set_violation(res, "solver", "ode_matches_closed_form");
    } else {
        j["agreement_asserted"] = false;
    }
    return res;
}

unsigned sweep_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRACLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return hw;
}

namespace {

void set_dotted(Json& root, const std::string& path, const Json& value) {
    Json* node = &root;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (key.empty()) throw ConfigError("empty component in sweep path " + path);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        if (!node->contains(key)) (*node)[key] = Json::object();
        node = &(*node)[key];
        if (!node->is_object()) throw ConfigError("sweep path " + path + " crosses a non-object value");
        pos = dot + 1;
    }
}

}  // namespace

CommandResult cmd_sweep(const RunConfig& cfg) {
    const auto sb = sweep_block(cfg);
    std::vector<Json> overrides;
    overrides.emplace_back(Json::object());
    for (const auto& [path, list] : sb.grid) {
        std::vector<Json> next;
        for (const auto& base : overrides)
            for (const auto& v : list) {
                Json o = base;
                o[path] = v;
                next.push_back(std::move(o));
            }
        overrides = std::move(next);
    }

    std::vector<CommandResult> results(overrides.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (std::size_t k = cursor++; k < overrides.size(); k = cursor++) {
            RunConfig run = cfg;
            run.raw.erase("sweep");
            try {
                for (const auto& [path, v] : overrides[k].items()) set_dotted(run.raw, path, v);
                results[k] = run_command(sb.command, run);
            } catch (const ConfigError& e) {
                results[k].exit_code = 2;
                results[k].report = header(sb.command);
                results[k].report["error"] = {{"module", e.module()}, {"message", e.what()}};
            }
        }
    };
    const unsigned threads = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(overrides.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    CommandResult res;
    res.report = header("sweep");
    res.report["sweep_command"] = sb.command;
    Json runs = Json::array();
    int worst = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        worst = std::max(worst, results[k].exit_code);
        runs.push_back({{"overrides", overrides[k]}, {"exit_code", results[k].exit_code}, {"report", results[k].report}});
    }
    res.report["runs"] = runs;
    res.exit_code = worst;
    if (worst == 1) res.report["violation"] = {{"module", "cli"}, {"invariant", "sweep_member_violation"}};
    return res;
}

CommandResult run_command(const std::string& command, const RunConfig& cfg) {
    try {
        if (command == "check-manifold") return cmd_check_manifold(cfg);
        if (command == "verify-lemmas") return cmd_verify_lemmas(cfg);
        if (command == "verify-weight") return cmd_verify_weight(cfg);
        if (command == "simulate") return cmd_simulate(cfg);
        if (command == "lifespan") return cmd_lifespan(cfg);
        if (command == "sweep") return cmd_sweep(cfg);
        throw ConfigError("unknown command '" + command + "'");
    } catch (const Error& e) {
        CommandResult res;
        res.exit_code = 2;
        res.report = header(command);
        res.report["error"] = {{"module", e.module()}, {"message", e.what()}};
        return res;
    } catch (const nlohmann::json::exception& e) {
        CommandResult res;
        res.exit_code = 2;
        res.report = header(command);
        res.report["error"] = {{"module", "cli"}, {"message", e.what()}};
        return res;
    }
}

void write_outputs(const CommandResult& result, const std::filesystem::path& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string());
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + (out / name).string());
        f << body;
        if (!f) throw ConfigError("failed writing " + (out / name).string());
    };
    write("report.json", dump_report(result.report));
    for (const auto& [name, body] : result.files) write(name, body);
}

}  // namespace fraclab
