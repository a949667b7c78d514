#include "fraclab/cli.hpp"

#include "fraclab/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fraclab {

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    try {
        cfg.raw = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!cfg.raw.is_object()) throw ConfigError("config root must be an object");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

const Json& block(const RunConfig& cfg, const char* name) {
    static const Json empty = Json::object();
    auto it = cfg.raw.find(name);
    if (it == cfg.raw.end()) return empty;
    if (!it->is_object()) throw ConfigError(std::string(name) + " must be an object");
    return *it;
}

std::string where(const char* blk, const char* key) { return std::string(blk) + "." + key; }

double number(const Json& b, const char* blk, const char* key, double fallback) {
    auto it = b.find(key);
    if (it == b.end()) return fallback;
    if (!it->is_number()) throw ConfigError(where(blk, key) + " must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ConfigError(where(blk, key) + " must be finite");
    return v;
}

std::optional<double> optional_number(const Json& b, const char* blk, const char* key) {
    if (!b.contains(key) || b.at(key).is_null()) return std::nullopt;
    return number(b, blk, key, 0.0);
}

int integer(const Json& b, const char* blk, const char* key, int fallback) {
    auto it = b.find(key);
    if (it == b.end()) return fallback;
    if (!it->is_number_integer()) throw ConfigError(where(blk, key) + " must be an integer");
    return it->get<int>();
}

bool boolean(const Json& b, const char* blk, const char* key, bool fallback) {
    auto it = b.find(key);
    if (it == b.end()) return fallback;
    if (!it->is_boolean()) throw ConfigError(where(blk, key) + " must be a boolean");
    return it->get<bool>();
}

std::string text(const Json& b, const char* blk, const char* key, const std::string& fallback) {
    auto it = b.find(key);
    if (it == b.end()) return fallback;
    if (!it->is_string()) throw ConfigError(where(blk, key) + " must be a string");
    return it->get<std::string>();
}

/// Either an explicit array or {"log": [lo, hi, count]}.
std::vector<double> values(const Json& v, const std::string& name) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigError(name + " entries must be numbers");
            out.push_back(x.get<double>());
        }
    } else if (v.is_object() && v.contains("log")) {
        const auto& l = v.at("log");
        if (!l.is_array() || l.size() != 3 || !l[0].is_number() || !l[1].is_number() || !l[2].is_number_integer())
            throw ConfigError(name + ".log must be [lo, hi, count]");
        const double lo = l[0].get<double>(), hi = l[1].get<double>();
        const int count = l[2].get<int>();
        if (!(lo > 0.0 && hi > lo) || count < 2) throw ConfigError(name + ".log needs 0 < lo < hi and count >= 2");
        out = log_spaced(lo, hi, count);
    } else {
        throw ConfigError(name + " must be an array or {\"log\": [lo, hi, count]}");
    }
    return out;
}

std::vector<double> value_list(const Json& b, const char* blk, const char* key, std::vector<double> fallback) {
    auto it = b.find(key);
    if (it == b.end()) return fallback;
    return values(*it, where(blk, key));
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

void require_positive(const std::vector<double>& v, const std::string& name) {
    require(!v.empty(), name + " must not be empty");
    for (double x : v) require(x > 0.0 && std::isfinite(x), name + " entries must be positive");
}

}  // namespace

ManifoldBlock manifold_block(const RunConfig& cfg) {
    const char* B = "manifold";
    const Json& b = block(cfg, B);
    ManifoldBlock mb;
    mb.n = integer(b, B, "n", mb.n);
    require(mb.n >= 1 && mb.n <= 16, "manifold.n must lie in [1, 16]");
    const std::string kind = text(b, B, "warping", "flat");
    if (kind == "flat") {
        mb.warping = WarpingSpec::flat();
    } else if (kind == "log-blend") {
        const double c = number(b, B, "c", 0.5);
        require(c > 0.0 && c <= 1.0, "manifold.c must lie in (0, 1]");
        mb.warping = WarpingSpec::log_blend(c);
    } else if (kind == "hyperbolic") {
        mb.warping = WarpingSpec::hyperbolic();
    } else if (kind == "user-sampled") {
        require(b.contains("samples") && b.at("samples").is_object(), "manifold.samples must be an object");
        const auto& s = b.at("samples");
        require(s.contains("r") && s.contains("psi"), "manifold.samples needs r and psi arrays");
        try {
            mb.warping = WarpingSpec::user_sampled(values(s.at("r"), "manifold.samples.r"),
                                                   values(s.at("psi"), "manifold.samples.psi"));
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("manifold.samples: ") + e.what());
        }
    } else {
        throw ConfigError("manifold.warping must be flat, log-blend, hyperbolic or user-sampled");
    }
    require(mb.n > 1 || kind == "flat", "manifold.n = 1 is only available for the flat warping");
    mb.r_max = number(b, B, "r_max", mb.r_max);
    require(mb.r_max > 0.0, "manifold.r_max must be positive");
    mb.nodes = integer(b, B, "nodes", mb.nodes);
    require(mb.nodes >= 64 && mb.nodes <= kMaxDenseNodes, "manifold.nodes must lie in [64, 4096]");
    const std::string grid = text(b, B, "grid", "graded");
    if (grid == "graded") mb.grid.kind = GridKind::graded;
    else if (grid == "uniform") mb.grid.kind = GridKind::uniform;
    else throw ConfigError("manifold.grid must be graded or uniform");
    mb.grid.scale = number(b, B, "grid_scale", mb.grid.scale);
    require(mb.grid.scale > 0.0, "manifold.grid_scale must be positive");
    if (b.contains("assumptions")) {
        const char* A = "manifold.assumptions";
        const Json& a = b.at("assumptions");
        require(a.is_object(), "manifold.assumptions must be an object");
        mb.thresholds.c_max = number(a, A, "c_max", mb.thresholds.c_max);
        mb.thresholds.v_lo = number(a, A, "v_lo", mb.thresholds.v_lo);
        mb.thresholds.v_hi = number(a, A, "v_hi", mb.thresholds.v_hi);
        require(mb.thresholds.c_max > 0.0 && mb.thresholds.v_lo > 0.0 && mb.thresholds.v_hi > mb.thresholds.v_lo,
                "manifold.assumptions needs c_max > 0 and 0 < v_lo < v_hi");
    }
    return mb;
}

std::shared_ptr<const ManifoldModel> build_model(const ManifoldBlock& mb) {
    return std::make_shared<const ManifoldModel>(make_model(mb.n, mb.warping, mb.r_max, mb.nodes, mb.grid));
}

OperatorBlock operator_block(const RunConfig& cfg) {
    const char* B = "operator";
    const Json& b = block(cfg, B);
    OperatorBlock ob;
    try {
        ob.bc = outer_boundary_from_string(text(b, B, "bc", "dirichlet-outer"));
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("operator.bc: ") + e.what());
    }
    if (b.contains("quadrature")) {
        const char* Q = "operator.quadrature";
        const Json& q = b.at("quadrature");
        require(q.is_object(), "operator.quadrature must be an object");
        try {
            ob.rule = quadrature_rule_from_string(text(q, Q, "rule", "gauss-legendre-log"));
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("operator.quadrature.rule: ") + e.what());
        }
        ob.panels = integer(q, Q, "panels", ob.panels);
        ob.s_min_factor = number(q, Q, "s_min_factor", ob.s_min_factor);
        ob.s_max_factor = number(q, Q, "s_max_factor", ob.s_max_factor);
        ob.end_corrections = boolean(q, Q, "end_corrections", ob.end_corrections);
        require(ob.panels >= 16, "operator.quadrature.panels must be at least 16");
        require(ob.s_min_factor > 0.0 && ob.s_max_factor > 0.0, "operator.quadrature factors must be positive");
    }
    return ob;
}

WeightBlock weight_block(const RunConfig& cfg) {
    const char* B = "weight";
    const Json& b = block(cfg, B);
    WeightBlock wb;
    wb.alpha = number(b, B, "alpha", wb.alpha);
    require(wb.alpha > 0.0 && wb.alpha <= 2.0, "weight.alpha must lie in (0, 2]");
    if (b.contains("N")) {
        const auto& v = b.at("N");
        if (v.is_string()) {
            require(v.get<std::string>() == "auto", "weight.N must be a positive number or \"auto\"");
        } else {
            require(v.is_number() && v.get<double>() > 0.0, "weight.N must be a positive number or \"auto\"");
            wb.N = v.get<double>();
        }
    }
    wb.n_threshold = number(b, B, "N_threshold", wb.n_threshold);
    require(wb.n_threshold > 0.0 && wb.n_threshold < 1.0, "weight.N_threshold must lie in (0, 1)");
    wb.t_values = value_list(b, B, "t_values", wb.t_values);
    require_positive(wb.t_values, "weight.t_values");
    wb.spread_tolerance = number(b, B, "spread_tolerance", wb.spread_tolerance);
    require(wb.spread_tolerance >= 1.0, "weight.spread_tolerance must be at least 1");
    wb.gold_t_values = value_list(b, B, "gold_t_values", wb.gold_t_values);
    require_positive(wb.gold_t_values, "weight.gold_t_values");
    wb.gold_tolerance = number(b, B, "gold_tolerance", wb.gold_tolerance);
    require(wb.gold_tolerance > 0.0, "weight.gold_tolerance must be positive");
    wb.norm_T_values = value_list(b, B, "norm_T_values", log_spaced(1.0, 100.0, 9));
    require_positive(wb.norm_T_values, "weight.norm_T_values");
    require(wb.norm_T_values.size() >= 2, "weight.norm_T_values needs at least two entries");
    wb.norm_tolerance = number(b, B, "norm_tolerance", wb.norm_tolerance);
    return wb;
}

NonlinearitySpec nonlinearity_block(const RunConfig& cfg) {
    const char* B = "nonlinearity";
    const Json& b = block(cfg, B);
    NonlinearitySpec nl;
    nl.p = number(b, B, "p", nl.p);
    require(nl.p > 1.0, "nonlinearity.p must exceed 1");
    try {
        nl.form = nonlinearity_form_from_string(text(b, B, "form", "forcing"));
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("nonlinearity.form: ") + e.what());
    }
    return nl;
}

SimulationBlock simulation_block(const RunConfig& cfg) {
    const char* B = "simulation";
    const Json& b = block(cfg, B);
    SimulationBlock sb;
    auto& p = sb.params;
    p.dt = number(b, B, "dt", p.dt);
    p.t_end = number(b, B, "t_end", p.t_end);
    p.blowup_factor = number(b, B, "blowup_factor", p.blowup_factor);
    p.step_control = number(b, B, "step_control", p.step_control);
    p.sample_every = integer(b, B, "sample_every", p.sample_every);
    p.enforce_preconditions = boolean(b, B, "enforce_preconditions", p.enforce_preconditions);
    require(p.dt > 0.0, "simulation.dt must be positive");
    require(p.t_end > 0.0, "simulation.t_end must be positive");
    require(p.t_end / p.dt <= 1e7, "simulation.t_end/dt exceeds 1e7 steps");
    require(p.blowup_factor > 1.0, "simulation.blowup_factor must exceed 1");
    require(p.step_control > 0.0, "simulation.step_control must be positive");
    require(p.sample_every >= 1, "simulation.sample_every must be at least 1");
    sb.mass = optional_number(b, B, "mass");
    sb.amplitude = number(b, B, "amplitude", sb.amplitude);
    sb.radius = number(b, B, "radius", sb.radius);
    require(sb.radius > 0.0, "simulation.radius must be positive");
    return sb;
}

LemmasBlock lemmas_block(const RunConfig& cfg, const ManifoldBlock& mb, const WeightBlock& wb) {
    const char* B = "lemmas";
    const Json& b = block(cfg, B);
    LemmasBlock lb;
    const double n = mb.n;
    lb.minwedge_y = value_list(b, B, "minwedge_y", log_spaced(1e-6, 1e6, 25));
    require_positive(lb.minwedge_y, "lemmas.minwedge_y");
    lb.tolerance = number(b, B, "tolerance", lb.tolerance);
    require(lb.tolerance > 0.0, "lemmas.tolerance must be positive");

    auto cases = [&](const char* key, LemmaCaseBlock fallback) {
        std::vector<LemmaCaseBlock> out;
        if (!b.contains(key)) {
            out.push_back(std::move(fallback));
            return out;
        }
        const auto& arr = b.at(key);
        require(arr.is_array(), std::string("lemmas.") + key + " must be an array");
        for (const auto& e : arr) {
            require(e.is_object(), std::string("lemmas.") + key + " entries must be objects");
            const std::string name = std::string("lemmas.") + key;
            LemmaCaseBlock c;
            c.gamma = number(e, name.c_str(), "gamma", fallback.gamma);
            c.alpha = number(e, name.c_str(), "alpha", fallback.alpha);
            c.scales = e.contains("scales") ? values(e.at("scales"), name + ".scales") : fallback.scales;
            require_positive(c.scales, name + ".scales");
            out.push_back(std::move(c));
        }
        return out;
    };
    lb.case1 = cases("case1", {n, wb.alpha, log_spaced(1e-2, 1.0, 9)});
    lb.case2 = cases("case2", {n - 1.0, 1.0, log_spaced(5e-3 * mb.r_max, 0.5 * mb.r_max, 9)});
    lb.case3 = cases("case3", {n + 1.0, 1.0, log_spaced(1e-2 * mb.r_max, mb.r_max, 9)});
    for (const auto& c : lb.case1) {
        require(c.gamma > 0.5 * n, "lemmas.case1.gamma must exceed n/2");
        require(c.alpha > 0.0 && c.alpha <= 2.0, "lemmas.case1.alpha must lie in (0, 2]");
    }
    for (const auto& c : lb.case2) {
        require(c.gamma >= 0.0 && c.gamma < n, "lemmas.case2.gamma must lie in [0, n)");
        for (double R : c.scales) require(R <= mb.r_max, "lemmas.case2 radii must not exceed manifold.r_max");
    }
    for (const auto& c : lb.case3) require(c.gamma > n, "lemmas.case3.gamma must exceed n");
    return lb;
}

LifespanBlock lifespan_block(const RunConfig& cfg) {
    const char* B = "lifespan";
    const Json& b = block(cfg, B);
    LifespanBlock lb;
    lb.N = number(b, B, "N", lb.N);
    lb.phi0 = number(b, B, "phi0", lb.phi0);
    lb.C = optional_number(b, B, "C");
    require(lb.N > 0.0, "lifespan.N must be positive");
    require(lb.phi0 > 0.0, "lifespan.phi0 must be positive");
    require(!lb.C || *lb.C > 0.0, "lifespan.C must be positive");
    return lb;
}

SweepBlock sweep_block(const RunConfig& cfg) {
    const char* B = "sweep";
    require(cfg.raw.contains(B), "sweep block is required for the sweep command");
    const Json& b = block(cfg, B);
    SweepBlock sb;
    sb.command = text(b, B, "command", "simulate");
    require(sb.command != "sweep", "sweep.command cannot be sweep");
    require(b.contains("grid") && b.at("grid").is_object() && !b.at("grid").empty(),
            "sweep.grid must be a non-empty object of dotted paths to value lists");
    std::size_t total = 1;
    for (const auto& [path, list] : b.at("grid").items()) {
        require(list.is_array() && !list.empty(), "sweep.grid." + path + " must be a non-empty array");
        require(path.find('.') != std::string::npos, "sweep.grid keys must be dotted paths such as nonlinearity.p");
        total *= list.size();
        require(total <= 10000, "sweep grid exceeds 10000 runs");
        sb.grid.emplace_back(path, std::vector<Json>(list.begin(), list.end()));
    }
    return sb;
}

}  // namespace fraclab
