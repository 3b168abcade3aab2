#include "idfrit/cli.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "idfrit/discretize.hpp"
#include "idfrit/errors.hpp"

namespace idfrit::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

void require_known_keys(const ordered_json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

const ordered_json& member(const ordered_json& obj, const std::string& where,
                           const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(where + " is missing required key \"" + key + "\"");
    return *it;
}

double as_number(const ordered_json& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError(what + " must be a number");
    return v.get<double>();
}

std::vector<double> as_number_array(const ordered_json& v, const std::string& what) {
    if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, what + " entry"));
    return out;
}

OustaloupSettings parse_oust(const ordered_json& obj, const std::string& where) {
    require_known_keys(obj, where, {"order", "omega_b", "omega_h"});
    OustaloupSettings s;
    s.order = static_cast<int>(as_number(member(obj, where, "order"), where + ".order"));
    s.omega_b = as_number(member(obj, where, "omega_b"), where + ".omega_b");
    s.omega_h = as_number(member(obj, where, "omega_h"), where + ".omega_h");
    return s;
}

ordered_json oust_json(const OustaloupSettings& s) {
    return {{"order", s.order}, {"omega_b", s.omega_b}, {"omega_h", s.omega_h}};
}

ordered_json step_metrics_json(const StepMetrics& m) {
    return {{"overshoot_percent", m.overshoot_percent},
            {"settling_time", m.settling_time},
            {"steady_state", m.steady_state},
            {"not_settled", m.not_settled}};
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error("write to " + path + " failed");
}

}  // namespace

std::size_t TuneConfig::horizon_samples() const {
    return static_cast<std::size_t>(std::llround(horizon_seconds / ts));
}

ControllerSpec TuneConfig::controller_template() const {
    ControllerSpec spec;
    spec.structure = structure;
    spec.theta = theta0;
    spec.tau = tau > 0.0 ? tau : ts;
    spec.ts = ts;
    spec.oust = controller_oust_set ? controller_oust : reference.oust;
    return spec;
}

void TuneConfig::validate() const {
    if (!(ts > 0.0)) throw ConfigError("t_s must be positive");
    if (!(horizon_seconds > 0.0)) throw ConfigError("horizon_seconds must be positive");
    if (horizon_samples() < 10) throw ConfigError("horizon is too short to tune on");
    ReferenceModelSpec r = reference;
    r.ts = ts;
    r.validate();
    const std::size_t dim = theta_dimension(structure);
    if (theta0.size() != dim)
        throw ConfigError("theta0 length does not match the controller structure");
    bounds.validate(dim);
    if (tau < 0.0) throw ConfigError("tau must be nonnegative");
    if (input.type != "step" && input.type != "impulse")
        throw ConfigError("input.type must be \"step\" or \"impulse\"");
    if (input.amplitude == 0.0) throw ConfigError("input.amplitude must be nonzero");
    if (pso.swarm_size < 1 || pso.max_iters < 0) throw ConfigError("degenerate pso settings");
    if (J_threshold && !(*J_threshold > 0.0)) throw ConfigError("J_threshold must be positive");
    if (plant && plant->den.is_zero()) throw ConfigError("plant denominator must be nonzero");
}

TuneConfig preset(const std::string& name) {
    TuneConfig cfg;
    cfg.ts = 0.01;
    cfg.pso.seed = 1;
    cfg.input = {"step", 1.0};
    if (name == "example1-io" || name == "example1-fo") {
        cfg.horizon_seconds = 40.0;
        cfg.reference = {80.0, 1.0, {5, 1e-4, 1e4}, cfg.ts};
        cfg.plant = PlantDef{Polynomial{9.0}, Polynomial{1.0, 3.0, 11.0, 9.0}};
        if (name == "example1-io") {
            cfg.structure = ControllerStructure::IOPID;
            cfg.theta0 = {1.0, 0.0, 0.0};
            cfg.bounds = {{0.0, 0.0, 0.0}, {5.0, 5.0, 5.0}};
        } else {
            cfg.structure = ControllerStructure::FOPID;
            cfg.theta0 = {1.0, 0.0, 1.0, 0.0, 1.0};
            cfg.bounds = {{0.0, 0.0, 0.0, 0.0, 0.0}, {5.0, 5.0, 2.0, 5.0, 2.0}};
        }
        return cfg;
    }
    if (name == "example2") {
        cfg.horizon_seconds = 2.0;
        cfg.reference = {60.0, 12.0, {7, 1e-3, 1e6}, cfg.ts};
        cfg.structure = ControllerStructure::FOPI;
        cfg.theta0 = {1.0, 0.0, 1.0};
        cfg.bounds = {{0.0, 0.0, 0.0}, {15.0, 15.0, 2.0}};
        cfg.plant = PlantDef{Polynomial{329.359896, 12291.8022},
                             Polynomial{1.0, 67.066887, 2048.7922, 0.0}};
        return cfg;
    }
    throw ConfigError("unknown preset: " + name);
}

std::vector<std::pair<std::string, std::string>> preset_list() {
    return {
        {"example1-io", "third-order lag, integer-order PID, 80 deg / 1 rad/s target"},
        {"example1-fo", "third-order lag, fractional-order PID, 80 deg / 1 rad/s target"},
        {"example2", "servo-drive velocity loop, fractional-order PI, 60 deg / 12 rad/s target"},
    };
}

TuneConfig parse_config_json(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    require_known_keys(root, "config", {"t_s", "horizon_seconds", "reference", "controller",
                                        "pso", "J_threshold", "plant", "input"});

    TuneConfig cfg;
    cfg.ts = as_number(member(root, "config", "t_s"), "t_s");
    cfg.horizon_seconds =
        as_number(member(root, "config", "horizon_seconds"), "horizon_seconds");

    {
        const auto& ref = member(root, "config", "reference");
        require_known_keys(ref, "reference", {"phi_m_deg", "omega_c", "oust"});
        cfg.reference.phi_m_deg = as_number(member(ref, "reference", "phi_m_deg"), "phi_m_deg");
        cfg.reference.omega_c = as_number(member(ref, "reference", "omega_c"), "omega_c");
        cfg.reference.oust = parse_oust(member(ref, "reference", "oust"), "reference.oust");
        cfg.reference.ts = cfg.ts;
    }
    {
        const auto& ctl = member(root, "config", "controller");
        require_known_keys(ctl, "controller",
                           {"structure", "theta0", "lower", "upper", "tau", "oust"});
        const auto& st = member(ctl, "controller", "structure");
        if (!st.is_string()) throw ConfigError("controller.structure must be a string");
        cfg.structure = structure_from_name(st.get<std::string>());
        cfg.theta0 = as_number_array(member(ctl, "controller", "theta0"), "theta0");
        cfg.bounds.lower = as_number_array(member(ctl, "controller", "lower"), "lower");
        cfg.bounds.upper = as_number_array(member(ctl, "controller", "upper"), "upper");
        if (ctl.contains("tau")) cfg.tau = as_number(ctl["tau"], "controller.tau");
        if (ctl.contains("oust")) {
            cfg.controller_oust = parse_oust(ctl["oust"], "controller.oust");
            cfg.controller_oust_set = true;
        }
    }
    if (root.contains("pso")) {
        const auto& p = root["pso"];
        require_known_keys(p, "pso", {"swarm_size", "max_iters", "inertia", "cognitive",
                                      "social", "seed", "stall_tol", "stall_iters"});
        if (p.contains("swarm_size"))
            cfg.pso.swarm_size = static_cast<int>(as_number(p["swarm_size"], "pso.swarm_size"));
        if (p.contains("max_iters"))
            cfg.pso.max_iters = static_cast<int>(as_number(p["max_iters"], "pso.max_iters"));
        if (p.contains("inertia")) cfg.pso.inertia = as_number(p["inertia"], "pso.inertia");
        if (p.contains("cognitive"))
            cfg.pso.cognitive = as_number(p["cognitive"], "pso.cognitive");
        if (p.contains("social")) cfg.pso.social = as_number(p["social"], "pso.social");
        if (p.contains("seed")) {
            if (!p["seed"].is_number_unsigned() && !p["seed"].is_number_integer())
                throw ConfigError("pso.seed must be an integer");
            cfg.pso.seed = p["seed"].get<std::uint64_t>();
        }
        if (p.contains("stall_tol")) cfg.pso.stall_tol = as_number(p["stall_tol"], "pso.stall_tol");
        if (p.contains("stall_iters"))
            cfg.pso.stall_iters = static_cast<int>(as_number(p["stall_iters"], "pso.stall_iters"));
    }
    if (root.contains("J_threshold"))
        cfg.J_threshold = as_number(root["J_threshold"], "J_threshold");
    if (root.contains("plant")) {
        const auto& pl = root["plant"];
        require_known_keys(pl, "plant", {"num", "den"});
        cfg.plant = PlantDef{Polynomial(as_number_array(member(pl, "plant", "num"), "plant.num")),
                             Polynomial(as_number_array(member(pl, "plant", "den"), "plant.den"))};
    }
    if (root.contains("input")) {
        const auto& in = root["input"];
        require_known_keys(in, "input", {"type", "amplitude"});
        if (in.contains("type")) {
            if (!in["type"].is_string()) throw ConfigError("input.type must be a string");
            cfg.input.type = in["type"].get<std::string>();
        }
        if (in.contains("amplitude"))
            cfg.input.amplitude = as_number(in["amplitude"], "input.amplitude");
    }
    cfg.validate();
    return cfg;
}

namespace {

ordered_json config_json_object(const TuneConfig& cfg) {
    ordered_json root;
    root["t_s"] = cfg.ts;
    root["horizon_seconds"] = cfg.horizon_seconds;
    root["reference"] = {{"phi_m_deg", cfg.reference.phi_m_deg},
                         {"omega_c", cfg.reference.omega_c},
                         {"oust", oust_json(cfg.reference.oust)}};
    ordered_json ctl;
    ctl["structure"] = structure_name(cfg.structure);
    ctl["theta0"] = cfg.theta0;
    ctl["lower"] = cfg.bounds.lower;
    ctl["upper"] = cfg.bounds.upper;
    ctl["tau"] = cfg.tau;
    if (cfg.controller_oust_set) ctl["oust"] = oust_json(cfg.controller_oust);
    root["controller"] = std::move(ctl);
    root["pso"] = {{"swarm_size", cfg.pso.swarm_size}, {"max_iters", cfg.pso.max_iters},
                   {"inertia", cfg.pso.inertia},       {"cognitive", cfg.pso.cognitive},
                   {"social", cfg.pso.social},         {"seed", cfg.pso.seed},
                   {"stall_tol", cfg.pso.stall_tol},   {"stall_iters", cfg.pso.stall_iters}};
    if (cfg.J_threshold) root["J_threshold"] = *cfg.J_threshold;
    if (cfg.plant)
        root["plant"] = {{"num", cfg.plant->num.coeffs()}, {"den", cfg.plant->den.coeffs()}};
    root["input"] = {{"type", cfg.input.type}, {"amplitude", cfg.input.amplitude}};
    return root;
}

}  // namespace

std::string config_to_json(const TuneConfig& cfg) { return config_json_object(cfg).dump(2); }

void write_data_csv(const std::string& path, const ExperimentData& data) {
    std::ostringstream out;
    out << "k,t,r,u,y\n";
    for (std::size_t k = 0; k < data.r.size(); ++k) {
        out << k << ',' << format_double(static_cast<double>(k) * data.r.ts) << ','
            << format_double(data.r[k]) << ',' << format_double(data.u[k]) << ','
            << format_double(data.y[k]) << '\n';
    }
    write_text_file(path, out.str());
}

ExperimentData read_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadData("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || (line != "k,t,r,u,y" && line != "k,t,r,u,y\r"))
        throw BadData(path + ": expected header k,t,r,u,y");

    std::vector<double> ts_col, r, u, y;
    std::size_t expect_k = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw BadData(path + ": cannot parse \"" + cell + "\"");
            }
        }
        if (vals.size() != 5) throw BadData(path + ": each row needs 5 columns");
        if (static_cast<std::size_t>(vals[0]) != expect_k)
            throw BadData(path + ": sample indices must start at 0 and increase by 1");
        ++expect_k;
        ts_col.push_back(vals[1]);
        r.push_back(vals[2]);
        u.push_back(vals[3]);
        y.push_back(vals[4]);
    }
    if (r.size() < 2) throw BadData(path + ": need at least two samples");
    const double ts = ts_col[1] - ts_col[0];
    if (!(ts > 0.0)) throw BadData(path + ": time column must be increasing");
    return ExperimentData(Signal(std::move(r), ts), Signal(std::move(u), ts),
                          Signal(std::move(y), ts));
}

void write_series_csv(const std::string& path, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
    for (const auto& row : rows) {
        if (row.size() != columns.size()) throw Error("row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? ',' : '\n');
    }
    write_text_file(path, out.str());
}

namespace {

Signal reference_signal(const TuneConfig& cfg, std::size_t n_samples) {
    if (cfg.input.type == "impulse")
        return impulse_signal(n_samples, cfg.ts, cfg.input.amplitude);
    return step_signal(n_samples, cfg.ts, cfg.input.amplitude);
}

/// FIR open-loop estimate L̂ = T̂/(1 − T̂) from the restored closed-loop
/// impulse response; exposes data-driven frequency metrics without a plant.
DiscreteTF estimated_open_loop(const Signal& restored) {
    const std::size_t n = restored.size();
    Polynomial num(restored.samples);
    std::vector<double> zn(n, 0.0);
    zn[0] = 1.0;
    Polynomial den = poly_add(Polynomial(std::move(zn)), poly_scale(num, -1.0));
    return DiscreteTF(std::move(num), std::move(den), restored.ts);
}

}  // namespace

TuneRun run_tune(const TuneConfig& cfg, const ExperimentData& data, int threads) {
    cfg.validate();
    if (std::abs(data.r.ts - cfg.ts) > 1e-12 * cfg.ts)
        throw ConfigError("data sampling time does not match the config");

    const std::size_t n = data.r.size() - 1;
    ReferenceModelSpec rspec = cfg.reference;
    rspec.ts = cfg.ts;
    const ReferenceModel ref = build_reference_model(rspec);
    const Signal m_ref = impulse_response(ref.closed_loop, n);

    TuneRun run;
    run.J_threshold = cfg.J_threshold ? *cfg.J_threshold : default_J_threshold(data, m_ref);
    run.result = tune(cfg.controller_template(), data, m_ref, cfg.bounds, cfg.pso,
                      run.J_threshold, threads);

    // Frequency metrics: exact open loop when a plant model is on hand,
    // otherwise estimated from the restored impulse response.
    std::string freq_mode = "unavailable";
    run.omega_c = std::nan("");
    run.phase_margin_deg = std::nan("");
    run.flatness_deg_per_decade = std::nan("");
    try {
        DiscreteTF l = [&] {
            if (cfg.plant) {
                const DiscreteTF pz = tustin(RationalTF(cfg.plant->num, cfg.plant->den), cfg.ts);
                const DiscreteTF c = build_controller(
                    cfg.controller_template().with_theta(run.result.theta_star));
                return tf_mul(pz, c);
            }
            return estimated_open_loop(run.result.restored_impulse);
        }();
        freq_mode = cfg.plant ? "plant" : "estimated";
        const Crossover cr = gain_crossover(l, default_band(cfg.ts));
        run.omega_c = cr.omega_c;
        run.multiple_crossings = cr.multiple;
        run.phase_margin_deg = phase_margin(l);
        run.flatness_deg_per_decade = flatness_metric(l, cr.omega_c);
    } catch (const Error&) {
        // metrics stay NaN; verdict and loss are still reported
    }

    const Signal step = step_signal(n + 1, cfg.ts, cfg.input.amplitude);
    run.reference_step = step_metrics(lfilter(ref.closed_loop, step), cfg.input.amplitude);
    run.estimated_step =
        step_metrics(toeplitz_mul(step, run.result.restored_impulse), cfg.input.amplitude);

    ordered_json body;
    body["tool"] = kToolVersion;
    body["config"] = config_json_object(cfg);
    body["theta_star"] = run.result.theta_star;
    body["J_star"] = run.result.J_star;
    body["J_threshold"] = run.J_threshold;
    body["verdict"] = verdict_name(run.result.verdict);
    body["history"] = run.result.history;
    body["frequency"] = {{"mode", freq_mode},
                         {"omega_c", run.omega_c},
                         {"phase_margin_deg", run.phase_margin_deg},
                         {"flatness_deg_per_decade", run.flatness_deg_per_decade},
                         {"multiple_crossings", run.multiple_crossings}};
    body["step"] = {{"reference", step_metrics_json(run.reference_step)},
                    {"estimated", step_metrics_json(run.estimated_step)}};
    run.canonical_body = body.dump(2);

    ordered_json report;
    report["report"] = std::move(body);
    report["generated_at"] = utc_timestamp();
    run.report_json = report.dump(2);

    run.exit_code = run.result.verdict == Verdict::likely_bibo ? 0 : 2;
    return run;
}

int cmd_collect(const TuneConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    if (!cfg.plant) throw ConfigError("collect needs a plant model in the config");
    const DiscreteTF pz = tustin(RationalTF(cfg.plant->num, cfg.plant->den), cfg.ts);
    const DiscreteTF c0 = build_controller(cfg.controller_template());
    const Signal r = reference_signal(cfg, cfg.horizon_samples() + 1);
    const auto [u, y] = closed_loop_sim(pz, c0, r);

    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/data.csv";
    write_data_csv(path, ExperimentData(r, u, y));
    std::printf("wrote %s (%zu samples)\n", path.c_str(), r.size());
    return 0;
}

int cmd_tune(const TuneConfig& cfg, const std::string& data_path, const std::string& out_dir,
             int threads) {
    const ExperimentData data = read_data_csv(data_path);
    const TuneRun run = run_tune(cfg, data, threads);

    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir + "/report.json", run.report_json);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < run.result.restored_impulse.size(); ++k)
        rows.push_back({static_cast<double>(k), static_cast<double>(k) * cfg.ts,
                        run.result.restored_impulse[k]});
    write_series_csv(out_dir + "/restored_impulse.csv", {"k", "t", "value"}, rows);

    std::printf("J* = %.6g  verdict = %s\n", run.result.J_star,
                verdict_name(run.result.verdict).c_str());
    std::printf("wrote %s/report.json\n", out_dir.c_str());
    return run.exit_code;
}

int cmd_evaluate(const TuneConfig& cfg, const std::vector<double>& theta,
                 const std::optional<std::string>& data_path, const std::string& out_dir) {
    cfg.validate();
    if (theta.size() != theta_dimension(cfg.structure))
        throw ConfigError("theta length does not match the controller structure");
    const DiscreteTF c = build_controller(cfg.controller_template().with_theta(theta));
    std::filesystem::create_directories(out_dir);

    ordered_json metrics;
    metrics["tool"] = kToolVersion;
    metrics["theta"] = theta;
    int exit_code = 0;

    if (cfg.plant) {
        const DiscreteTF pz = tustin(RationalTF(cfg.plant->num, cfg.plant->den), cfg.ts);
        const DiscreteTF l = tf_mul(pz, c);

        const auto band = default_band(cfg.ts);
        const auto pts = bode(l, log_grid(band.first, band.second, 400));
        std::vector<std::vector<double>> brows;
        for (const auto& p : pts) brows.push_back({p.omega, p.magnitude_db, p.phase_deg});
        write_series_csv(out_dir + "/bode.csv", {"omega", "magnitude_db", "phase_deg"}, brows);

        ordered_json fj;
        try {
            const Crossover cr = gain_crossover(l, band);
            fj = {{"omega_c", cr.omega_c},
                  {"phase_margin_deg", phase_margin(l)},
                  {"flatness_deg_per_decade", flatness_metric(l, cr.omega_c)},
                  {"multiple_crossings", cr.multiple}};
        } catch (const NoCrossing&) {
            fj = {{"omega_c", nullptr},
                  {"phase_margin_deg", nullptr},
                  {"flatness_deg_per_decade", nullptr},
                  {"multiple_crossings", false}};
        }
        metrics["frequency"] = std::move(fj);

        const Signal r = reference_signal(cfg, cfg.horizon_samples() + 1);
        const auto rows = gain_robustness_report(pz, c, {0.5, 1.0, 1.5}, r);
        std::vector<std::vector<double>> rrows;
        ordered_json rj = ordered_json::array();
        for (const auto& row : rows) {
            rrows.push_back({row.gain, row.overshoot_percent, row.settling_time, row.omega_c,
                             row.phase_margin});
            rj.push_back({{"gain", row.gain},
                          {"overshoot_percent", row.overshoot_percent},
                          {"settling_time", row.settling_time},
                          {"omega_c", row.omega_c},
                          {"phase_margin_deg", row.phase_margin}});
        }
        write_series_csv(out_dir + "/robustness.csv",
                         {"gain", "overshoot_percent", "settling_time", "omega_c",
                          "phase_margin_deg"},
                         rrows);
        metrics["robustness"] = std::move(rj);

        const auto [u, y] = closed_loop_sim(pz, c, r);
        std::vector<std::vector<double>> srows;
        for (std::size_t k = 0; k < r.size(); ++k)
            srows.push_back({static_cast<double>(k), static_cast<double>(k) * cfg.ts, r[k], u[k],
                             y[k]});
        write_series_csv(out_dir + "/step.csv", {"k", "t", "r", "u", "y"}, srows);
    }

    if (data_path) {
        const ExperimentData data = read_data_csv(*data_path);
        if (std::abs(data.r.ts - cfg.ts) > 1e-12 * cfg.ts)
            throw ConfigError("data sampling time does not match the config");
        const std::size_t n = data.r.size() - 1;
        ReferenceModelSpec rspec = cfg.reference;
        rspec.ts = cfg.ts;
        const ReferenceModel ref = build_reference_model(rspec);
        const Signal m_ref = impulse_response(ref.closed_loop, n);

        const double J = loss_J(theta, cfg.controller_template(), data, m_ref);
        const double thr = cfg.J_threshold ? *cfg.J_threshold : default_J_threshold(data, m_ref);
        ordered_json dj;
        dj["J"] = J;
        dj["J_threshold"] = thr;
        if (J < kLossPenalty) {
            const Signal rt = fictitious_reference(c, data);
            const Signal t = toeplitz_solve(rt, data.y);
            const Verdict v = stability_screen(t, J, thr);
            dj["verdict"] = verdict_name(v);
            if (v != Verdict::likely_bibo) exit_code = 2;
            std::vector<std::vector<double>> trows;
            for (std::size_t k = 0; k < t.size(); ++k)
                trows.push_back({static_cast<double>(k), static_cast<double>(k) * cfg.ts, t[k]});
            write_series_csv(out_dir + "/restored_impulse.csv", {"k", "t", "value"}, trows);
            try {
                const DiscreteTF lhat = estimated_open_loop(t);
                const Crossover cr = gain_crossover(lhat, default_band(cfg.ts));
                dj["estimated_frequency"] = {{"omega_c", cr.omega_c},
                                             {"phase_margin_deg", phase_margin(lhat)},
                                             {"multiple_crossings", cr.multiple}};
            } catch (const Error&) {
                dj["estimated_frequency"] = nullptr;
            }
        } else {
            dj["verdict"] = verdict_name(Verdict::rejected);
            exit_code = 2;
        }
        metrics["data"] = std::move(dj);
    }

    write_text_file(out_dir + "/metrics.json", metrics.dump(2));
    std::printf("wrote %s/metrics.json\n", out_dir.c_str());
    return exit_code;
}

int cmd_reference(const TuneConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    ReferenceModelSpec rspec = cfg.reference;
    rspec.ts = cfg.ts;
    const ReferenceModel ref = build_reference_model(rspec);
    const std::size_t n = cfg.horizon_samples();

    const Signal imp = impulse_response(ref.closed_loop, n);
    const Signal stp = lfilter(ref.closed_loop, step_signal(n + 1, cfg.ts, cfg.input.amplitude));

    std::filesystem::create_directories(out_dir);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k <= n; ++k)
        rows.push_back({static_cast<double>(k), static_cast<double>(k) * cfg.ts, imp[k], stp[k]});
    write_series_csv(out_dir + "/reference.csv", {"k", "t", "impulse", "step"}, rows);

    ordered_json info;
    info["tool"] = kToolVersion;
    info["gamma"] = rspec.gamma();
    info["pole_radii_max"] = ref.pole_radii.empty() ? 0.0 : ref.pole_radii.back();
    const StepMetrics m = step_metrics(stp, cfg.input.amplitude);
    info["step"] = step_metrics_json(m);
    try {
        const Crossover cr = gain_crossover(ref.open_loop, default_band(cfg.ts));
        info["open_loop"] = {{"omega_c", cr.omega_c},
                             {"phase_margin_deg", phase_margin(ref.open_loop)},
                             {"flatness_deg_per_decade",
                              flatness_metric(ref.open_loop, cr.omega_c)}};
    } catch (const Error&) {
        info["open_loop"] = nullptr;
    }
    write_text_file(out_dir + "/reference.json", info.dump(2));
    std::printf("wrote %s/reference.json\n", out_dir.c_str());
    return 0;
}

}  // namespace idfrit::cli
