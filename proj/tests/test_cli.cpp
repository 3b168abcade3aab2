#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "idfrit/cli.hpp"
#include "idfrit/discretize.hpp"
#include "idfrit/errors.hpp"

using namespace idfrit;
using namespace idfrit::cli;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

TuneConfig small_config() {
    // Tiny but complete: first-order plant, integer PID, short horizon.
    TuneConfig cfg;
    cfg.ts = 0.01;
    cfg.horizon_seconds = 3.0;
    cfg.reference = {80.0, 1.0, {4, 1e-3, 1e3}, cfg.ts};
    cfg.structure = ControllerStructure::IOPID;
    cfg.theta0 = {1.0, 0.5, 0.0};
    cfg.bounds = {{0.0, 0.0, 0.0}, {3.0, 3.0, 1.0}};
    cfg.pso.swarm_size = 8;
    cfg.pso.max_iters = 10;
    cfg.pso.seed = 5;
    cfg.plant = PlantDef{Polynomial{2.0}, Polynomial{1.0, 1.0}};
    cfg.input = {"step", 1.0};
    return cfg;
}

ExperimentData collect_for(const TuneConfig& cfg) {
    const DiscreteTF pz = tustin(RationalTF(cfg.plant->num, cfg.plant->den), cfg.ts);
    const DiscreteTF c0 = build_controller(cfg.controller_template());
    const Signal r = step_signal(cfg.horizon_samples() + 1, cfg.ts, cfg.input.amplitude);
    auto [u, y] = closed_loop_sim(pz, c0, r);
    return ExperimentData(r, u, y);
}

}  // namespace

TEST_CASE("presets cover both worked plants and parse back from JSON") {
    auto names = preset_list();
    REQUIRE(names.size() == 3);
    for (const auto& [name, blurb] : names) {
        TuneConfig cfg = preset(name);
        CHECK_NOTHROW(cfg.validate());
        TuneConfig back = parse_config_json(config_to_json(cfg));
        CHECK(back.ts == cfg.ts);
        CHECK(back.horizon_seconds == cfg.horizon_seconds);
        CHECK(back.structure == cfg.structure);
        CHECK(back.theta0 == cfg.theta0);
        CHECK(back.bounds.lower == cfg.bounds.lower);
        CHECK(back.bounds.upper == cfg.bounds.upper);
        CHECK(back.pso.seed == cfg.pso.seed);
        CHECK(back.reference.phi_m_deg == cfg.reference.phi_m_deg);
        CHECK(back.plant.has_value() == cfg.plant.has_value());
        if (cfg.plant) {
            CHECK(back.plant->num.coeffs() == cfg.plant->num.coeffs());
            CHECK(back.plant->den.coeffs() == cfg.plant->den.coeffs());
        }
        // Serialization is stable: a round trip reproduces the same bytes.
        CHECK(config_to_json(back) == config_to_json(cfg));
    }
    CHECK_THROWS_AS(preset("example9"), ConfigError);
}

TEST_CASE("horizon arithmetic counts samples inclusively") {
    TuneConfig cfg = preset("example1-io");
    CHECK(cfg.horizon_samples() == 4000);
    cfg = preset("example2");
    CHECK(cfg.horizon_samples() == 200);
}

TEST_CASE("unknown or malformed config keys are refused loudly") {
    TuneConfig cfg = small_config();
    std::string good = config_to_json(cfg);

    // Unknown top-level key
    std::string bad1 = good;
    bad1.insert(bad1.find_first_of('{') + 1, "\n  \"typo_key\": 1,");
    CHECK_THROWS_AS(parse_config_json(bad1), ConfigError);

    // Unknown nested key
    std::string bad2 = good;
    const auto pos = bad2.find("\"phi_m_deg\"");
    bad2.insert(pos, "\"margin\": 1, ");
    CHECK_THROWS_AS(parse_config_json(bad2), ConfigError);

    CHECK_THROWS_AS(parse_config_json("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("[1,2,3]"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("{\"t_s\": 0.01}"), ConfigError);

    // Wrong types
    std::string bad3 = good;
    const auto tpos = bad3.find("\"t_s\": 0.01");
    bad3.replace(tpos, 11, "\"t_s\": \"fast\"");
    CHECK_THROWS_AS(parse_config_json(bad3), ConfigError);
}

TEST_CASE("config validation catches structural mistakes") {
    TuneConfig cfg = small_config();
    cfg.theta0 = {1.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = small_config();
    cfg.bounds.lower = {5.0, 0.0, 0.0};  // above upper
    CHECK_THROWS_AS(cfg.validate(), Error);

    cfg = small_config();
    cfg.input.type = "chirp";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = small_config();
    cfg.horizon_seconds = 0.02;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = small_config();
    cfg.reference.omega_c = 1e9;  // outside the approximation band
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("data CSV round-trips awkward doubles losslessly") {
    std::vector<double> r{1.0, 1.0, 1.0, 1.0}, u{1.0 / 3.0, 1e-17, -2.5e8, 0.1},
        y{0.0, 0.1 + 0.2, 1e-300, 4.0 / 7.0};
    ExperimentData data(Signal(r, 0.01), Signal(u, 0.01), Signal(y, 0.01));
    const std::string path = temp_path("idfrit_roundtrip.csv");
    write_data_csv(path, data);
    ExperimentData back = read_data_csv(path);
    CHECK(back.r.ts == data.r.ts);
    CHECK(back.r.samples == data.r.samples);
    CHECK(back.u.samples == data.u.samples);
    CHECK(back.y.samples == data.y.samples);
    std::remove(path.c_str());
}

TEST_CASE("data CSV rejects malformed content") {
    const std::string path = temp_path("idfrit_bad.csv");
    {
        std::ofstream f(path);
        f << "k,t,r,u,y\n0,0,0.0,0.1,0.2\n1,0.01,1,0.1,0.2\n";  // r starts at zero
    }
    CHECK_THROWS_AS(read_data_csv(path), BadData);
    {
        std::ofstream f(path);
        f << "k,t,u,y\n";
    }
    CHECK_THROWS_AS(read_data_csv(path), BadData);
    {
        std::ofstream f(path);
        f << "k,t,r,u,y\n0,0,1,0.1,abc\n1,0.01,1,0.1,0.2\n";
    }
    CHECK_THROWS_AS(read_data_csv(path), BadData);
    {
        std::ofstream f(path);
        f << "k,t,r,u,y\n0,0,1,0.1,0.2\n2,0.02,1,0.1,0.2\n";  // skipped index
    }
    CHECK_THROWS_AS(read_data_csv(path), BadData);
    std::remove(path.c_str());
}

TEST_CASE("tuning run produces a coherent report and restored impulse") {
    TuneConfig cfg = small_config();
    ExperimentData data = collect_for(cfg);
    TuneRun run = run_tune(cfg, data, 2);

    CHECK((run.exit_code == 0 || run.exit_code == 2));
    CHECK(run.result.theta_star.size() == 3);
    CHECK(run.result.J_star < kLossPenalty);
    CHECK(run.result.restored_impulse.size() == data.r.size());
    CHECK(run.J_threshold > 0.0);

    // The report body parses and echoes the config.
    CHECK(run.canonical_body.find("\"tool\": \"idfrit 1.0.0\"") != std::string::npos);
    CHECK(run.canonical_body.find("\"verdict\"") != std::string::npos);
    CHECK(run.canonical_body.find("\"t_s\": 0.01") != std::string::npos);
    CHECK(run.report_json.find("\"generated_at\"") != std::string::npos);
    // Timestamps stay out of the canonical body.
    CHECK(run.canonical_body.find("generated_at") == std::string::npos);
}

TEST_CASE("report bodies are byte-identical across thread counts") {
    TuneConfig cfg = small_config();
    ExperimentData data = collect_for(cfg);
    TuneRun one = run_tune(cfg, data, 1);
    TuneRun four = run_tune(cfg, data, 4);
    CHECK(one.canonical_body == four.canonical_body);
    CHECK(one.result.theta_star == four.result.theta_star);
    CHECK(one.result.history == four.result.history);
}

TEST_CASE("tuning refuses data that disagrees with the config clock") {
    TuneConfig cfg = small_config();
    ExperimentData data = collect_for(cfg);
    TuneConfig wrong = cfg;
    wrong.ts = 0.02;
    wrong.reference.ts = 0.02;
    CHECK_THROWS_AS(run_tune(wrong, data, 1), ConfigError);
}

TEST_CASE("command round trip: collect, tune, evaluate, reference") {
    TuneConfig cfg = small_config();
    const std::string dir = temp_path("idfrit_cmd_test");
    std::filesystem::remove_all(dir);

    CHECK(cmd_collect(cfg, dir) == 0);
    CHECK(std::filesystem::exists(dir + "/data.csv"));

    const int rc = cmd_tune(cfg, dir + "/data.csv", dir, 2);
    CHECK((rc == 0 || rc == 2));
    CHECK(std::filesystem::exists(dir + "/report.json"));
    CHECK(std::filesystem::exists(dir + "/restored_impulse.csv"));

    CHECK(cmd_evaluate(cfg, {1.0, 0.5, 0.0}, dir + "/data.csv", dir) == 0);
    CHECK(std::filesystem::exists(dir + "/metrics.json"));
    CHECK(std::filesystem::exists(dir + "/bode.csv"));
    CHECK(std::filesystem::exists(dir + "/robustness.csv"));

    CHECK(cmd_reference(cfg, dir) == 0);
    CHECK(std::filesystem::exists(dir + "/reference.csv"));
    CHECK(std::filesystem::exists(dir + "/reference.json"));

    std::filesystem::remove_all(dir);
}

TEST_CASE("collect requires a plant model") {
    TuneConfig cfg = small_config();
    cfg.plant.reset();
    CHECK_THROWS_AS(cmd_collect(cfg, temp_path("idfrit_nowhere")), ConfigError);
}
