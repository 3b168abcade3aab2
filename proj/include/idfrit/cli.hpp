#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idfrit/freq.hpp"
#include "idfrit/fractional.hpp"
#include "idfrit/sim.hpp"
#include "idfrit/tuning.hpp"

namespace idfrit::cli {

inline constexpr const char* kToolVersion = "idfrit 1.0.0";

/// Continuous-time plant model, used by collect/evaluate validation modes.
struct PlantDef {
    Polynomial num;
    Polynomial den;
};

struct ReferenceInput {
    std::string type = "step";  // "step" or "impulse"
    double amplitude = 1.0;
};

/// Everything a tuning run needs, mirrored one-to-one by the JSON config.
struct TuneConfig {
    double ts = 0.01;
    double horizon_seconds = 1.0;
    ReferenceModelSpec reference;
    ControllerStructure structure = ControllerStructure::IOPID;
    std::vector<double> theta0;
    SearchBounds bounds;
    double tau = 0.0;                 // 0 → defaults to ts
    OustaloupSettings controller_oust;
    bool controller_oust_set = false; // false → defaults to reference band
    PsoSettings pso;
    std::optional<double> J_threshold;
    std::optional<PlantDef> plant;
    ReferenceInput input;

    std::size_t horizon_samples() const;
    ControllerSpec controller_template() const;
    void validate() const;
};

/// Built-in configurations reproducing the bundled worked examples.
TuneConfig preset(const std::string& name);
std::vector<std::pair<std::string, std::string>> preset_list();

/// Strict JSON → config parsing; unknown keys anywhere are ConfigError.
TuneConfig parse_config_json(const std::string& text);
std::string config_to_json(const TuneConfig& cfg);

void write_data_csv(const std::string& path, const ExperimentData& data);
ExperimentData read_data_csv(const std::string& path);
void write_series_csv(const std::string& path, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows);

/// Tuning outcome plus everything the report carries.
struct TuneRun {
    TuneResult result;
    double omega_c = 0.0;
    double phase_margin_deg = 0.0;
    double flatness_deg_per_decade = 0.0;
    bool multiple_crossings = false;
    StepMetrics reference_step;
    StepMetrics estimated_step;
    double J_threshold = 0.0;
    std::string canonical_body;  // byte-stable report subtree
    std::string report_json;     // canonical body + generated_at sidecar
    int exit_code = 1;
};

/// Tuning pipeline shared by cmd_tune and the acceptance harness.
TuneRun run_tune(const TuneConfig& cfg, const ExperimentData& data, int threads);

int cmd_collect(const TuneConfig& cfg, const std::string& out_dir);
int cmd_tune(const TuneConfig& cfg, const std::string& data_path, const std::string& out_dir,
             int threads);
int cmd_evaluate(const TuneConfig& cfg, const std::vector<double>& theta,
                 const std::optional<std::string>& data_path, const std::string& out_dir);
int cmd_reference(const TuneConfig& cfg, const std::string& out_dir);

}  // namespace idfrit::cli
