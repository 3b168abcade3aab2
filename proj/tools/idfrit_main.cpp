#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "idfrit/cli.hpp"
#include "idfrit/errors.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw idfrit::ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

idfrit::cli::TuneConfig load_config(const std::string& config_path, const std::string& preset_name,
                                    std::optional<std::uint64_t> seed) {
    if (config_path.empty() == preset_name.empty())
        throw idfrit::ConfigError("exactly one of --config or --preset is required");
    idfrit::cli::TuneConfig cfg = config_path.empty()
                                      ? idfrit::cli::preset(preset_name)
                                      : idfrit::cli::parse_config_json(read_file(config_path));
    if (seed) cfg.pso.seed = *seed;
    return cfg;
}

std::vector<double> parse_theta(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw idfrit::ConfigError("cannot parse theta entry \"" + cell + "\"");
        }
    }
    if (out.empty()) throw idfrit::ConfigError("--theta must list at least one value");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-shot data-driven controller tuning against a flat-phase reference model"};
    app.require_subcommand(1);

    std::string config_path, preset_name, data_path, out_dir = ".", theta_text, list_arg;
    std::optional<std::uint64_t> seed;
    int threads = 0;

    auto add_common = [&](CLI::App* sub, bool with_data) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--preset", preset_name, "built-in configuration name");
        sub->add_option("--out", out_dir, "output directory (default .)");
        if (with_data) sub->add_option("--data", data_path, "closed-loop record CSV");
    };

    CLI::App* collect = app.add_subcommand("collect", "simulate the initial closed loop and log it");
    add_common(collect, false);

    CLI::App* tune = app.add_subcommand("tune", "search controller parameters against the data");
    add_common(tune, true);
    tune->add_option("--seed", seed, "override the search seed");
    tune->add_option("--threads", threads, "loss evaluation threads (0: all cores)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "report metrics for a fixed theta");
    add_common(evaluate, true);
    evaluate->add_option("--theta", theta_text, "comma-separated controller parameters")
        ->required();

    CLI::App* reference = app.add_subcommand("reference", "emit the reference model responses");
    add_common(reference, false);

    CLI::App* preset_cmd = app.add_subcommand("preset", "built-in configuration tools");
    preset_cmd->add_option("action", list_arg, "only \"list\" is supported")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (collect->parsed())
            return idfrit::cli::cmd_collect(load_config(config_path, preset_name, seed), out_dir);
        if (tune->parsed()) {
            if (data_path.empty()) throw idfrit::ConfigError("tune needs --data");
            return idfrit::cli::cmd_tune(load_config(config_path, preset_name, seed), data_path,
                                         out_dir, threads);
        }
        if (evaluate->parsed()) {
            std::optional<std::string> data;
            if (!data_path.empty()) data = data_path;
            return idfrit::cli::cmd_evaluate(load_config(config_path, preset_name, seed),
                                             parse_theta(theta_text), data, out_dir);
        }
        if (reference->parsed())
            return idfrit::cli::cmd_reference(load_config(config_path, preset_name, seed), out_dir);
        if (preset_cmd->parsed()) {
            if (list_arg != "list") throw idfrit::ConfigError("unknown preset action: " + list_arg);
            for (const auto& [name, blurb] : idfrit::cli::preset_list())
                std::printf("%-14s %s\n", name.c_str(), blurb.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
