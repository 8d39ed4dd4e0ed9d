// Command-line driver for the NOMA-CSK VLC experiments.
//
// Subcommands: train, sweep-r, snr-ber, generalize, illum.  Each takes
// --config/--seed/--out; sweeps additionally take --agent and --policy.
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "vlcsim/errors.hpp"
#include "vlcsim/harness.hpp"

#ifndef VLCSIM_DEFAULT_DATA_DIR
#define VLCSIM_DEFAULT_DATA_DIR "data"
#endif

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string agent_path;
    std::string policies;
    std::string data_dir = VLCSIM_DEFAULT_DATA_DIR;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    bool paper_scale = false;
};

vlcsim::ExperimentConfig load_experiment(const CommonArgs& a) {
    vlcsim::Config file_cfg;
    if (!a.config_path.empty()) file_cfg = vlcsim::Config::from_file(a.config_path);
    if (a.seed_given) file_cfg.set("seed", std::to_string(a.seed));
    if (!a.policies.empty()) file_cfg.set("policies", a.policies);
    if (a.threads > 0) file_cfg.set("threads", std::to_string(a.threads));
    if (a.paper_scale) file_cfg.set("sweep.paper_scale", "true");
    return vlcsim::ExperimentConfig::from_config(file_cfg);
}

std::unique_ptr<vlcsim::SacAgent> load_agent_if(const std::string& path) {
    if (path.empty()) return nullptr;
    return std::make_unique<vlcsim::SacAgent>(vlcsim::SacAgent::load(path));
}

void add_common(CLI::App* cmd, CommonArgs& a, bool with_agent) {
    cmd->add_option("--config", a.config_path, "flat key=value config file");
    cmd->add_option("--seed", a.seed, "master seed")->each([&](const std::string&) {
        a.seed_given = true;
    });
    cmd->add_option("--out", a.out_path, "output path")->required();
    cmd->add_option("--threads", a.threads, "worker threads (default 1)");
    cmd->add_flag("--paper-scale", a.paper_scale,
                  "publication-scale grids (0.001 r-step, 500 trials)");
    if (with_agent) {
        cmd->add_option("--agent", a.agent_path, "trained agent checkpoint");
        cmd->add_option("--policy", a.policies, "comma-separated policy list");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"NOMA-CSK visible light communication simulator"};
    app.require_subcommand(1);

    CommonArgs train_args, sweep_args, snr_args, gen_args, illum_args;

    CLI::App* cmd_train = app.add_subcommand("train", "train the SAC power allocator");
    add_common(cmd_train, train_args, false);
    std::string ckpt_path;
    cmd_train->add_option("--ckpt", ckpt_path, "checkpoint output path");

    CLI::App* cmd_sweep = app.add_subcommand("sweep-r", "channel-ratio sweep");
    add_common(cmd_sweep, sweep_args, true);

    CLI::App* cmd_snr = app.add_subcommand("snr-ber", "BER versus SNR sweep");
    add_common(cmd_snr, snr_args, true);

    CLI::App* cmd_gen = app.add_subcommand("generalize",
                                           "ratio sweep on 5x-widened channel bounds");
    add_common(cmd_gen, gen_args, true);

    CLI::App* cmd_illum = app.add_subcommand("illum", "illumination comparison table");
    add_common(cmd_illum, illum_args, false);
    cmd_illum->add_option("--data-dir", illum_args.data_dir, "CIE data directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_train->parsed()) {
            const auto cfg = load_experiment(train_args);
            const std::string ckpt =
                ckpt_path.empty() ? train_args.out_path + ".ckpt" : ckpt_path;
            const vlcsim::TrainResult res =
                vlcsim::run_train(cfg, ckpt, train_args.out_path);
            std::cout << "episodes: " << res.history.size();
            if (res.stop_episode > 0)
                std::cout << " (stop rule met at episode " << res.stop_episode << ")";
            std::cout << "\ncheckpoint: " << ckpt << "\ncsv: " << train_args.out_path
                      << std::endl;
        } else if (cmd_sweep->parsed()) {
            const auto cfg = load_experiment(sweep_args);
            const auto agent = load_agent_if(sweep_args.agent_path);
            const auto res = vlcsim::run_sweep_r(cfg, agent.get());
            vlcsim::write_sweep_csv(sweep_args.out_path, res, "r");
            std::cout << "rows: " << res.rows.size() << "\ncsv: " << sweep_args.out_path
                      << std::endl;
        } else if (cmd_snr->parsed()) {
            const auto cfg = load_experiment(snr_args);
            const auto agent = load_agent_if(snr_args.agent_path);
            const auto res = vlcsim::run_snr_ber(cfg, agent.get());
            vlcsim::write_sweep_csv(snr_args.out_path, res, "snr_db");
            std::cout << "rows: " << res.rows.size() << "\ncsv: " << snr_args.out_path
                      << std::endl;
        } else if (cmd_gen->parsed()) {
            const auto cfg = load_experiment(gen_args);
            const auto agent = load_agent_if(gen_args.agent_path);
            const auto res = vlcsim::run_generalization(cfg, agent.get());
            vlcsim::write_sweep_csv(gen_args.out_path, res, "r");
            std::cout << "rows: " << res.rows.size() << "\ncsv: " << gen_args.out_path
                      << std::endl;
        } else if (cmd_illum->parsed()) {
            const auto cfg = load_experiment(illum_args);
            const auto rows = vlcsim::run_illumination(cfg, illum_args.data_dir);
            vlcsim::write_illumination_csv(illum_args.out_path, rows);
            std::cout << "csv: " << illum_args.out_path << std::endl;
        }
    } catch (const vlcsim::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << std::endl;
        return 2;
    } catch (const vlcsim::FormatError& e) {
        std::cerr << "format error: " << e.what() << std::endl;
        return 2;
    } catch (const vlcsim::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << std::endl;
        return 2;
    } catch (const vlcsim::IoError& e) {
        std::cerr << "i/o error: " << e.what() << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
