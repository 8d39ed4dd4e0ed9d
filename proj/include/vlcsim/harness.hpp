#pragma once

// Experiment orchestration: training runs, channel-ratio sweeps, SNR-BER
// sweeps, the generalization study on widened channel bounds, and the
// illumination comparison.  Every run is seeded; per-(point, policy, trial)
// substreams make the CSV outputs byte-identical for any worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vlcsim/config.hpp"
#include "vlcsim/link.hpp"
#include "vlcsim/policies.hpp"
#include "vlcsim/sac.hpp"

namespace vlcsim {

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::vector<Policy> policies{Policy::Sac, Policy::Grpa, Policy::Ngdpa, Policy::Tdma};
    double r_start = 0.01;
    double r_stop = 0.99;
    double r_step = 0.01;
    int trials = 20;           // independent channel draws / seeds per grid point
    double snr_start_db = 0.0;
    double snr_stop_db = 30.0;
    double snr_step_db = 2.0;
    std::vector<double> snr_ratios{0.1, 0.5, 0.9};
    double snr_h1 = 3.132e-4;  // fixed stronger-user gain for the SNR sweep
    double bounds_scale = 1.0; // channel-bound widening factor
    double illum_rho = 0.0333;
    int threads = 1;
    bool paper_scale = false;  // 0.001 r-step and 500 trials

    LinkConfig link;
    AgentConfig agent;
    RewardConfig reward;
    EnvConfig env;

    static ExperimentConfig from_config(const Config& c);
};

struct SweepRow {
    double x;     // r for ratio sweeps, SNR dB for the SNR sweep
    double ratio; // channel ratio r (same as x for ratio sweeps)
    Policy policy;
    double rho;
    double t1, t2, sum_rate; // Mbit/s
    double jain;
    double ber1, ber2;
    std::uint64_t trial;
};

struct SweepResult {
    std::vector<SweepRow> rows;      // per trial
    std::vector<SweepRow> aggregate; // mean over trials per (x, policy)
};

// Training: runs the SAC loop, writes <out>.csv history and the checkpoint.
TrainResult run_train(const ExperimentConfig& cfg, const std::string& ckpt_path,
                      const std::string& csv_path);

// Ratio sweep over the r grid for each policy.
SweepResult run_sweep_r(const ExperimentConfig& cfg, const SacAgent* agent);

// BER versus SNR at fixed h1 for each ratio in cfg.snr_ratios.
SweepResult run_snr_ber(const ExperimentConfig& cfg, const SacAgent* agent);

// Ratio sweep on 5x-widened channel bounds; never trains.
SweepResult run_generalization(const ExperimentConfig& cfg, const SacAgent* agent);

struct IlluminationRow {
    std::string label;
    double cri, cct_k, flux_lm, flux_ratio;
};
std::vector<IlluminationRow> run_illumination(const ExperimentConfig& cfg,
                                              const std::string& data_dir);

// CSV writers (UTF-8, comma-separated, '.' decimal point, header row).
void write_sweep_csv(const std::string& path, const SweepResult& result,
                     const std::string& x_name);
void write_train_csv(const std::string& path, const TrainResult& result);
void write_illumination_csv(const std::string& path,
                            const std::vector<IlluminationRow>& rows);

} // namespace vlcsim
