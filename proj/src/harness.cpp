#include "vlcsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "vlcsim/errors.hpp"
#include "vlcsim/illumination.hpp"

namespace vlcsim {

namespace {

// Stream labels for the experiment substream scheme: every random quantity is
// drawn from derive(seed, {kind, point, policy, trial}).
constexpr std::uint64_t kStreamChannel = 10;
constexpr std::uint64_t kStreamBer = 11;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<double> grid(double start, double stop, double step) {
    std::vector<double> out;
    for (double v = start; v <= stop + 0.5 * step; v += step)
        out.push_back(std::min(v, stop));
    if (!out.empty() && out.size() >= 2 && out[out.size() - 1] == out[out.size() - 2])
        out.pop_back();
    return out;
}

// Run one (grid point, policy, trial) cell of a ratio sweep.
SweepRow eval_cell_r(const ExperimentConfig& cfg, const LinkContext& ctx,
                     const SacAgent* agent, double r, Policy policy,
                     std::uint64_t point_idx, std::uint64_t policy_idx,
                     std::uint64_t trial) {
    Rng ch_rng = Rng::derive(cfg.seed, {kStreamChannel, point_idx, policy_idx, trial});
    const auto [lo, hi] = cfg.bounds_scale == 1.0
                              ? std::pair<double, double>{kGainLowerDefault, kGainUpperDefault}
                              : extended_bounds(cfg.bounds_scale);
    const ChannelPair pair = sample_channel_pair(r, ch_rng, lo, hi);
    Rng ber_rng = Rng::derive(cfg.seed, {kStreamBer, point_idx, policy_idx, trial});

    SweepRow row{};
    row.x = r;
    row.ratio = r;
    row.policy = policy;
    row.trial = trial;
    LinkReport rep;
    if (policy == Policy::Tdma) {
        row.rho = 0.0; // time split, not a power split
        rep = tdma_eval(pair, ctx, cfg.link.mc_symbols, ber_rng);
    } else {
        row.rho = apply_policy(policy, pair, agent).rho1;
        rep = evaluate_link(pair, std::max(row.rho, 1e-9), ctx, cfg.link.mc_symbols,
                            ber_rng);
    }
    row.t1 = rep.throughput1 / 1e6;
    row.t2 = rep.throughput2 / 1e6;
    row.sum_rate = rep.sum_rate / 1e6;
    row.jain = rep.jain;
    row.ber1 = rep.ber1;
    row.ber2 = rep.ber2;
    return row;
}

SweepRow eval_cell_snr(const ExperimentConfig& cfg, const LinkConfig& link_at_snr,
                       const SacAgent* agent, double snr_db, double r, Policy policy,
                       std::uint64_t point_idx, std::uint64_t policy_idx,
                       std::uint64_t trial) {
    LinkContext ctx(link_at_snr);
    Rng ber_rng = Rng::derive(cfg.seed, {kStreamBer, point_idx, policy_idx, trial});
    const ChannelPair pair{cfg.snr_h1, cfg.snr_h1 * r, r};

    SweepRow row{};
    row.x = snr_db;
    row.ratio = r;
    row.policy = policy;
    row.trial = trial;
    LinkReport rep;
    if (policy == Policy::Tdma) {
        row.rho = 0.0;
        rep = tdma_eval(pair, ctx, cfg.link.mc_symbols, ber_rng);
    } else {
        row.rho = apply_policy(policy, pair, agent).rho1;
        rep = evaluate_link(pair, std::max(row.rho, 1e-9), ctx, cfg.link.mc_symbols,
                            ber_rng);
    }
    row.t1 = rep.throughput1 / 1e6;
    row.t2 = rep.throughput2 / 1e6;
    row.sum_rate = rep.sum_rate / 1e6;
    row.jain = rep.jain;
    row.ber1 = rep.ber1;
    row.ber2 = rep.ber2;
    return row;
}

// Deterministic parallel map: results land in a preallocated slot per job, so
// the output is identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(threads, static_cast<int>(n));
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

std::vector<SweepRow> aggregate_rows(const std::vector<SweepRow>& rows) {
    // mean over trials per (x, ratio, policy), preserving first-seen order
    std::vector<SweepRow> agg;
    std::map<std::tuple<long long, long long, int>, std::size_t> index;
    std::vector<std::size_t> counts;
    for (const SweepRow& r : rows) {
        const auto key = std::make_tuple(std::llround(r.x * 1e9),
                                         std::llround(r.ratio * 1e9),
                                         static_cast<int>(r.policy));
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, agg.size());
            SweepRow a = r;
            a.trial = 0;
            agg.push_back(a);
            counts.push_back(1);
        } else {
            SweepRow& a = agg[it->second];
            a.rho += r.rho;
            a.t1 += r.t1;
            a.t2 += r.t2;
            a.sum_rate += r.sum_rate;
            a.jain += r.jain;
            a.ber1 += r.ber1;
            a.ber2 += r.ber2;
            ++counts[it->second];
        }
    }
    for (std::size_t i = 0; i < agg.size(); ++i) {
        const double n = static_cast<double>(counts[i]);
        agg[i].rho /= n;
        agg[i].t1 /= n;
        agg[i].t2 /= n;
        agg[i].sum_rate /= n;
        agg[i].jain /= n;
        agg[i].ber1 /= n;
        agg[i].ber2 /= n;
    }
    return agg;
}

} // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& c) {
    ExperimentConfig e;
    e.seed = c.get_u64("seed", e.seed);
    e.paper_scale = c.get_bool("sweep.paper_scale", e.paper_scale);
    e.r_step = c.get_double("sweep.r_step", e.paper_scale ? 0.001 : 0.01);
    e.r_start = c.get_double("sweep.r_start", e.paper_scale ? 0.001 : 0.01);
    e.r_stop = c.get_double("sweep.r_stop", e.paper_scale ? 0.999 : 0.99);
    e.trials = static_cast<int>(c.get_int("sweep.trials", e.paper_scale ? 500 : 20));
    e.snr_start_db = c.get_double("sweep.snr_start_db", e.snr_start_db);
    e.snr_stop_db = c.get_double("sweep.snr_stop_db", e.snr_stop_db);
    e.snr_step_db = c.get_double("sweep.snr_step_db", e.snr_step_db);
    e.snr_ratios = c.get_double_list("sweep.snr_ratios", e.snr_ratios);
    e.snr_h1 = c.get_double("sweep.snr_h1", e.snr_h1);
    e.bounds_scale = c.get_double("channel.bounds_scale", e.bounds_scale);
    e.illum_rho = c.get_double("illum.rho", e.illum_rho);
    e.threads = static_cast<int>(c.get_int("threads", e.threads));

    if (c.has("policies")) {
        e.policies.clear();
        std::stringstream ss(c.get_string("policies", ""));
        std::string item;
        while (std::getline(ss, item, ',')) e.policies.push_back(parse_policy(item));
    }

    e.link.bandwidth_hz = c.get_double("link.bandwidth_hz", e.link.bandwidth_hz);
    e.link.snr_db = c.get_double("link.snr_db", e.link.snr_db);
    e.link.p_led_w = c.get_double("link.p_led_w", e.link.p_led_w);
    e.link.mc_symbols = c.get_u64("link.mc_symbols", e.link.mc_symbols);
    e.link.mc_symbols_train = c.get_u64("link.mc_symbols_train", e.link.mc_symbols_train);
    e.link.noise_floor = c.get_double("link.noise_floor", e.link.noise_floor);
    e.link.noise_signal = c.get_double("link.noise_signal", e.link.noise_signal);

    e.agent.gamma = c.get_double("agent.gamma", e.agent.gamma);
    e.agent.alpha = c.get_double("agent.alpha", e.agent.alpha);
    e.agent.tau = c.get_double("agent.tau", e.agent.tau);
    e.agent.lr = c.get_double("agent.lr", e.agent.lr);
    e.agent.buffer_capacity = c.get_u64("agent.buffer_capacity", e.agent.buffer_capacity);
    e.agent.batch_size = c.get_u64("agent.batch_size", e.agent.batch_size);
    e.agent.max_episodes = static_cast<int>(c.get_int("agent.max_episodes", e.agent.max_episodes));
    e.agent.score_window = static_cast<int>(c.get_int("agent.score_window", e.agent.score_window));
    e.agent.stop_value = c.get_double("agent.stop_value", e.agent.stop_value);
    e.agent.hidden = static_cast<int>(c.get_int("agent.hidden", e.agent.hidden));
    e.agent.warmup_steps = static_cast<int>(c.get_int("agent.warmup_steps", e.agent.warmup_steps));
    e.agent.updates_per_step =
        static_cast<int>(c.get_int("agent.updates_per_step", e.agent.updates_per_step));
    e.agent.init_action_bias = c.get_double("agent.init_action_bias", e.agent.init_action_bias);

    e.reward.w_sum_rate = c.get_double("reward.w_sum_rate", e.reward.w_sum_rate);
    e.reward.sum_rate_scale = c.get_double("reward.sum_rate_scale", e.reward.sum_rate_scale);
    e.reward.ber_threshold = c.get_double("reward.ber_threshold", e.reward.ber_threshold);

    e.env.gain_lower = c.get_double("channel.h_min", e.env.gain_lower);
    e.env.gain_upper = c.get_double("channel.h_max", e.env.gain_upper);
    e.env.max_steps_per_episode =
        static_cast<int>(c.get_int("env.max_steps_per_episode", e.env.max_steps_per_episode));
    e.env.fairness_target = c.get_double("env.fairness_target", e.env.fairness_target);
    return e;
}

TrainResult run_train(const ExperimentConfig& cfg, const std::string& ckpt_path,
                      const std::string& csv_path) {
    LinkContext ctx(cfg.link);
    NomaEnv env(cfg.env, cfg.reward, ctx);
    SacAgent agent(cfg.agent, cfg.seed);
    TrainResult result = train(agent, env, cfg.seed);
    if (!ckpt_path.empty()) agent.save(ckpt_path);
    if (!csv_path.empty()) write_train_csv(csv_path, result);
    return result;
}

SweepResult run_sweep_r(const ExperimentConfig& cfg, const SacAgent* agent) {
    for (Policy p : cfg.policies)
        if (p == Policy::Sac && agent == nullptr)
            throw ConfigError("r sweep includes the sac policy but no checkpoint was given");
    LinkContext ctx(cfg.link);
    const std::vector<double> rs = grid(cfg.r_start, cfg.r_stop, cfg.r_step);
    const std::size_t cells = rs.size() * cfg.policies.size() * cfg.trials;

    SweepResult out;
    out.rows.resize(cells);
    parallel_for(cells, cfg.threads, [&](std::size_t idx) {
        const std::size_t per_point = cfg.policies.size() * cfg.trials;
        const std::size_t pi = idx / per_point;
        const std::size_t rest = idx % per_point;
        const std::size_t li = rest / cfg.trials;
        const std::size_t trial = rest % cfg.trials;
        out.rows[idx] = eval_cell_r(cfg, ctx, agent, rs[pi], cfg.policies[li], pi, li, trial);
    });
    out.aggregate = aggregate_rows(out.rows);
    return out;
}

SweepResult run_snr_ber(const ExperimentConfig& cfg, const SacAgent* agent) {
    for (Policy p : cfg.policies)
        if (p == Policy::Sac && agent == nullptr)
            throw ConfigError("snr sweep includes the sac policy but no checkpoint was given");
    const std::vector<double> snrs = grid(cfg.snr_start_db, cfg.snr_stop_db, cfg.snr_step_db);

    struct Job {
        double snr_db, r;
        Policy policy;
        std::uint64_t point_idx, policy_idx, trial;
    };
    std::vector<Job> jobs;
    std::uint64_t point = 0;
    for (double r : cfg.snr_ratios) {
        for (double snr : snrs) {
            for (std::size_t li = 0; li < cfg.policies.size(); ++li)
                for (int t = 0; t < cfg.trials; ++t)
                    jobs.push_back({snr, r, cfg.policies[li], point, li,
                                    static_cast<std::uint64_t>(t)});
            ++point;
        }
    }
    SweepResult out;
    out.rows.resize(jobs.size());
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
        const Job& j = jobs[i];
        LinkConfig link = cfg.link;
        link.snr_db = j.snr_db;
        out.rows[i] = eval_cell_snr(cfg, link, agent, j.snr_db, j.r, j.policy,
                                    j.point_idx, j.policy_idx, j.trial);
    });
    out.aggregate = aggregate_rows(out.rows);
    return out;
}

SweepResult run_generalization(const ExperimentConfig& cfg, const SacAgent* agent) {
    ExperimentConfig wide = cfg;
    wide.bounds_scale = 5.0;
    const std::uint64_t updates_before = training_update_count();
    SweepResult res = run_sweep_r(wide, agent);
    if (training_update_count() != updates_before)
        throw ConfigError("generalization run must not train the agent");
    return res;
}

std::vector<IlluminationRow> run_illumination(const ExperimentConfig& cfg,
                                              const std::string& data_dir) {
    const CieDataset cie = CieDataset::load(data_dir);
    const auto leds = default_led_params();
    std::array<SpectralCurve, 3> psds;
    for (int i = 0; i < 3; ++i) psds[i] = normalized_psd(leds[i]);
    const IlluminationComparison cmp = illumination_compare(
        cie, psds, default_constellation(), cfg.illum_rho, cfg.link.p_led_w);
    const double base_flux = cmp.no_comm.luminous_flux_lm;
    auto row = [&](const std::string& label, const IlluminationReport& r) {
        return IlluminationRow{label, r.cri_ra, r.cct_k, r.luminous_flux_lm,
                               r.luminous_flux_lm / base_flux};
    };
    return {row("no_comm", cmp.no_comm), row("csk_only", cmp.csk_only),
            row("noma_csk", cmp.noma_csk)};
}

void write_sweep_csv(const std::string& path, const SweepResult& result,
                     const std::string& x_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CSV: " + path);
    const bool snr_mode = x_name == "snr_db";
    if (snr_mode)
        out << "snr_db,r,policy,rho,ber1,ber2,jain,trial,aggregated\n";
    else
        out << "r,policy,rho,t1_mbps,t2_mbps,sum_rate_mbps,jain,ber1,ber2,trial,aggregated\n";
    auto emit = [&](const SweepRow& r, bool agg) {
        if (snr_mode) {
            out << fmt(r.x) << ',' << fmt(r.ratio) << ',' << policy_name(r.policy) << ','
                << fmt(r.rho) << ',' << fmt(r.ber1) << ',' << fmt(r.ber2) << ','
                << fmt(r.jain) << ',' << r.trial << ',' << (agg ? 1 : 0) << '\n';
        } else {
            out << fmt(r.x) << ',' << policy_name(r.policy) << ',' << fmt(r.rho) << ','
                << fmt(r.t1) << ',' << fmt(r.t2) << ',' << fmt(r.sum_rate) << ','
                << fmt(r.jain) << ',' << fmt(r.ber1) << ',' << fmt(r.ber2) << ','
                << r.trial << ',' << (agg ? 1 : 0) << '\n';
        }
    };
    for (const SweepRow& r : result.rows) emit(r, false);
    for (const SweepRow& r : result.aggregate) emit(r, true);
    if (!out) throw IoError("write failure on CSV: " + path);
}

void write_train_csv(const std::string& path, const TrainResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CSV: " + path);
    out << "episode,return,steps,terminal_jain,rolling_avg_return\n";
    for (const EpisodeStats& e : result.history)
        out << e.episode << ',' << fmt(e.ret) << ',' << e.steps << ','
            << fmt(e.terminal_jain) << ',' << fmt(e.rolling_avg) << '\n';
    if (!out) throw IoError("write failure on CSV: " + path);
}

void write_illumination_csv(const std::string& path,
                            const std::vector<IlluminationRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CSV: " + path);
    out << "case,cri,cct_k,flux_lm,flux_ratio\n";
    for (const IlluminationRow& r : rows)
        out << r.label << ',' << fmt(r.cri) << ',' << fmt(r.cct_k) << ','
            << fmt(r.flux_lm) << ',' << fmt(r.flux_ratio) << '\n';
    if (!out) throw IoError("write failure on CSV: " + path);
}

} // namespace vlcsim
