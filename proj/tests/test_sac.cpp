#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "vlcsim/errors.hpp"
#include "vlcsim/sac.hpp"

using namespace vlcsim;

namespace {

std::vector<Transition> fixed_batch() {
    std::vector<Transition> b;
    Rng rng(99);
    for (int i = 0; i < 8; ++i) {
        Transition t;
        t.state = rng.uniform01();
        t.action = rng.uniform(0.0, 0.5);
        t.reward = rng.uniform(-20.0, 150.0);
        t.next_state = t.state;
        t.done = (i % 3 == 0);
        b.push_back(t);
    }
    return b;
}

std::vector<double> fixed_eps(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> e(n);
    for (double& v : e) v = rng.normal();
    return e;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

// zero every parameter and set the output bias so the net is a constant
void make_constant_net(Mlp& net, double value) {
    auto& p = net.params();
    std::fill(p.begin(), p.end(), 0.0);
    p[p.size() - 1] = value;
}

} // namespace

TEST_CASE("actions stay inside [0, 0.5]") {
    AgentConfig cfg;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        SacAgent agent(cfg, seed);
        Rng rng(seed * 77 + 5);
        for (int i = 0; i < 200; ++i) {
            const double s = rng.uniform01();
            const double a = agent.act(s, false, rng);
            CHECK(a >= 0.0);
            CHECK(a <= 0.5);
        }
        const double d1 = agent.act(0.4, true, rng);
        const double d2 = agent.act(0.4, true, rng);
        CHECK(d1 == d2);
    }
}

TEST_CASE("zero mean head gives the midpoint action") {
    AgentConfig cfg;
    cfg.init_action_bias = 0.0;
    SacAgent agent(cfg, 1);
    std::fill(agent.actor().params().begin(), agent.actor().params().end(), 0.0);
    Rng rng(1);
    CHECK(agent.act(0.3, true, rng) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("squashed policy density integrates to one") {
    AgentConfig cfg;
    cfg.init_action_bias = 0.0;
    SacAgent agent(cfg, 1);
    // zero parameters: mean 0, log-std 0
    std::fill(agent.actor().params().begin(), agent.actor().params().end(), 0.0);
    const double state = 0.5;
    const int n = 200000;
    const double lo = 1e-7, hi = 0.5 - 1e-7;
    double acc = 0.0;
    double prev = std::exp(agent.log_prob_density(state, lo));
    const double step = (hi - lo) / n;
    for (int i = 1; i <= n; ++i) {
        const double a = lo + step * i;
        const double cur = std::exp(agent.log_prob_density(state, a));
        acc += 0.5 * (prev + cur) * step;
        prev = cur;
    }
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("critic gradient matches central finite differences") {
    AgentConfig cfg;
    SacAgent agent(cfg, 7);
    const auto batch = fixed_batch();
    const auto next_eps = fixed_eps(batch.size(), 13);
    const auto targets = agent.compute_targets(batch, next_eps);

    for (int which = 0; which < 2; ++which) {
        const auto analytic = agent.critic_gradient(which, batch, targets);
        const auto& params = agent.critic(which).params();
        std::vector<double> fd(params.size());
        const double h = 1e-5;
        for (std::size_t i = 0; i < params.size(); ++i) {
            std::vector<double> p = params;
            p[i] += h;
            const double up = agent.critic_loss_at(p, which, batch, targets);
            p[i] -= 2 * h;
            const double dn = agent.critic_loss_at(p, which, batch, targets);
            fd[i] = (up - dn) / (2 * h);
        }
        CHECK(rel_l2(analytic, fd) < 1e-4);
    }
}

TEST_CASE("actor gradient matches central finite differences") {
    AgentConfig cfg;
    SacAgent agent(cfg, 11);
    const auto batch = fixed_batch();
    const auto eps = fixed_eps(batch.size(), 17);
    const auto analytic = agent.actor_gradient(batch, eps);
    const auto& params = agent.actor().params();
    std::vector<double> fd(params.size());
    const double h = 1e-5;
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<double> p = params;
        p[i] += h;
        const double up = agent.actor_loss_at(p, batch, eps);
        p[i] -= 2 * h;
        const double dn = agent.actor_loss_at(p, batch, eps);
        fd[i] = (up - dn) / (2 * h);
    }
    CHECK(rel_l2(analytic, fd) < 1e-4);
}

TEST_CASE("targets use the minimum of the two target critics") {
    AgentConfig cfg;
    cfg.gamma = 0.9;
    cfg.alpha = 1.0;
    SacAgent agent(cfg, 3);
    make_constant_net(agent.target(0), 1.0);
    make_constant_net(agent.target(1), 2.0);

    std::vector<Transition> batch{{0.4, 0.2, 5.0, 0.4, false}};
    const auto eps = fixed_eps(1, 23);
    const auto y = agent.compute_targets(batch, eps);
    const ActorSample s = agent.policy_sample(0.4, eps[0]);
    CHECK(y[0] == doctest::Approx(5.0 + 0.9 * (1.0 - s.log_prob)).epsilon(1e-12));

    // terminal transitions drop the bootstrap entirely
    batch[0].done = true;
    const auto y2 = agent.compute_targets(batch, eps);
    CHECK(y2[0] == 5.0);

    // gamma = 0 reduces to the reward
    AgentConfig cfg0 = cfg;
    cfg0.gamma = 0.0;
    SacAgent agent0(cfg0, 3);
    batch[0].done = false;
    const auto y3 = agent0.compute_targets(batch, eps);
    CHECK(y3[0] == 5.0);
}

TEST_CASE("soft update blends parameters") {
    AgentConfig cfg;
    SacAgent agent(cfg, 5);
    auto& tgt = agent.target(0).params();
    auto& src = agent.critic(0).params();

    std::fill(tgt.begin(), tgt.end(), 0.0);
    std::fill(src.begin(), src.end(), 1.0);
    std::fill(agent.target(1).params().begin(), agent.target(1).params().end(), 0.0);
    std::fill(agent.critic(1).params().begin(), agent.critic(1).params().end(), 1.0);

    agent.soft_update(1e-3);
    CHECK(tgt[0] == doctest::Approx(0.001).epsilon(1e-12));

    agent.soft_update(0.0);
    CHECK(tgt[0] == doctest::Approx(0.001).epsilon(1e-12));

    agent.soft_update(1.0);
    CHECK(tgt[0] == 1.0);

    // geometric convergence at ratio (1 - tau)
    std::fill(tgt.begin(), tgt.end(), 0.0);
    double dist = 1.0;
    for (int i = 0; i < 50; ++i) {
        agent.soft_update(0.1);
        const double nd = std::abs(tgt[0] - 1.0);
        CHECK(nd == doctest::Approx(dist * 0.9).epsilon(1e-9));
        dist = nd;
    }
}

TEST_CASE("replay buffer is FIFO with bounded size") {
    ReplayBuffer buf(100);
    for (int i = 0; i < 137; ++i)
        buf.push({static_cast<double>(i), 0.0, 0.0, 0.0, false});
    CHECK(buf.size() == 100);
    // the 37 oldest entries are gone
    bool found_old = false;
    double min_state = 1e9;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        min_state = std::min(min_state, buf[i].state);
        if (buf[i].state < 37.0) found_old = true;
    }
    CHECK(!found_old);
    CHECK(min_state == 37.0);
}

TEST_CASE("actor converges on a synthetic bandit") {
    // reward = -(a - 0.3)^2, terminal one-step episodes
    AgentConfig cfg;
    cfg.alpha = 0.01;
    cfg.lr = 1e-2;
    cfg.gamma = 0.0;
    SacAgent agent(cfg, 19);
    Rng rng(19);

    // pre-fill a pool of transitions covering the action range
    std::vector<Transition> pool;
    for (int i = 0; i < 512; ++i) {
        const double a = rng.uniform(0.0, 0.5);
        pool.push_back({0.5, a, -(a - 0.3) * (a - 0.3), 0.5, true});
    }
    for (int it = 0; it < 200; ++it) {
        std::vector<Transition> batch;
        for (int k = 0; k < 64; ++k) batch.push_back(pool[rng.uniform_index(pool.size())]);
        const auto eps = fixed_eps(batch.size(), 1000 + it);
        const auto targets = agent.compute_targets(batch, eps);
        agent.critic_update(batch, targets);
        agent.actor_update(batch, eps);
        agent.soft_update(0.01);
    }
    Rng r2(1);
    CHECK(agent.act(0.5, true, r2) == doctest::Approx(0.3).epsilon(0.067)); // 0.3 +/- 0.02
}

TEST_CASE("reward components") {
    RewardConfig cfg;
    LinkReport rep;
    rep.jain = 0.995;
    rep.sum_rate = 2.04e8;
    rep.ber1 = rep.ber2 = 1.5e-2;
    CHECK(compute_reward(rep, 0.0333, cfg) == doctest::Approx(93.445).epsilon(1e-4));

    rep.jain = 0.5;
    rep.sum_rate = 1.0e8;
    rep.ber1 = rep.ber2 = 1e-3;
    CHECK(compute_reward(rep, 0.25, cfg) == doctest::Approx(3.295).epsilon(1e-4));

    // outside the stability band the -10 penalty replaces the +5 bonus
    rep.jain = 0.995;
    rep.sum_rate = 2.04e8;
    rep.ber1 = rep.ber2 = 1.5e-2;
    const double inside = compute_reward(rep, 0.0333, cfg);
    const double outside = compute_reward(rep, 0.005, cfg);
    const double power_diff = 10.0 * (std::abs(0.005 - 0.25) - std::abs(0.0333 - 0.25));
    CHECK(outside == doctest::Approx(inside - 15.0 + power_diff).epsilon(1e-9));
}

TEST_CASE("environment reset and step semantics") {
    LinkConfig lc;
    lc.mc_symbols_train = 2000;
    const LinkContext ctx(lc);
    RewardConfig rc;
    EnvConfig ec;
    NomaEnv env(ec, rc, ctx);

    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        const double s = env.reset(rng);
        CHECK(s > 0.0);
        CHECK(s <= 1.0);
        CHECK(s == env.pair().r);
    }

    // empirical state distribution is close to uniform (KS statistic)
    std::vector<double> states;
    for (int i = 0; i < 10000; ++i) states.push_back(env.reset(rng));
    std::sort(states.begin(), states.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double emp_hi = static_cast<double>(i + 1) / states.size();
        const double emp_lo = static_cast<double>(i) / states.size();
        ks = std::max({ks, std::abs(emp_hi - states[i]), std::abs(states[i] - emp_lo)});
    }
    CHECK(ks < 0.02);

    // success: reachable fairness target terminates with the bonus applied
    env.reset(rng);
    EnvConfig easy = ec;
    easy.fairness_target = 0.0;
    NomaEnv env_easy(easy, rc, ctx);
    env_easy.reset(rng);
    const auto sr = env_easy.step(0.05, rng);
    CHECK(sr.done);
    LinkReport rep;
    rep.jain = sr.jain;
    // reward carries the +50 on top of the step reward: cross-check the sign
    CHECK(sr.reward > 50.0 - 40.0);

    // impossible target: the episode runs to the step cap and takes the penalty
    EnvConfig hard = ec;
    hard.fairness_target = 1.1;
    hard.max_steps_per_episode = 5;
    NomaEnv env_hard(hard, rc, ctx);
    env_hard.reset(rng);
    for (int i = 0; i < 4; ++i) {
        const auto r = env_hard.step(0.05, rng);
        CHECK(!r.done);
        CHECK(r.next_state == env_hard.pair().r); // static channel within episode
    }
    const auto last = env_hard.step(0.05, rng);
    CHECK(last.done);
    // the -100 penalty dominates the per-step reward scale
    CHECK(last.reward < -50.0);
}

TEST_CASE("checkpoint round trip and resumability") {
    LinkConfig lc;
    lc.mc_symbols_train = 2000;
    const LinkContext ctx(lc);
    RewardConfig rc;
    EnvConfig ec;

    AgentConfig cfg;
    cfg.max_episodes = 12;
    cfg.warmup_steps = 8;
    cfg.stop_value = 1e9; // never stop on the rolling average
    const std::uint64_t seed = 4242;

    // uninterrupted run
    SacAgent full(cfg, seed);
    NomaEnv env1(ec, rc, ctx);
    const TrainResult full_res = train(full, env1, seed);

    // split run with a checkpoint in the middle
    AgentConfig half_cfg = cfg;
    half_cfg.max_episodes = 6;
    SacAgent first(half_cfg, seed);
    NomaEnv env2(ec, rc, ctx);
    const TrainResult first_res = train(first, env2, seed);
    const std::string path = "ckpt_roundtrip.bin";
    first.save(path);

    SacAgent second = SacAgent::load(path);
    Rng probe(1);
    CHECK(second.act(0.5, true, probe) == first.act(0.5, true, probe));
    CHECK(second.buffer().size() == first.buffer().size());

    AgentConfig rest_cfg = cfg; // resume up to 12 episodes total
    SacAgent resumed = SacAgent::load(path);
    // the loaded agent carries its episode counter; train() continues from it
    NomaEnv env3(ec, rc, ctx);
    const TrainResult rest_res = train(resumed, env3, seed);
    (void)rest_cfg;

    CHECK(full_res.history.size() == 12);
    CHECK(first_res.history.size() == 6);
    CHECK(rest_res.history.size() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(rest_res.history[i].ret ==
              doctest::Approx(full_res.history[6 + i].ret).epsilon(1e-12));
        CHECK(rest_res.history[i].steps == full_res.history[6 + i].steps);
    }
    Rng p1(7), p2(7);
    CHECK(resumed.act(0.25, true, p1) == doctest::Approx(full.act(0.25, true, p2)).epsilon(1e-12));

    // corrupted header is rejected
    {
        std::ofstream bad("ckpt_bad.bin", std::ios::binary);
        bad << "NOTACKPT" << std::string(64, '\0');
    }
    CHECK_THROWS_AS(SacAgent::load("ckpt_bad.bin"), FormatError);
    std::remove(path.c_str());
    std::remove("ckpt_bad.bin");
}

TEST_CASE("training is deterministic and bounded by the buffer capacity") {
    LinkConfig lc;
    lc.mc_symbols_train = 2000;
    const LinkContext ctx(lc);
    RewardConfig rc;
    EnvConfig ec;
    AgentConfig cfg;
    cfg.max_episodes = 10;
    cfg.warmup_steps = 6;
    cfg.buffer_capacity = 64;
    cfg.batch_size = 16;
    cfg.stop_value = 1e9;

    SacAgent a(cfg, 77);
    NomaEnv env_a(ec, rc, ctx);
    const TrainResult ra = train(a, env_a, 77);

    SacAgent b(cfg, 77);
    NomaEnv env_b(ec, rc, ctx);
    const TrainResult rb = train(b, env_b, 77);

    REQUIRE(ra.history.size() == rb.history.size());
    for (std::size_t i = 0; i < ra.history.size(); ++i) {
        CHECK(ra.history[i].ret == rb.history[i].ret);
        CHECK(ra.history[i].steps == rb.history[i].steps);
    }
    CHECK(a.buffer().size() <= 64);
}
