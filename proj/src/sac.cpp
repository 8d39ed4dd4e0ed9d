#include "vlcsim/sac.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "vlcsim/errors.hpp"

namespace vlcsim {

namespace {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kHalfLog2Pi = 0.91893853320467274178; // 0.5*ln(2*pi)
constexpr double kActionScale = 0.25;                  // rho = 0.25*(tanh(u)+1)
constexpr double kMinSimRho = 1e-9;

std::atomic<std::uint64_t> g_training_updates{0};

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return 0.0;
    return std::log1p(std::exp(x));
}

// log(1 - tanh(u)^2), stable for large |u|
double log_one_minus_tanh_sq(double u) {
    return 2.0 * (std::log(2.0) - u - softplus(-2.0 * u));
}

} // namespace

// ----------------------------------------------------------------- Mlp

Mlp::Mlp(const std::vector<int>& dims) : dims_(dims) {
    int n = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l)
        n += dims_[l] * dims_[l + 1] + dims_[l + 1];
    params_.assign(n, 0.0);
}

void Mlp::init_params(Rng& rng) {
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const int in = dims_[l], out = dims_[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (int i = 0; i < in * out; ++i) params_[off + i] = rng.uniform(-bound, bound);
        off += static_cast<std::size_t>(in) * out;
        for (int i = 0; i < out; ++i) params_[off + i] = 0.0;
        off += out;
    }
}

std::vector<double> Mlp::forward(const std::vector<double>& x,
                                 std::vector<std::vector<double>>* acts) const {
    std::vector<double> cur = x;
    if (acts) {
        acts->clear();
        acts->push_back(cur);
    }
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const int in = dims_[l], out = dims_[l + 1];
        std::vector<double> next(out);
        for (int o = 0; o < out; ++o) {
            double acc = params_[off + static_cast<std::size_t>(in) * out + o]; // bias
            const double* w = &params_[off + static_cast<std::size_t>(o) * in];
            for (int i = 0; i < in; ++i) acc += w[i] * cur[i];
            next[o] = acc;
        }
        const bool last = (l + 2 == dims_.size());
        if (!last)
            for (double& v : next) v = std::tanh(v);
        off += static_cast<std::size_t>(in) * out + out;
        cur = std::move(next);
        if (acts) acts->push_back(cur);
    }
    return cur;
}

std::vector<double> Mlp::backward(const std::vector<std::vector<double>>& acts,
                                  const std::vector<double>& dout,
                                  std::vector<double>& grad) const {
    if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
    const std::size_t layers = dims_.size() - 1;

    // offsets of each layer's weight block
    std::vector<std::size_t> offs(layers);
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        offs[l] = off;
        off += static_cast<std::size_t>(dims_[l]) * dims_[l + 1] + dims_[l + 1];
    }

    std::vector<double> delta = dout;
    for (std::size_t l = layers; l-- > 0;) {
        const int in = dims_[l], out = dims_[l + 1];
        const bool last = (l + 1 == layers);
        // activation derivative (post-activation values are stored)
        if (!last)
            for (int o = 0; o < out; ++o) {
                const double a = acts[l + 1][o];
                delta[o] *= (1.0 - a * a);
            }
        const std::size_t wo = offs[l];
        const std::size_t bo = wo + static_cast<std::size_t>(in) * out;
        for (int o = 0; o < out; ++o) {
            grad[bo + o] += delta[o];
            for (int i = 0; i < in; ++i)
                grad[wo + static_cast<std::size_t>(o) * in + i] += delta[o] * acts[l][i];
        }
        std::vector<double> dprev(in, 0.0);
        for (int i = 0; i < in; ++i) {
            double acc = 0.0;
            for (int o = 0; o < out; ++o)
                acc += params_[wo + static_cast<std::size_t>(o) * in + i] * delta[o];
            dprev[i] = acc;
        }
        delta = std::move(dprev);
    }
    return delta;
}

// ----------------------------------------------------------------- Adam

void Adam::step(std::vector<double>& params, const std::vector<double>& grad,
                double lr, double beta1, double beta2, double eps) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1 * m_[i] + (1.0 - beta1) * grad[i];
        v_[i] = beta2 * v_[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double mh = m_[i] / bc1;
        const double vh = v_[i] / bc2;
        params[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
}

// ----------------------------------------------------------------- buffer

void ReplayBuffer::push(const Transition& t) {
    if (data_.size() < capacity_) {
        data_.push_back(t);
        pos_ = data_.size() % capacity_;
    } else {
        data_[pos_] = t;
        pos_ = (pos_ + 1) % capacity_;
    }
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    if (data_.empty()) throw DomainError("sampling from an empty replay buffer");
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(data_[rng.uniform_index(data_.size())]);
    return out;
}

void ReplayBuffer::restore(std::vector<Transition> data, std::size_t pos) {
    data_ = std::move(data);
    pos_ = pos;
}

// ----------------------------------------------------------------- reward

double compute_reward(const LinkReport& report, double rho, const RewardConfig& cfg) {
    double r = 0.0;
    if (report.jain >= cfg.fairness_target)
        r += cfg.fairness_bonus;
    else {
        const double dev = cfg.fairness_target - report.jain;
        r -= cfg.fairness_penalty_coeff * dev * dev;
    }
    r += cfg.w_sum_rate * (report.sum_rate / cfg.sum_rate_scale);
    if (report.ber1 > cfg.ber_threshold || report.ber2 > cfg.ber_threshold)
        r += cfg.ber_penalty;
    r += cfg.power_bonus_scale * (1.0 - std::abs(rho - cfg.power_center));
    if (rho >= cfg.stability_low && rho <= cfg.stability_high)
        r += cfg.stability_bonus;
    else
        r += cfg.stability_penalty;
    return r;
}

// ----------------------------------------------------------------- agent

SacAgent::SacAgent(const AgentConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg),
      actor_({1, cfg.hidden, cfg.hidden, 2}),
      critic1_({2, cfg.hidden, cfg.hidden, 1}),
      critic2_({2, cfg.hidden, cfg.hidden, 1}),
      buffer_(cfg.buffer_capacity) {
    Rng r1 = Rng::derive(init_seed, {101});
    Rng r2 = Rng::derive(init_seed, {102});
    Rng r3 = Rng::derive(init_seed, {103});
    actor_.init_params(r1);
    critic1_.init_params(r2);
    critic2_.init_params(r3);
    // bias the mean head toward low allocation coefficients (weak user first)
    actor_.params()[actor_.param_count() - 2] = cfg.init_action_bias;
    target1_ = critic1_;
    target2_ = critic2_;
    opt_actor_ = Adam(actor_.param_count());
    opt_critic1_ = Adam(critic1_.param_count());
    opt_critic2_ = Adam(critic2_.param_count());
}

ActorSample SacAgent::policy_sample(double state, double eps) const {
    const std::vector<double> out = actor_.forward({state});
    const double mean = out[0];
    const double log_std = std::clamp(out[1], kLogStdMin, kLogStdMax);
    const double std_dev = std::exp(log_std);
    const double u = mean + std_dev * eps;
    const double th = std::tanh(u);
    const double action = kActionScale * (th + 1.0);
    const double log_gauss = -0.5 * eps * eps - log_std - kHalfLog2Pi;
    const double log_prob =
        log_gauss - std::log(kActionScale) - log_one_minus_tanh_sq(u);
    return {action, log_prob, u, mean, log_std};
}

double SacAgent::act(double state, bool deterministic, Rng& rng) const {
    const double eps = deterministic ? 0.0 : rng.normal();
    return policy_sample(state, eps).action;
}

double SacAgent::log_prob_density(double state, double action) const {
    const std::vector<double> out = actor_.forward({state});
    const double mean = out[0];
    const double log_std = std::clamp(out[1], kLogStdMin, kLogStdMax);
    const double std_dev = std::exp(log_std);
    double z = action / kActionScale - 1.0;
    z = std::clamp(z, -1.0 + 1e-15, 1.0 - 1e-15);
    const double u = std::atanh(z);
    const double eps = (u - mean) / std_dev;
    const double log_gauss = -0.5 * eps * eps - log_std - kHalfLog2Pi;
    return log_gauss - std::log(kActionScale) - log_one_minus_tanh_sq(u);
}

double SacAgent::critic_value(const Mlp& net, double s, double a) const {
    return net.forward({s, a})[0];
}

std::vector<double> SacAgent::compute_targets(const std::vector<Transition>& batch,
                                              const std::vector<double>& next_eps) const {
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        if (t.done) {
            y[i] = t.reward;
            continue;
        }
        const ActorSample s = policy_sample(t.next_state, next_eps[i]);
        const double q1 = critic_value(target1_, t.next_state, s.action);
        const double q2 = critic_value(target2_, t.next_state, s.action);
        y[i] = t.reward + cfg_.gamma * (std::min(q1, q2) - cfg_.alpha * s.log_prob);
    }
    return y;
}

std::vector<double> SacAgent::critic_gradient(int which, const std::vector<Transition>& batch,
                                              const std::vector<double>& targets) const {
    const Mlp& net = which == 0 ? critic1_ : critic2_;
    std::vector<double> grad(net.param_count(), 0.0);
    const double scale = 1.0 / static_cast<double>(batch.size());
    std::vector<std::vector<double>> acts;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double q = net.forward({batch[i].state, batch[i].action}, &acts)[0];
        const std::vector<double> dout{2.0 * (q - targets[i]) * scale};
        net.backward(acts, dout, grad);
    }
    return grad;
}

std::pair<double, double> SacAgent::critic_update(const std::vector<Transition>& batch,
                                                  const std::vector<double>& targets) {
    if (buffer_.size() == 0 && batch.empty())
        throw DomainError("critic update without transitions");
    double losses[2];
    for (int which = 0; which < 2; ++which) {
        Mlp& net = which == 0 ? critic1_ : critic2_;
        double loss = 0.0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const double q = critic_value(net, batch[i].state, batch[i].action);
            loss += (q - targets[i]) * (q - targets[i]);
        }
        losses[which] = loss / static_cast<double>(batch.size());
        const std::vector<double> grad = critic_gradient(which, batch, targets);
        (which == 0 ? opt_critic1_ : opt_critic2_).step(net.params(), grad, cfg_.lr);
    }
    g_training_updates.fetch_add(1, std::memory_order_relaxed);
    ++total_updates;
    return {losses[0], losses[1]};
}

std::vector<double> SacAgent::actor_gradient(const std::vector<Transition>& batch,
                                             const std::vector<double>& eps) const {
    std::vector<double> grad(actor_.param_count(), 0.0);
    const double scale = 1.0 / static_cast<double>(batch.size());
    std::vector<std::vector<double>> acts, cacts;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double s = batch[i].state;
        const std::vector<double> out = actor_.forward({s}, &acts);
        const double mean = out[0];
        const double log_std_raw = out[1];
        const double log_std = std::clamp(log_std_raw, kLogStdMin, kLogStdMax);
        const double std_dev = std::exp(log_std);
        const double u = mean + std_dev * eps[i];
        const double th = std::tanh(u);
        const double sech2 = 1.0 - th * th;
        const double action = kActionScale * (th + 1.0);

        // pick the smaller critic; gradient flows through it only
        const double q1 = critic_value(critic1_, s, action);
        const double q2 = critic_value(critic2_, s, action);
        const Mlp& qnet = q1 <= q2 ? critic1_ : critic2_;
        const std::vector<double> qout = qnet.forward({s, action}, &cacts);
        (void)qout;
        std::vector<double> qgrad(qnet.param_count(), 0.0);
        const std::vector<double> dq_din = qnet.backward(cacts, {1.0}, qgrad);
        const double dq_da = dq_din[1];

        // d(action)/d(mean), d(action)/d(log_std_raw)
        const double da_dmean = kActionScale * sech2;
        const double da_dlogstd = kActionScale * sech2 * std_dev * eps[i];
        // d(log pi)/d(mean), d(log pi)/d(log_std_raw); log pi depends on u
        // through the squash correction only (the Gaussian part is -eps^2/2).
        const double dlp_du = 2.0 * th;
        const double dlp_dmean = dlp_du;
        const double dlp_dlogstd = -1.0 + dlp_du * std_dev * eps[i];

        // loss = -(minQ - alpha*logpi)
        double dmean = -(dq_da * da_dmean - cfg_.alpha * dlp_dmean) * scale;
        double dlogstd = -(dq_da * da_dlogstd - cfg_.alpha * dlp_dlogstd) * scale;
        if (log_std_raw < kLogStdMin || log_std_raw > kLogStdMax) dlogstd = 0.0;

        actor_.backward(acts, {dmean, dlogstd}, grad);
    }
    return grad;
}

double SacAgent::actor_update(const std::vector<Transition>& batch,
                              const std::vector<double>& eps) {
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const ActorSample s = policy_sample(batch[i].state, eps[i]);
        const double q = std::min(critic_value(critic1_, batch[i].state, s.action),
                                  critic_value(critic2_, batch[i].state, s.action));
        loss += -(q - cfg_.alpha * s.log_prob);
    }
    loss /= static_cast<double>(batch.size());
    const std::vector<double> grad = actor_gradient(batch, eps);
    opt_actor_.step(actor_.params(), grad, cfg_.lr);
    g_training_updates.fetch_add(1, std::memory_order_relaxed);
    ++total_updates;
    return loss;
}

void SacAgent::soft_update(double tau) {
    for (int which = 0; which < 2; ++which) {
        Mlp& tgt = which == 0 ? target1_ : target2_;
        const Mlp& src = which == 0 ? critic1_ : critic2_;
        if (tgt.param_count() != src.param_count())
            throw FormatError("target/critic parameter shape mismatch");
        auto& tp = tgt.params();
        const auto& sp = src.params();
        for (std::size_t i = 0; i < tp.size(); ++i)
            tp[i] = tau * sp[i] + (1.0 - tau) * tp[i];
    }
}

double SacAgent::critic_loss_at(const std::vector<double>& params, int which,
                                const std::vector<Transition>& batch,
                                const std::vector<double>& targets) const {
    Mlp net = which == 0 ? critic1_ : critic2_;
    net.params() = params;
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double q = net.forward({batch[i].state, batch[i].action})[0];
        loss += (q - targets[i]) * (q - targets[i]);
    }
    return loss / static_cast<double>(batch.size());
}

double SacAgent::actor_loss_at(const std::vector<double>& params,
                               const std::vector<Transition>& batch,
                               const std::vector<double>& eps) const {
    Mlp net = actor_;
    net.params() = params;
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double s = batch[i].state;
        const std::vector<double> out = net.forward({s});
        const double mean = out[0];
        const double log_std = std::clamp(out[1], kLogStdMin, kLogStdMax);
        const double std_dev = std::exp(log_std);
        const double u = mean + std_dev * eps[i];
        const double action = kActionScale * (std::tanh(u) + 1.0);
        const double log_prob = -0.5 * eps[i] * eps[i] - log_std - kHalfLog2Pi -
                                std::log(kActionScale) - log_one_minus_tanh_sq(u);
        const double q = std::min(critic_value(critic1_, s, action),
                                  critic_value(critic2_, s, action));
        loss += -(q - cfg_.alpha * log_prob);
    }
    return loss / static_cast<double>(batch.size());
}

// ----------------------------------------------------------------- save/load

namespace {

constexpr char kMagic[8] = {'V', 'L', 'C', 'S', 'A', 'C', '0', '1'};

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("checkpoint truncated");
    return v;
}

void put_vec(std::ofstream& out, const std::vector<double>& v) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_vec(std::ifstream& in) {
    const auto n = get<std::uint64_t>(in);
    if (n > (1ULL << 32)) throw FormatError("checkpoint vector too large");
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw FormatError("checkpoint truncated");
    return v;
}

void put_adam(std::ofstream& out, Adam& a) {
    put<std::uint64_t>(out, a.t());
    put_vec(out, a.m());
    put_vec(out, a.v());
}

void get_adam(std::ifstream& in, Adam& a) {
    a.set_t(get<std::uint64_t>(in));
    a.m() = get_vec(in);
    a.v() = get_vec(in);
}

} // namespace

void SacAgent::save(const std::string& path, bool include_buffer) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out.write(kMagic, 8);
    put<std::uint32_t>(out, 1u); // format version
    put<std::int32_t>(out, cfg_.hidden);
    put(out, cfg_.gamma);
    put(out, cfg_.alpha);
    put(out, cfg_.tau);
    put(out, cfg_.lr);
    put<std::uint64_t>(out, cfg_.buffer_capacity);
    put<std::uint64_t>(out, cfg_.batch_size);
    put<std::int32_t>(out, cfg_.max_episodes);
    put<std::int32_t>(out, cfg_.score_window);
    put(out, cfg_.stop_value);
    put<std::int32_t>(out, cfg_.warmup_steps);
    put<std::int32_t>(out, cfg_.updates_per_step);
    put(out, cfg_.init_action_bias);
    put_vec(out, actor_.params());
    put_vec(out, critic1_.params());
    put_vec(out, critic2_.params());
    put_vec(out, target1_.params());
    put_vec(out, target2_.params());
    Adam oa = opt_actor_, oc1 = opt_critic1_, oc2 = opt_critic2_;
    put_adam(out, oa);
    put_adam(out, oc1);
    put_adam(out, oc2);
    put<std::uint64_t>(out, total_env_steps);
    put<std::uint64_t>(out, total_updates);
    put<std::int32_t>(out, episodes_done);
    put<std::uint8_t>(out, include_buffer ? 1 : 0);
    if (include_buffer) {
        put<std::uint64_t>(out, buffer_.size());
        put<std::uint64_t>(out, buffer_.write_pos());
        for (std::size_t i = 0; i < buffer_.size(); ++i) {
            const Transition& t = buffer_[i];
            put(out, t.state);
            put(out, t.action);
            put(out, t.reward);
            put(out, t.next_state);
            put<std::uint8_t>(out, t.done ? 1 : 0);
        }
    }
    if (!out) throw IoError("write failure on checkpoint: " + path);
}

SacAgent SacAgent::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw FormatError("not a checkpoint file (bad magic): " + path);
    const auto version = get<std::uint32_t>(in);
    if (version != 1u)
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    AgentConfig cfg;
    cfg.hidden = get<std::int32_t>(in);
    cfg.gamma = get<double>(in);
    cfg.alpha = get<double>(in);
    cfg.tau = get<double>(in);
    cfg.lr = get<double>(in);
    cfg.buffer_capacity = get<std::uint64_t>(in);
    cfg.batch_size = get<std::uint64_t>(in);
    cfg.max_episodes = get<std::int32_t>(in);
    cfg.score_window = get<std::int32_t>(in);
    cfg.stop_value = get<double>(in);
    cfg.warmup_steps = get<std::int32_t>(in);
    cfg.updates_per_step = get<std::int32_t>(in);
    cfg.init_action_bias = get<double>(in);

    SacAgent agent(cfg, /*init_seed=*/0);
    agent.actor_.params() = get_vec(in);
    agent.critic1_.params() = get_vec(in);
    agent.critic2_.params() = get_vec(in);
    agent.target1_.params() = get_vec(in);
    agent.target2_.params() = get_vec(in);
    if (agent.actor_.params().size() != static_cast<std::size_t>(agent.actor_.param_count()))
        throw FormatError("checkpoint actor parameter count mismatch");
    get_adam(in, agent.opt_actor_);
    get_adam(in, agent.opt_critic1_);
    get_adam(in, agent.opt_critic2_);
    agent.total_env_steps = get<std::uint64_t>(in);
    agent.total_updates = get<std::uint64_t>(in);
    agent.episodes_done = get<std::int32_t>(in);
    const auto has_buffer = get<std::uint8_t>(in);
    if (has_buffer) {
        const auto n = get<std::uint64_t>(in);
        const auto pos = get<std::uint64_t>(in);
        std::vector<Transition> data;
        data.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            Transition t;
            t.state = get<double>(in);
            t.action = get<double>(in);
            t.reward = get<double>(in);
            t.next_state = get<double>(in);
            t.done = get<std::uint8_t>(in) != 0;
            data.push_back(t);
        }
        agent.buffer_.restore(std::move(data), pos);
    }
    return agent;
}

// ----------------------------------------------------------------- env

NomaEnv::NomaEnv(const EnvConfig& env_cfg, const RewardConfig& reward_cfg,
                 const LinkContext& ctx)
    : env_cfg_(env_cfg), reward_cfg_(reward_cfg), ctx_(&ctx) {}

double NomaEnv::reset(Rng& rng) {
    const double r = 1.0 - rng.uniform01(); // (0, 1]
    pair_ = sample_channel_pair(r, rng, env_cfg_.gain_lower, env_cfg_.gain_upper);
    state_ = pair_.r;
    step_count_ = 0;
    return state_;
}

NomaEnv::StepResult NomaEnv::step(double action, Rng& rng) {
    if (action < 0.0 || action > 0.5)
        throw DomainError("action outside [0, 0.5]: " + std::to_string(action));
    const double rho = std::max(action, kMinSimRho);
    LinkReport rep = evaluate_link(pair_, rho, *ctx_,
                                   ctx_->config().mc_symbols_train, rng);
    double reward = compute_reward(rep, action, reward_cfg_);
    ++step_count_;
    bool done = false;
    if (rep.jain >= env_cfg_.fairness_target) {
        done = true;
        reward += env_cfg_.success_bonus;
    } else if (step_count_ >= env_cfg_.max_steps_per_episode) {
        done = true;
        reward += env_cfg_.failure_penalty;
    }
    return {state_, reward, done, rep.jain, rep};
}

std::uint64_t training_update_count() {
    return g_training_updates.load(std::memory_order_relaxed);
}

// ----------------------------------------------------------------- training

TrainResult train(SacAgent& agent, NomaEnv& env, std::uint64_t seed) {
    const AgentConfig& cfg = agent.config();
    TrainResult result;
    std::vector<double> returns;

    for (int episode = 0; episode < cfg.max_episodes; ++episode) {
        Rng ep_rng = Rng::derive(seed, {1, static_cast<std::uint64_t>(episode)});
        double state = env.reset(ep_rng);
        double ep_return = 0.0;
        double terminal_jain = 0.0;
        int steps = 0;
        bool done = false;
        while (!done) {
            const std::uint64_t e = static_cast<std::uint64_t>(episode);
            const std::uint64_t t = static_cast<std::uint64_t>(steps);
            Rng act_rng = Rng::derive(seed, {2, e, t});
            double action;
            if (agent.total_env_steps < static_cast<std::uint64_t>(cfg.warmup_steps))
                action = act_rng.uniform(0.0, 0.5);
            else
                action = agent.act(state, /*deterministic=*/false, act_rng);

            Rng step_rng = Rng::derive(seed, {3, e, t});
            NomaEnv::StepResult sr = env.step(action, step_rng);
            agent.buffer().push({state, action, sr.reward, sr.next_state, sr.done});
            ++agent.total_env_steps;
            ep_return += sr.reward;
            terminal_jain = sr.jain;
            done = sr.done;
            state = sr.next_state;
            ++steps;

            if (agent.total_env_steps >= static_cast<std::uint64_t>(cfg.warmup_steps) &&
                agent.buffer().size() >= cfg.batch_size) {
                for (int u = 0; u < cfg.updates_per_step; ++u) {
                    const std::uint64_t uc = agent.total_updates;
                    Rng batch_rng = Rng::derive(seed, {4, uc});
                    const auto batch = agent.buffer().sample(cfg.batch_size, batch_rng);
                    Rng eps_rng = Rng::derive(seed, {5, uc});
                    std::vector<double> next_eps(batch.size());
                    for (double& v : next_eps) v = eps_rng.normal();
                    const auto targets = agent.compute_targets(batch, next_eps);
                    agent.critic_update(batch, targets);
                    Rng aeps_rng = Rng::derive(seed, {6, uc});
                    std::vector<double> aeps(batch.size());
                    for (double& v : aeps) v = aeps_rng.normal();
                    agent.actor_update(batch, aeps);
                    agent.soft_update(cfg.tau);
                }
            }
        }
        ++agent.episodes_done;
        returns.push_back(ep_return);
        const std::size_t w = std::min<std::size_t>(returns.size(), cfg.score_window);
        double avg = 0.0;
        for (std::size_t i = returns.size() - w; i < returns.size(); ++i) avg += returns[i];
        avg /= static_cast<double>(w);
        result.history.push_back({episode + 1, ep_return, steps, terminal_jain, avg});

        if (returns.size() >= static_cast<std::size_t>(cfg.score_window) &&
            avg >= cfg.stop_value) {
            result.stop_episode = episode + 1;
            break;
        }
    }
    return result;
}

} // namespace vlcsim
