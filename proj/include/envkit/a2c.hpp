#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "envkit/batch.hpp"
#include "envkit/env.hpp"
#include "envkit/nn.hpp"
#include "envkit/params.hpp"

namespace envkit::a2c {

struct TrainConfig {
    int total_batch_size = 64; // B parallel environments
    int rollout_len = 10;      // n steps per learner update
    double discount = 0.99;    // gamma
    double gae_lambda = 0.95;
    double learning_rate = 3e-3; // plain SGD step size
    double pg_weight = 1.0;
    double value_weight = 0.5;
    double entropy_weight = 0.01;
    int epochs = 20;
    int learner_steps_per_epoch = 100;
    int eval_episodes = 100;
    bool eval_greedy = true;
    int eval_max_steps = 20000; // safety cap per evaluation episode
    std::uint64_t seed = 0;
    std::vector<int> hidden = {128, 128};
    bool shared_torso = false;
    int num_threads = 1;
};

TrainConfig config_from_params(const Params& params);

// Generalized-advantage recursion A_t = delta_t + gamma*lambda*d_t*A_{t+1},
// delta_t = r_t + gamma*d_t*V_{t+1} - V_t, with V_{n} = bootstrap. All arrays
// are (n, B) row-major except bootstrap (B). targets = advantages + values.
void compute_advantages(std::span<const double> rewards, std::span<const double> discounts,
                        std::span<const double> values, std::span<const double> bootstrap,
                        int num_steps, int batch, double gamma, double lambda,
                        std::span<double> advantages, std::span<double> targets);

struct LossOut {
    double total = 0.0;
    double pg = 0.0;      // mean(-A * log pi(a))
    double value = 0.0;   // mean((V - target)^2)
    double entropy = 0.0; // mean policy entropy over the masked support
};

// Weighted three-term loss over the trajectory samples with advantages and
// value targets treated as constants (the stop-gradient placement of the
// training rule). `head_sizes` splits the logit vector into action heads.
LossOut a2c_loss(const nn::MlpParams& params, const Trajectory& traj,
                 std::span<const double> advantages, std::span<const double> targets,
                 const std::vector<int>& head_sizes, const TrainConfig& cfg);

// Same value, plus exact reverse-mode gradients accumulated into `grads`.
LossOut a2c_loss_and_grads(const nn::MlpParams& params, const Trajectory& traj,
                           std::span<const double> advantages, std::span<const double> targets,
                           const std::vector<int>& head_sizes, const TrainConfig& cfg,
                           nn::MlpParams& grads);

// One rollout + one SGD step on `params`; returns the loss diagnostics.
LossOut update_once(const Environment& env, BatchCore& batch, nn::MlpParams& params,
                    rng::Key step_key, const TrainConfig& cfg);

// Sampling policy backed by the dense net (masked categorical per head,
// cross-head constraints applied sequentially).
BatchPolicy make_net_policy(const BatchCore& batch, const nn::MlpParams* params);

struct EvalResult {
    double mean_return = 0.0;
    double stderr_return = 0.0;
    int episodes = 0;
};

// Runs complete episodes with the net policy (greedy argmax or stochastic)
// or, when params is null, the uniform random baseline.
EvalResult evaluate(const Environment& env, const nn::MlpParams* params, int episodes, rng::Key key,
                    bool greedy, int max_steps = 20000);

// Uniform-over-valid-actions baseline: mean return +/- standard error.
EvalResult random_baseline(const Environment& env, int episodes, rng::Key key);

struct EpochRecord {
    int epoch = 0;
    std::int64_t env_steps = 0; // cumulative learner env steps
    double mean_return = 0.0;
    double stderr_return = 0.0;
    double pg_loss = 0.0;
    double v_loss = 0.0;
    double entropy = 0.0;
};

struct TrainResult {
    std::vector<EpochRecord> curve;
    nn::MlpParams params;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Epoch loop: evaluate, then learner_steps_per_epoch updates of
// (rollout -> advantages -> loss -> SGD). Deterministic in (config, seed).
TrainResult train(const Environment& env, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = nullptr);

std::string curve_csv_header();
std::string curve_csv_row(const EpochRecord& r);

} // namespace envkit::a2c
