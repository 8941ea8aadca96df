#include "envkit/a2c.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "envkit/distrib.hpp"
#include "envkit/errors.hpp"

namespace envkit::a2c {
namespace {

std::vector<int> parse_hidden(const std::string& text) {
    std::vector<int> hidden;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            hidden.push_back(std::stoi(item));
        }
    }
    if (hidden.empty()) {
        throw InvalidArgumentError("config: hidden_sizes must name at least one layer");
    }
    return hidden;
}

} // namespace

TrainConfig config_from_params(const Params& params) {
    TrainConfig cfg;
    cfg.total_batch_size = static_cast<int>(params.get_int("batch_size", cfg.total_batch_size));
    cfg.rollout_len = static_cast<int>(params.get_int("rollout_len", cfg.rollout_len));
    cfg.discount = params.get_double("discount", cfg.discount);
    cfg.gae_lambda = params.get_double("gae_lambda", cfg.gae_lambda);
    cfg.learning_rate = params.get_double("learning_rate", cfg.learning_rate);
    cfg.pg_weight = params.get_double("pg_weight", cfg.pg_weight);
    cfg.value_weight = params.get_double("value_weight", cfg.value_weight);
    cfg.entropy_weight = params.get_double("entropy_weight", cfg.entropy_weight);
    cfg.epochs = static_cast<int>(params.get_int("epochs", cfg.epochs));
    cfg.learner_steps_per_epoch =
        static_cast<int>(params.get_int("learner_steps_per_epoch", cfg.learner_steps_per_epoch));
    cfg.eval_episodes = static_cast<int>(params.get_int("eval_episodes", cfg.eval_episodes));
    cfg.eval_greedy = params.get_int("eval_greedy", cfg.eval_greedy ? 1 : 0) != 0;
    cfg.eval_max_steps = static_cast<int>(params.get_int("eval_max_steps", cfg.eval_max_steps));
    cfg.seed = static_cast<std::uint64_t>(params.get_int("seed", 0));
    cfg.hidden = parse_hidden(params.get_string("hidden_sizes", "128,128"));
    cfg.shared_torso = params.get_int("shared_torso", 0) != 0;
    cfg.num_threads = static_cast<int>(params.get_int("threads", 1));
    if (cfg.total_batch_size < 1 || cfg.rollout_len < 1 || cfg.epochs < 0 ||
        cfg.learner_steps_per_epoch < 0) {
        throw InvalidArgumentError("config: sizes must be positive");
    }
    if (cfg.discount < 0 || cfg.discount > 1 || cfg.gae_lambda < 0 || cfg.gae_lambda > 1) {
        throw InvalidArgumentError("config: discount and gae_lambda must lie in [0,1]");
    }
    if (!(cfg.learning_rate > 0) || cfg.pg_weight < 0 || cfg.value_weight < 0 ||
        cfg.entropy_weight < 0) {
        throw InvalidArgumentError("config: learning_rate > 0 and loss weights >= 0 required");
    }
    return cfg;
}

void compute_advantages(std::span<const double> rewards, std::span<const double> discounts,
                        std::span<const double> values, std::span<const double> bootstrap,
                        int num_steps, int batch, double gamma, double lambda,
                        std::span<double> advantages, std::span<double> targets) {
    const std::size_t total = static_cast<std::size_t>(num_steps) * batch;
    if (rewards.size() != total || discounts.size() != total || values.size() != total ||
        bootstrap.size() != static_cast<std::size_t>(batch) || advantages.size() != total ||
        targets.size() != total) {
        throw InvalidArgumentError("compute_advantages: shape mismatch");
    }
    for (int b = 0; b < batch; ++b) {
        double next_adv = 0.0;
        double next_value = bootstrap[static_cast<std::size_t>(b)];
        for (int t = num_steps - 1; t >= 0; --t) {
            const std::size_t k = static_cast<std::size_t>(t) * batch + static_cast<std::size_t>(b);
            const double d = discounts[k];
            const double delta = rewards[k] + gamma * d * next_value - values[k];
            const double adv = delta + gamma * lambda * d * next_adv;
            advantages[k] = adv;
            targets[k] = adv + values[k];
            next_adv = adv;
            next_value = values[k];
        }
    }
}

namespace {

struct LossAccum {
    LossOut out;
    std::vector<double> d_logits; // zero when not accumulating grads
    std::vector<double> d_values;
    bool want_grads = false;
};

// Shared forward walk over the n*B samples: loss terms plus, when asked,
// d(loss)/d(logits) and d(loss)/d(values).
LossOut loss_core(const nn::MlpParams& params, const Trajectory& traj,
                  std::span<const double> advantages, std::span<const double> targets,
                  const std::vector<int>& head_sizes, const TrainConfig& cfg, bool want_grads,
                  nn::MlpParams* grads) {
    const int n = traj.num_steps;
    const int B = traj.batch;
    const int count = n * B;
    if (count == 0) {
        return LossOut{};
    }
    const int A = traj.mask_dim;
    const int H = traj.num_heads;

    nn::MlpTrace trace;
    std::vector<double> logits;
    std::vector<double> values;
    // Forward over the n*B sampled observations only; the bootstrap row
    // enters through the frozen targets.
    nn::mlp_forward(params, traj.observations.data(), count, trace, logits, values);
    if (static_cast<int>(logits.size()) != count * A) {
        throw InvalidArgumentError("a2c_loss: net logits do not match the action mask layout");
    }

    std::vector<double> d_logits(want_grads ? logits.size() : 0, 0.0);
    std::vector<double> d_values(want_grads ? values.size() : 0, 0.0);
    std::vector<double> probs(static_cast<std::size_t>(A));

    double pg_sum = 0.0, v_sum = 0.0, ent_sum = 0.0;
    const double inv_count = 1.0 / count;
    for (int k = 0; k < count; ++k) {
        const double adv = advantages[static_cast<std::size_t>(k)];
        const double* logit_row = logits.data() + static_cast<std::size_t>(k) * A;
        const char* mask_row = traj.masks.data() + static_cast<std::size_t>(k) * A;
        const std::int64_t* action_row = traj.actions.data() + static_cast<std::size_t>(k) * H;
        double log_pi = 0.0;
        double entropy = 0.0;
        int offset = 0;
        for (int h = 0; h < H; ++h) {
            const int width = head_sizes[static_cast<std::size_t>(h)];
            std::span<const double> head_logits(logit_row + offset, static_cast<std::size_t>(width));
            std::span<const char> head_mask(mask_row + offset, static_cast<std::size_t>(width));
            std::span<double> head_probs(probs.data(), static_cast<std::size_t>(width));
            masked_softmax(head_logits, head_mask, head_probs);
            const std::int64_t act = action_row[h];
            if (act < 0 || act >= width || !head_mask[static_cast<std::size_t>(act)]) {
                throw InvalidArgumentError("a2c_loss: action outside its recorded mask");
            }
            const double p_act = head_probs[static_cast<std::size_t>(act)];
            const double lp = std::log(p_act);
            log_pi += lp;
            double h_ent = 0.0;
            for (int j = 0; j < width; ++j) {
                if (head_mask[static_cast<std::size_t>(j)] && head_probs[static_cast<std::size_t>(j)] > 0) {
                    h_ent -= head_probs[static_cast<std::size_t>(j)] *
                             std::log(head_probs[static_cast<std::size_t>(j)]);
                }
            }
            entropy += h_ent;
            if (want_grads) {
                double* d_row = d_logits.data() + static_cast<std::size_t>(k) * A + offset;
                for (int j = 0; j < width; ++j) {
                    if (!head_mask[static_cast<std::size_t>(j)]) {
                        continue;
                    }
                    const double pj = head_probs[static_cast<std::size_t>(j)];
                    const double onehot = j == act ? 1.0 : 0.0;
                    // policy-gradient term: -A * d(log pi)/dz
                    double g = cfg.pg_weight * (-adv) * (onehot - pj);
                    // entropy bonus term: c_ent * d(-H)/dz
                    if (pj > 0) {
                        g += cfg.entropy_weight * pj * (std::log(pj) + h_ent);
                    }
                    d_row[j] += g * inv_count;
                }
            }
            offset += width;
        }
        pg_sum += -adv * log_pi;
        ent_sum += entropy;
        const double v_err = values[static_cast<std::size_t>(k)] - targets[static_cast<std::size_t>(k)];
        v_sum += v_err * v_err;
        if (want_grads) {
            d_values[static_cast<std::size_t>(k)] = cfg.value_weight * 2.0 * v_err * inv_count;
        }
    }

    LossOut out;
    out.pg = pg_sum * inv_count;
    out.value = v_sum * inv_count;
    out.entropy = ent_sum * inv_count;
    out.total = cfg.pg_weight * out.pg + cfg.value_weight * out.value +
                cfg.entropy_weight * (-out.entropy);
    if (want_grads) {
        nn::mlp_backward(params, trace, d_logits.data(), d_values.data(), count, *grads);
    }
    return out;
}

} // namespace

LossOut a2c_loss(const nn::MlpParams& params, const Trajectory& traj,
                 std::span<const double> advantages, std::span<const double> targets,
                 const std::vector<int>& head_sizes, const TrainConfig& cfg) {
    return loss_core(params, traj, advantages, targets, head_sizes, cfg, false, nullptr);
}

LossOut a2c_loss_and_grads(const nn::MlpParams& params, const Trajectory& traj,
                           std::span<const double> advantages, std::span<const double> targets,
                           const std::vector<int>& head_sizes, const TrainConfig& cfg,
                           nn::MlpParams& grads) {
    return loss_core(params, traj, advantages, targets, head_sizes, cfg, true, &grads);
}

BatchPolicy make_net_policy(const BatchCore& batch, const nn::MlpParams* params) {
    const auto heads = batch.head_sizes();
    const BatchCore* b = &batch;
    return [heads, params, b](const BatchObsView& view, rng::Key key,
                              std::span<std::int64_t> actions, std::span<char> effective_masks) {
        const int H = static_cast<int>(heads.size());
        nn::MlpTrace trace;
        std::vector<double> logits;
        std::vector<double> values;
        nn::mlp_forward(*params, view.obs, view.batch, trace, logits, values);
        Action prefix;
        for (int i = 0; i < view.batch; ++i) {
            prefix.clear();
            int offset = 0;
            const rng::Key row_key = rng::fold_in(key, static_cast<std::uint64_t>(i));
            for (int h = 0; h < H; ++h) {
                const int width = heads[static_cast<std::size_t>(h)];
                auto head_mask = effective_masks.subspan(
                    static_cast<std::size_t>(i) * view.mask_dim + offset,
                    static_cast<std::size_t>(width));
                b->constrain_head(h, prefix, head_mask);
                std::span<const double> head_logits(
                    logits.data() + static_cast<std::size_t>(i) * view.mask_dim + offset,
                    static_cast<std::size_t>(width));
                const auto sample = masked_categorical_sample(
                    head_logits, head_mask, rng::fold_in(row_key, static_cast<std::uint64_t>(h)));
                actions[static_cast<std::size_t>(i) * H + static_cast<std::size_t>(h)] = sample.index;
                prefix.push_back(sample.index);
                offset += width;
            }
        }
    };
}

LossOut update_once(const Environment& env, BatchCore& batch, nn::MlpParams& params,
                    rng::Key step_key, const TrainConfig& cfg) {
    (void)env;
    const auto policy = make_net_policy(batch, &params);
    Trajectory traj = rollout(batch, step_key, policy, cfg.rollout_len, cfg.num_threads);

    // Values over the n+1 observation rows; the last row bootstraps.
    const int count = (traj.num_steps + 1) * traj.batch;
    nn::MlpTrace trace;
    std::vector<double> logits;
    std::vector<double> values;
    nn::mlp_forward(params, traj.observations.data(), count, trace, logits, values);
    const std::size_t nb = static_cast<std::size_t>(traj.num_steps) * traj.batch;
    std::vector<double> step_values(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(nb));
    std::vector<double> bootstrap(values.begin() + static_cast<std::ptrdiff_t>(nb), values.end());
    std::vector<double> advantages(nb);
    std::vector<double> targets(nb);
    compute_advantages(traj.rewards, traj.discounts, step_values, bootstrap, traj.num_steps,
                       traj.batch, cfg.discount, cfg.gae_lambda, advantages, targets);

    nn::MlpParams grads = nn::zeros_like(params);
    const LossOut out =
        a2c_loss_and_grads(params, traj, advantages, targets, batch.head_sizes(), cfg, grads);
    nn::sgd_step(params, grads, cfg.learning_rate);
    return out;
}

EvalResult evaluate(const Environment& env, const nn::MlpParams* params, int episodes, rng::Key key,
                    bool greedy, int max_steps) {
    const auto heads = env.action_head_sizes();
    const int H = static_cast<int>(heads.size());
    std::vector<double> returns;
    returns.reserve(static_cast<std::size_t>(episodes));
    std::vector<double> obs(static_cast<std::size_t>(env.flat_obs_dim()));
    nn::MlpTrace trace;
    std::vector<double> logits;
    std::vector<double> values;

    for (int e = 0; e < episodes; ++e) {
        const rng::Key ep_key = rng::fold_in(key, static_cast<std::uint64_t>(e));
        auto [state, ts] = env.reset(ep_key);
        double ret = 0.0;
        for (int t = 0; t < max_steps && !ts.last(); ++t) {
            Action action;
            const auto base_mask = env.action_mask(*state);
            if (params != nullptr) {
                env.flat_obs_into(*state, obs);
                nn::mlp_forward(*params, obs.data(), 1, trace, logits, values);
            }
            int offset = 0;
            for (int h = 0; h < H; ++h) {
                const int width = heads[static_cast<std::size_t>(h)];
                std::vector<char> head_mask(base_mask.begin() + offset,
                                            base_mask.begin() + offset + width);
                env.constrain_head(h, action, head_mask);
                std::vector<double> head_logits(static_cast<std::size_t>(width), 0.0);
                if (params != nullptr) {
                    std::copy(logits.begin() + offset, logits.begin() + offset + width,
                              head_logits.begin());
                }
                std::int64_t act;
                if (greedy && params != nullptr) {
                    act = masked_argmax(head_logits, head_mask);
                } else {
                    const rng::Key k =
                        rng::fold_in(rng::fold_in(ep_key, 1000003 + static_cast<std::uint64_t>(t)),
                                     static_cast<std::uint64_t>(h));
                    act = masked_categorical_sample(head_logits, head_mask, k).index;
                }
                action.push_back(act);
                offset += width;
            }
            auto [next, ts2] = env.step(*state, action);
            state = std::move(next);
            ts = std::move(ts2);
            ret += ts.reward;
        }
        returns.push_back(ret);
    }

    EvalResult out;
    out.episodes = episodes;
    if (episodes == 0) {
        return out;
    }
    double sum = 0.0;
    for (double r : returns) {
        sum += r;
    }
    out.mean_return = sum / episodes;
    double sq = 0.0;
    for (double r : returns) {
        sq += (r - out.mean_return) * (r - out.mean_return);
    }
    out.stderr_return = episodes > 1 ? std::sqrt(sq / (episodes - 1) / episodes) : 0.0;
    return out;
}

EvalResult random_baseline(const Environment& env, int episodes, rng::Key key) {
    return evaluate(env, nullptr, episodes, key, false);
}

TrainResult train(const Environment& env, const TrainConfig& cfg, const EpochCallback& on_epoch) {
    const auto run_keys = rng::split(rng::key_from_seed(cfg.seed), 4);
    // run_keys: 0 = net init, 1 = batch reset, 2 = rollout policy, 3 = eval.
    int num_logits = 0;
    for (int h : env.action_head_sizes()) {
        num_logits += h;
    }
    TrainResult result;
    result.params =
        nn::make_mlp(env.flat_obs_dim(), cfg.hidden, num_logits, cfg.shared_torso, run_keys[0]);

    auto batch = env.make_batch(cfg.total_batch_size);
    batch->reset_all(run_keys[1], cfg.num_threads);

    std::int64_t env_steps = 0;
    std::int64_t update_counter = 0;
    for (int epoch = 0; epoch <= cfg.epochs; ++epoch) {
        const EvalResult eval =
            evaluate(env, &result.params, cfg.eval_episodes,
                     rng::fold_in(run_keys[3], static_cast<std::uint64_t>(epoch)), cfg.eval_greedy,
                     cfg.eval_max_steps);
        EpochRecord rec;
        rec.epoch = epoch;
        rec.env_steps = env_steps;
        rec.mean_return = eval.mean_return;
        rec.stderr_return = eval.stderr_return;

        if (epoch < cfg.epochs) {
            double pg = 0, v = 0, ent = 0;
            for (int s = 0; s < cfg.learner_steps_per_epoch; ++s) {
                const LossOut out = update_once(
                    env, *batch, result.params,
                    rng::fold_in(run_keys[2], static_cast<std::uint64_t>(update_counter++)), cfg);
                pg += out.pg;
                v += out.value;
                ent += out.entropy;
            }
            if (cfg.learner_steps_per_epoch > 0) {
                rec.pg_loss = pg / cfg.learner_steps_per_epoch;
                rec.v_loss = v / cfg.learner_steps_per_epoch;
                rec.entropy = ent / cfg.learner_steps_per_epoch;
                env_steps += static_cast<std::int64_t>(cfg.learner_steps_per_epoch) *
                             cfg.rollout_len * cfg.total_batch_size;
            }
        }
        result.curve.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }
    }
    return result;
}

std::string curve_csv_header() {
    return "epoch,env_steps,mean_return,stderr,pg_loss,v_loss,entropy";
}

std::string curve_csv_row(const EpochRecord& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%lld,%.10g,%.10g,%.10g,%.10g,%.10g", r.epoch,
                  static_cast<long long>(r.env_steps), r.mean_return, r.stderr_return, r.pg_loss,
                  r.v_loss, r.entropy);
    return buf;
}

} // namespace envkit::a2c
