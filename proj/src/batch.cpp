#include "envkit/batch.hpp"

#include <chrono>
#include <cstring>

#include "envkit/distrib.hpp"
#include "envkit/errors.hpp"

namespace envkit {
namespace {

// Per-entry first-masked-valid action, honoring cross-head constraints.
// Frozen (done) entries get action 0 per head; they are skipped by the step.
void fill_first_valid_actions(const BatchCore& batch, std::span<const char> masks,
                              std::span<const char> done, std::span<std::int64_t> actions) {
    const auto& heads = batch.head_sizes();
    const int num_heads = static_cast<int>(heads.size());
    const int mask_dim = batch.mask_dim();
    Action prefix;
    std::vector<char> head_mask;
    for (int i = 0; i < batch.size(); ++i) {
        auto row = actions.subspan(static_cast<std::size_t>(i) * num_heads, num_heads);
        if (done[static_cast<std::size_t>(i)]) {
            for (int h = 0; h < num_heads; ++h) {
                row[static_cast<std::size_t>(h)] = 0;
            }
            continue;
        }
        prefix.clear();
        int offset = 0;
        for (int h = 0; h < num_heads; ++h) {
            head_mask.assign(masks.begin() + static_cast<std::ptrdiff_t>(i) * mask_dim + offset,
                             masks.begin() + static_cast<std::ptrdiff_t>(i) * mask_dim + offset +
                                 heads[static_cast<std::size_t>(h)]);
            batch.constrain_head(h, prefix, head_mask);
            std::int64_t pick = -1;
            for (std::size_t k = 0; k < head_mask.size(); ++k) {
                if (head_mask[k]) {
                    pick = static_cast<std::int64_t>(k);
                    break;
                }
            }
            if (pick < 0) {
                throw ContractViolationError("throughput policy: entry " + std::to_string(i) +
                                             " has no valid action");
            }
            prefix.push_back(pick);
            row[static_cast<std::size_t>(h)] = pick;
            offset += heads[static_cast<std::size_t>(h)];
        }
    }
}

} // namespace

Trajectory rollout(BatchCore& batch, rng::Key policy_key, const BatchPolicy& policy, int num_steps,
                   int num_threads) {
    if (num_steps < 0) {
        throw InvalidArgumentError("rollout: num_steps must be >= 0");
    }
    const int B = batch.size();
    const int D = batch.obs_dim();
    const int M = batch.mask_dim();
    const int H = static_cast<int>(batch.head_sizes().size());

    Trajectory traj;
    traj.num_steps = num_steps;
    traj.batch = B;
    traj.obs_dim = D;
    traj.mask_dim = M;
    traj.num_heads = H;
    traj.observations.resize(static_cast<std::size_t>(num_steps + 1) * B * D);
    traj.masks.resize(static_cast<std::size_t>(num_steps) * B * M);
    traj.actions.resize(static_cast<std::size_t>(num_steps) * B * H);
    traj.rewards.resize(static_cast<std::size_t>(num_steps) * B);
    traj.discounts.resize(static_cast<std::size_t>(num_steps) * B);
    traj.step_types.resize(static_cast<std::size_t>(num_steps) * B);

    batch.write_flat_obs(
        std::span<double>(traj.observations.data(), static_cast<std::size_t>(B) * D), num_threads);

    for (int t = 0; t < num_steps; ++t) {
        auto mask_row = std::span<char>(traj.masks.data() + static_cast<std::size_t>(t) * B * M,
                                        static_cast<std::size_t>(B) * M);
        batch.write_masks(mask_row, num_threads);
        auto action_row =
            std::span<std::int64_t>(traj.actions.data() + static_cast<std::size_t>(t) * B * H,
                                    static_cast<std::size_t>(B) * H);
        BatchObsView view{B, D, M,
                          traj.observations.data() + static_cast<std::size_t>(t) * B * D,
                          mask_row.data()};
        policy(view, rng::fold_in(policy_key, static_cast<std::uint64_t>(t)), action_row, mask_row);
        batch.step(action_row, StepMode::auto_reset, num_threads);

        std::memcpy(traj.rewards.data() + static_cast<std::size_t>(t) * B, batch.rewards().data(),
                    sizeof(double) * static_cast<std::size_t>(B));
        std::memcpy(traj.discounts.data() + static_cast<std::size_t>(t) * B, batch.discounts().data(),
                    sizeof(double) * static_cast<std::size_t>(B));
        std::memcpy(traj.step_types.data() + static_cast<std::size_t>(t) * B,
                    batch.step_types().data(), sizeof(std::uint8_t) * static_cast<std::size_t>(B));
        batch.write_flat_obs(
            std::span<double>(traj.observations.data() + static_cast<std::size_t>(t + 1) * B * D,
                              static_cast<std::size_t>(B) * D),
            num_threads);
    }
    return traj;
}

Trajectory rollout(const Environment& env, rng::Key key, const BatchPolicy& policy, int num_steps,
                   int batch_size, int num_threads) {
    auto batch = env.make_batch(batch_size);
    const auto keys = rng::split(key, 2);
    batch->reset_all(keys[0], num_threads);
    return rollout(*batch, keys[1], policy, num_steps, num_threads);
}

BatchPolicy make_random_policy(const BatchCore& batch) {
    const auto heads = batch.head_sizes();
    const BatchCore* b = &batch;
    return [heads, b](const BatchObsView& view, rng::Key key, std::span<std::int64_t> actions,
                      std::span<char> effective_masks) {
        const int H = static_cast<int>(heads.size());
        Action prefix;
        for (int i = 0; i < view.batch; ++i) {
            prefix.clear();
            int offset = 0;
            const rng::Key row_key = rng::fold_in(key, static_cast<std::uint64_t>(i));
            for (int h = 0; h < H; ++h) {
                auto head_mask = effective_masks.subspan(
                    static_cast<std::size_t>(i) * view.mask_dim + offset,
                    static_cast<std::size_t>(heads[static_cast<std::size_t>(h)]));
                b->constrain_head(h, prefix, head_mask);
                const std::vector<double> zeros(head_mask.size(), 0.0);
                const auto sample = masked_categorical_sample(
                    zeros, head_mask, rng::fold_in(row_key, static_cast<std::uint64_t>(h)));
                actions[static_cast<std::size_t>(i) * H + static_cast<std::size_t>(h)] = sample.index;
                prefix.push_back(sample.index);
                offset += heads[static_cast<std::size_t>(h)];
            }
        }
    };
}

ThroughputReport run_throughput_epoch(const Environment& env, rng::Key key, int batch_size,
                                      int steps_per_block, int blocks, int num_threads) {
    if (batch_size < 1 || steps_per_block < 1 || blocks < 1) {
        throw InvalidArgumentError("throughput: batch_size, steps_per_block and blocks must be >= 1");
    }
    auto batch = env.make_batch(batch_size);
    const int H = static_cast<int>(batch->head_sizes().size());
    std::vector<std::int64_t> actions(static_cast<std::size_t>(batch_size) * H);
    std::vector<char> masks(static_cast<std::size_t>(batch_size) * batch->mask_dim());

    const auto run_epoch = [&] {
        for (int b = 0; b < blocks; ++b) {
            for (int s = 0; s < steps_per_block; ++s) {
                batch->write_masks(masks, num_threads);
                fill_first_valid_actions(*batch, masks, batch->done_flags(), actions);
                batch->step(actions, StepMode::freeze_done, num_threads);
            }
        }
    };

    batch->reset_all(key, num_threads);
    run_epoch(); // warmup epoch, untimed

    const auto t0 = std::chrono::steady_clock::now();
    run_epoch();
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();

    ThroughputReport report;
    report.env_id = env.id();
    report.batch_size = batch_size;
    report.epoch_wall_time = secs;
    report.steps_per_second =
        static_cast<double>(steps_per_block) * blocks * batch_size / (secs > 0 ? secs : 1e-12);
    report.warmup_excluded = true;
    return report;
}

std::string throughput_csv_header() {
    return "env_id,batch_size,steps_per_sec,wall_time_s";
}

std::string throughput_csv_row(const ThroughputReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%d,%.6g,%.6g", r.env_id.c_str(), r.batch_size,
                  r.steps_per_second, r.epoch_wall_time);
    return buf;
}

} // namespace envkit
