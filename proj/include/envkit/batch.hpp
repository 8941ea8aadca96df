#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/rng.hpp"
#include "envkit/timestep.hpp"

namespace envkit {

enum class StepMode {
    plain,       // step every entry; terminal entries raise ContractViolationError
    auto_reset,  // per-entry reset of entries that reach LAST (reset called only for them)
    freeze_done, // throughput mode: terminal entries are skipped and stay frozen
};

// Structure-of-arrays batch of B environment states stepped data-parallel.
// Every per-field array has leading dimension B. Stepping is bitwise
// invariant to the worker-thread count: entries are pure and independent and
// the reset pass is a serial loop over terminated entries.
class BatchCore {
  public:
    virtual ~BatchCore() = default;

    virtual int size() const = 0;
    virtual const std::string& env_id() const = 0;
    virtual int obs_dim() const = 0;
    virtual int mask_dim() const = 0;
    virtual const std::vector<int>& head_sizes() const = 0;
    virtual void constrain_head(int head, const Action& prefix, std::span<char> head_mask) const = 0;

    // states[i] = reset(split(key, B)[i]); clears done flags and counters.
    virtual void reset_all(rng::Key key, int num_threads) = 0;

    // Steps all entries with `actions` (row-major B x num_heads).
    // num_threads: 0 = serial reference path, >= 1 = OpenMP workers.
    virtual void step(std::span<const std::int64_t> actions, StepMode mode, int num_threads) = 0;

    virtual void write_flat_obs(std::span<double> out, int num_threads) const = 0; // B x obs_dim
    virtual void write_masks(std::span<char> out, int num_threads) const = 0;      // B x mask_dim

    // Results of the most recent step (or reset).
    virtual std::span<const double> rewards() const = 0;
    virtual std::span<const double> discounts() const = 0;
    virtual std::span<const std::uint8_t> step_types() const = 0;
    virtual std::span<const char> done_flags() const = 0;

    // Number of env resets performed since reset_all, auto-reset included.
    virtual std::uint64_t reset_count() const = 0;

    // Full per-entry records, for tests and drivers that need them.
    virtual TimeStep timestep_of(int i) const = 0;
    virtual StatePtr state_of(int i) const = 0;
    virtual void put_state(int i, const StateBase& state) = 0;
};

// Fixed-length per-step rollout storage for training. Row-major layouts:
// observations (num_steps+1, B, obs_dim) with the bootstrap observation in
// the final row; masks are the effective per-head masks used at sampling.
struct Trajectory {
    int num_steps = 0;
    int batch = 0;
    int obs_dim = 0;
    int mask_dim = 0;
    int num_heads = 0;
    std::vector<double> observations; // (num_steps+1) x B x obs_dim
    std::vector<char> masks;          // num_steps x B x mask_dim
    std::vector<std::int64_t> actions; // num_steps x B x num_heads
    std::vector<double> rewards;      // num_steps x B
    std::vector<double> discounts;    // num_steps x B
    std::vector<std::uint8_t> step_types; // num_steps x B
};

struct BatchObsView {
    int batch = 0;
    int obs_dim = 0;
    int mask_dim = 0;
    const double* obs = nullptr;  // B x obs_dim
    const char* masks = nullptr;  // B x mask_dim, pre-tightened copy owned by caller
};

// Writes one action row per entry; may tighten `effective_masks` in place
// (B x mask_dim) to record the distribution support actually sampled from.
using BatchPolicy =
    std::function<void(const BatchObsView&, rng::Key, std::span<std::int64_t> actions,
                       std::span<char> effective_masks)>;

// Auto-resetting batched rollout of exactly num_steps steps starting from the
// batch's current states.
Trajectory rollout(BatchCore& batch, rng::Key policy_key, const BatchPolicy& policy, int num_steps,
                   int num_threads);

// Convenience entry point that makes and resets a fresh batch first.
Trajectory rollout(const Environment& env, rng::Key key, const BatchPolicy& policy, int num_steps,
                   int batch_size, int num_threads);

// Uniform-over-valid-actions policy (zero logits through the masked sampler).
BatchPolicy make_random_policy(const BatchCore& batch);

struct ThroughputReport {
    std::string env_id;
    int batch_size = 0;
    double steps_per_second = 0.0;
    double epoch_wall_time = 0.0; // seconds
    bool warmup_excluded = true;
};

// Benchmark protocol: one untimed warmup epoch then one timed epoch, each of
// `blocks` x `steps_per_block` batch steps driven by the first-masked-valid
// action policy, without auto-reset (terminal entries freeze and still count
// toward the step total).
ThroughputReport run_throughput_epoch(const Environment& env, rng::Key key, int batch_size,
                                      int steps_per_block = 50, int blocks = 500,
                                      int num_threads = 1);

std::string throughput_csv_header();
std::string throughput_csv_row(const ThroughputReport& r);

} // namespace envkit
