#pragma once
#include <atomic>
#include <memory>
#include <omp.h>
#include <string>
#include <utility>
#include <vector>

#include "envkit/batch.hpp"
#include "envkit/env.hpp"
#include "envkit/errors.hpp"

namespace envkit {

// Result of one typed transition, observation excluded (observations are
// built on demand from the state).
struct StepRecord {
    StepType type = StepType::Mid;
    double reward = 0.0;
    double discount = 1.0;
};

namespace detail {

template <class E>
concept HasConstrainHead = requires(const E& e, int h, const Action& p, std::span<char> m) {
    e.constrain_head(h, p, m);
};

// Shared auto-reset transition: used verbatim by both the single-environment
// wrapper and the batch engine so the two stay bit-exact.
template <class E>
void auto_reset_inplace(const E& env, typename E::State& s, const Action& a, StepRecord& rec,
                        Extras& extras, bool* did_reset = nullptr) {
    env.step_inplace(s, a, rec);
    extras.clear();
    env.metrics_into(s, extras);
    if (rec.type == StepType::Last) {
        env.reset_into(rng::split1(s.key), s);
        if (did_reset) {
            *did_reset = true;
        }
    } else if (did_reset) {
        *did_reset = false;
    }
}

} // namespace detail

template <class E>
class TypedBatch final : public BatchCore {
  public:
    TypedBatch(std::string env_id, E env, int batch_size)
        : env_id_(std::move(env_id)),
          env_(std::move(env)),
          batch_(batch_size),
          slab_(env_, batch_size),
          head_sizes_(env_.head_sizes()),
          rewards_(batch_size, 0.0),
          discounts_(batch_size, 1.0),
          types_(batch_size, static_cast<std::uint8_t>(StepType::First)),
          done_(batch_size, 0),
          extras_(batch_size) {
        if (batch_size < 1) {
            throw InvalidArgumentError("batch size must be >= 1");
        }
        num_heads_ = static_cast<int>(head_sizes_.size());
        mask_dim_ = 0;
        for (int h : head_sizes_) {
            mask_dim_ += h;
        }
    }

    int size() const override { return batch_; }
    const std::string& env_id() const override { return env_id_; }
    int obs_dim() const override { return env_.flat_obs_dim(); }
    int mask_dim() const override { return mask_dim_; }
    const std::vector<int>& head_sizes() const override { return head_sizes_; }

    void constrain_head(int head, const Action& prefix, std::span<char> head_mask) const override {
        if constexpr (detail::HasConstrainHead<E>) {
            env_.constrain_head(head, prefix, head_mask);
        } else {
            (void)head;
            (void)prefix;
            (void)head_mask;
        }
    }

    void reset_all(rng::Key key, int num_threads) override {
        const auto keys = rng::split(key, static_cast<std::size_t>(batch_));
        run_indexed(num_threads, [&](int i, typename E::State& scratch) {
            env_.reset_into(keys[static_cast<std::size_t>(i)], scratch);
            extras_[static_cast<std::size_t>(i)].clear();
            env_.metrics_into(scratch, extras_[static_cast<std::size_t>(i)]);
            slab_.store(i, scratch);
            rewards_[static_cast<std::size_t>(i)] = 0.0;
            discounts_[static_cast<std::size_t>(i)] = 1.0;
            types_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(StepType::First);
            done_[static_cast<std::size_t>(i)] = 0;
        });
        resets_ = static_cast<std::uint64_t>(batch_);
    }

    void step(std::span<const std::int64_t> actions, StepMode mode, int num_threads) override {
        if (actions.size() != static_cast<std::size_t>(batch_) * static_cast<std::size_t>(num_heads_)) {
            throw InvalidArgumentError("batch step: action buffer has wrong size");
        }
        error_index_.store(-1, std::memory_order_relaxed);

        run_indexed(num_threads, [&](int i, typename E::State& scratch) {
            if (mode == StepMode::freeze_done && done_[static_cast<std::size_t>(i)]) {
                return; // frozen: skipped but counted as a step by the driver
            }
            Action a(actions.begin() + static_cast<std::ptrdiff_t>(i) * num_heads_,
                     actions.begin() + static_cast<std::ptrdiff_t>(i + 1) * num_heads_);
            try {
                slab_.load_into(i, scratch);
                StepRecord rec;
                env_.step_inplace(scratch, a, rec);
                extras_[static_cast<std::size_t>(i)].clear();
                env_.metrics_into(scratch, extras_[static_cast<std::size_t>(i)]);
                slab_.store(i, scratch);
                rewards_[static_cast<std::size_t>(i)] = rec.reward;
                discounts_[static_cast<std::size_t>(i)] = rec.discount;
                types_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rec.type);
                done_[static_cast<std::size_t>(i)] = rec.type == StepType::Last ? 1 : 0;
            } catch (const std::exception& e) {
                record_error(i, e.what());
            }
        });

        if (int bad = error_index_.load(std::memory_order_relaxed); bad >= 0) {
            throw InvalidActionError("batch entry " + std::to_string(bad) + ": " + error_message_);
        }

        if (mode == StepMode::auto_reset) {
            // Selective reset: a serial loop over just the terminated entries.
            typename E::State scratch;
            for (int i = 0; i < batch_; ++i) {
                if (!done_[static_cast<std::size_t>(i)]) {
                    continue;
                }
                slab_.load_into(i, scratch);
                env_.reset_into(rng::split1(scratch.key), scratch);
                slab_.store(i, scratch);
                done_[static_cast<std::size_t>(i)] = 0;
                ++resets_;
            }
        }
    }

    void write_flat_obs(std::span<double> out, int num_threads) const override {
        const int d = env_.flat_obs_dim();
        run_indexed(num_threads, [&](int i, typename E::State& scratch) {
            slab_.load_into(i, scratch);
            env_.flat_obs_into(scratch, out.subspan(static_cast<std::size_t>(i) * d, d));
        });
    }

    void write_masks(std::span<char> out, int num_threads) const override {
        run_indexed(num_threads, [&](int i, typename E::State& scratch) {
            slab_.load_into(i, scratch);
            const auto m = env_.action_mask(scratch);
            std::copy(m.begin(), m.end(), out.begin() + static_cast<std::ptrdiff_t>(i) * mask_dim_);
        });
    }

    std::span<const double> rewards() const override { return rewards_; }
    std::span<const double> discounts() const override { return discounts_; }
    std::span<const std::uint8_t> step_types() const override { return types_; }
    std::span<const char> done_flags() const override { return done_; }
    std::uint64_t reset_count() const override { return resets_; }

    TimeStep timestep_of(int i) const override {
        typename E::State s;
        slab_.load_into(i, s);
        TimeStep ts;
        ts.step_type = static_cast<StepType>(types_[static_cast<std::size_t>(i)]);
        ts.reward = rewards_[static_cast<std::size_t>(i)];
        ts.discount = discounts_[static_cast<std::size_t>(i)];
        ts.observation = env_.observe(s);
        ts.extras = extras_[static_cast<std::size_t>(i)];
        return ts;
    }

    StatePtr state_of(int i) const override {
        typename E::State s;
        slab_.load_into(i, s);
        return std::make_unique<StateBox<typename E::State>>(std::move(s));
    }

    void put_state(int i, const StateBase& state) override {
        slab_.store(i, unbox<typename E::State>(state));
    }

  private:
    template <class Fn>
    void run_indexed(int num_threads, Fn&& fn) const {
        if (num_threads <= 0) {
            // Serial reference path: no OpenMP involvement at all.
            typename E::State scratch;
            for (int i = 0; i < batch_; ++i) {
                fn(i, scratch);
            }
            return;
        }
#pragma omp parallel num_threads(num_threads)
        {
            typename E::State scratch;
#pragma omp for schedule(static)
            for (int i = 0; i < batch_; ++i) {
                fn(i, scratch);
            }
        }
    }

    void record_error(int i, const char* what) const {
        // Keep the lowest failing index so the reported error is
        // deterministic across thread counts.
        int cur = error_index_.load(std::memory_order_relaxed);
        while (cur < 0 || i < cur) {
            if (error_index_.compare_exchange_weak(cur, i, std::memory_order_relaxed)) {
#pragma omp critical(envkit_batch_error)
                error_message_ = what;
                break;
            }
        }
    }

    std::string env_id_;
    E env_;
    int batch_;
    typename E::Slab slab_;
    std::vector<int> head_sizes_;
    int num_heads_ = 1;
    int mask_dim_ = 0;
    std::vector<double> rewards_;
    std::vector<double> discounts_;
    std::vector<std::uint8_t> types_;
    std::vector<char> done_;
    std::vector<Extras> extras_;
    std::uint64_t resets_ = 0;
    mutable std::atomic<int> error_index_{-1};
    mutable std::string error_message_;
};

// Bridges a concrete typed environment onto the virtual Environment surface.
template <class E>
class EnvModel final : public Environment {
  public:
    using State = typename E::State;

    EnvModel(std::string id, E env) : id_(std::move(id)), env_(std::move(env)) {}

    const std::string& id() const override { return id_; }
    std::string category() const override { return env_.category(); }
    std::string objective() const override { return env_.objective(); }
    Spec observation_spec() const override { return env_.observation_spec(); }
    Spec action_spec() const override { return env_.action_spec(); }

    std::pair<StatePtr, TimeStep> reset(rng::Key key) const override {
        State s;
        env_.reset_into(key, s);
        Extras extras;
        env_.metrics_into(s, extras);
        TimeStep ts = TimeStep::restart(env_.observe(s), std::move(extras));
        return {std::make_unique<StateBox<State>>(std::move(s)), std::move(ts)};
    }

    std::pair<StatePtr, TimeStep> step(const StateBase& state, const Action& action) const override {
        validate_action(action);
        State s = unbox<State>(state);
        StepRecord rec;
        env_.step_inplace(s, action, rec);
        Extras extras;
        env_.metrics_into(s, extras);
        TimeStep ts{rec.type, rec.reward, rec.discount, env_.observe(s), std::move(extras)};
        return {std::make_unique<StateBox<State>>(std::move(s)), std::move(ts)};
    }

    std::pair<StatePtr, TimeStep> step_autoreset(const StateBase& state,
                                                 const Action& action) const override {
        validate_action(action);
        State s = unbox<State>(state);
        StepRecord rec;
        Extras extras;
        detail::auto_reset_inplace(env_, s, action, rec, extras);
        TimeStep ts{rec.type, rec.reward, rec.discount, env_.observe(s), std::move(extras)};
        return {std::make_unique<StateBox<State>>(std::move(s)), std::move(ts)};
    }

    Value observe(const StateBase& state) const override { return env_.observe(unbox<State>(state)); }
    bool is_terminal(const StateBase& state) const override { return unbox<State>(state).done; }
    bool states_equal(const StateBase& a, const StateBase& b) const override {
        return unbox<State>(a) == unbox<State>(b);
    }

    std::vector<int> action_head_sizes() const override { return env_.head_sizes(); }
    std::vector<char> action_mask(const StateBase& state) const override {
        return env_.action_mask(unbox<State>(state));
    }

    void constrain_head(int head, const Action& prefix, std::span<char> head_mask) const override {
        if constexpr (detail::HasConstrainHead<E>) {
            env_.constrain_head(head, prefix, head_mask);
        } else {
            Environment::constrain_head(head, prefix, head_mask);
        }
    }

    int flat_obs_dim() const override { return env_.flat_obs_dim(); }
    void flat_obs_into(const StateBase& state, std::span<double> out) const override {
        env_.flat_obs_into(unbox<State>(state), out);
    }

    RenderOut render(const StateBase& state) const override {
        return env_.render(unbox<State>(state));
    }

    std::unique_ptr<BatchCore> make_batch(int batch_size) const override {
        return std::make_unique<TypedBatch<E>>(id_, env_, batch_size);
    }

    const E& typed() const { return env_; }

  private:
    void validate_action(const Action& action) const {
        const Spec spec = env_.action_spec();
        Value v;
        if (spec.kind() == Spec::Kind::DiscreteArray) {
            if (action.size() != 1) {
                throw InvalidActionError("action must have exactly one entry");
            }
            v = Value::scalar_i(action[0]);
        } else {
            v = Value::tensor_i({static_cast<std::int64_t>(action.size())}, action);
        }
        if (auto f = spec.validate(v)) {
            throw InvalidActionError("action outside spec: " + f->to_string());
        }
    }

    std::string id_;
    E env_;
};

template <class E>
std::shared_ptr<EnvModel<E>> make_env(std::string id, E env) {
    return std::make_shared<EnvModel<E>>(std::move(id), std::move(env));
}

} // namespace envkit
