#include "envkit/env.hpp"

#include "envkit/batch.hpp"
#include "envkit/distrib.hpp"
#include "envkit/errors.hpp"

namespace envkit {

void Environment::constrain_head(int head, const Action& prefix, std::span<char> head_mask) const {
    (void)head;
    (void)prefix;
    (void)head_mask;
}

std::vector<double> Environment::flat_obs(const StateBase& state) const {
    std::vector<double> out(static_cast<std::size_t>(flat_obs_dim()));
    flat_obs_into(state, out);
    return out;
}

int Environment::mask_dim() const {
    int total = 0;
    for (int h : action_head_sizes()) {
        total += h;
    }
    return total;
}

namespace {

class AutoResetEnv final : public Environment {
  public:
    explicit AutoResetEnv(std::shared_ptr<const Environment> inner) : inner_(std::move(inner)) {}

    const std::string& id() const override { return inner_->id(); }
    std::string category() const override { return inner_->category(); }
    std::string objective() const override { return inner_->objective(); }
    Spec observation_spec() const override { return inner_->observation_spec(); }
    Spec action_spec() const override { return inner_->action_spec(); }

    std::pair<StatePtr, TimeStep> reset(rng::Key key) const override { return inner_->reset(key); }

    std::pair<StatePtr, TimeStep> step(const StateBase& state, const Action& action) const override {
        return inner_->step_autoreset(state, action);
    }

    std::pair<StatePtr, TimeStep> step_autoreset(const StateBase& state,
                                                 const Action& action) const override {
        return inner_->step_autoreset(state, action);
    }

    Value observe(const StateBase& state) const override { return inner_->observe(state); }
    bool is_terminal(const StateBase& state) const override { return inner_->is_terminal(state); }
    bool states_equal(const StateBase& a, const StateBase& b) const override {
        return inner_->states_equal(a, b);
    }
    std::vector<int> action_head_sizes() const override { return inner_->action_head_sizes(); }
    std::vector<char> action_mask(const StateBase& state) const override {
        return inner_->action_mask(state);
    }
    void constrain_head(int head, const Action& prefix, std::span<char> head_mask) const override {
        inner_->constrain_head(head, prefix, head_mask);
    }
    int flat_obs_dim() const override { return inner_->flat_obs_dim(); }
    void flat_obs_into(const StateBase& state, std::span<double> out) const override {
        inner_->flat_obs_into(state, out);
    }
    RenderOut render(const StateBase& state) const override { return inner_->render(state); }
    std::unique_ptr<BatchCore> make_batch(int batch_size) const override {
        return inner_->make_batch(batch_size);
    }

  private:
    std::shared_ptr<const Environment> inner_;
};

} // namespace

std::shared_ptr<Environment> auto_reset_wrap(std::shared_ptr<const Environment> env) {
    return std::make_shared<AutoResetEnv>(std::move(env));
}

Action sample_valid_action(const Environment& env, const StateBase& state, rng::Key key) {
    const auto heads = env.action_head_sizes();
    const auto base_mask = env.action_mask(state);
    Action action;
    action.reserve(heads.size());
    std::size_t offset = 0;
    for (std::size_t h = 0; h < heads.size(); ++h) {
        std::vector<char> mask(base_mask.begin() + static_cast<std::ptrdiff_t>(offset),
                               base_mask.begin() + static_cast<std::ptrdiff_t>(offset + heads[h]));
        env.constrain_head(static_cast<int>(h), action, mask);
        const std::vector<double> zeros(static_cast<std::size_t>(heads[h]), 0.0);
        const auto sample = masked_categorical_sample(zeros, mask, rng::fold_in(key, h));
        action.push_back(sample.index);
        offset += static_cast<std::size_t>(heads[h]);
    }
    return action;
}

Action first_valid_action(const Environment& env, const StateBase& state) {
    const auto heads = env.action_head_sizes();
    const auto base_mask = env.action_mask(state);
    Action action;
    action.reserve(heads.size());
    std::size_t offset = 0;
    for (std::size_t h = 0; h < heads.size(); ++h) {
        std::vector<char> mask(base_mask.begin() + static_cast<std::ptrdiff_t>(offset),
                               base_mask.begin() + static_cast<std::ptrdiff_t>(offset + heads[h]));
        env.constrain_head(static_cast<int>(h), action, mask);
        std::int64_t pick = -1;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i]) {
                pick = static_cast<std::int64_t>(i);
                break;
            }
        }
        if (pick < 0) {
            throw ContractViolationError("first_valid_action: no valid action in mask");
        }
        action.push_back(pick);
        offset += static_cast<std::size_t>(heads[h]);
    }
    return action;
}

} // namespace envkit
