#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"

namespace envkit::envs {

struct KnapsackState {
    std::vector<double> weights; // in (0,1)
    std::vector<double> values;  // in (0,1)
    std::vector<char> packed;
    double remaining_budget = 0.0;
    std::int64_t step_count = 0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const KnapsackState&, const KnapsackState&) = default;
};

// 0/1 knapsack: each action packs one item; reward = the item's value, so
// the episode return is the total packed value. An item is valid iff
// unpacked and its weight fits the remaining budget; the episode terminates
// when no remaining item fits.
class Knapsack {
  public:
    using State = KnapsackState;

    explicit Knapsack(const Params& params = {});

    class Slab {
      public:
        Slab(const Knapsack& env, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        int n_;
        std::vector<double> weights_;
        std::vector<double> values_;
        std::vector<char> packed_;
        std::vector<double> budgets_;
        std::vector<std::int64_t> steps_;
        std::vector<rng::Key> keys_;
        std::vector<char> done_;
    };

    void reset_into(rng::Key key, State& out) const;
    void step_inplace(State& s, const Action& a, StepRecord& rec) const;
    Value observe(const State& s) const;
    void metrics_into(const State& s, Extras& out) const;
    std::vector<char> action_mask(const State& s) const;
    std::vector<int> head_sizes() const { return {num_items_}; }
    Spec observation_spec() const;
    Spec action_spec() const { return Spec::discrete(num_items_); }
    int flat_obs_dim() const { return 4 * num_items_ + 1; }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "packing"; }
    std::string objective() const { return "Pack items maximizing value within the weight budget"; }

    int num_items() const { return num_items_; }
    double capacity() const { return capacity_; }

  private:
    int num_items_;
    double capacity_;
};

std::shared_ptr<Environment> make_knapsack(const std::string& id, const Params& params);

} // namespace envkit::envs
