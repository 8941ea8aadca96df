#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"

namespace envkit::envs {

struct SnakeState {
    std::vector<std::int32_t> body; // cell ids, head first
    std::int32_t fruit = 0;
    std::int64_t step_count = 0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const SnakeState&, const SnakeState&) = default;
};

// Grid snake. Actions 0=up, 1=right, 2=down, 3=left; the mask only excludes
// reversing into the neck (walls and body are legal, fatal moves ending the
// episode with discount 0). Eating the fruit grows the body by one, scores
// +1 and spawns a new fruit on a uniformly random empty cell; filling the
// grid wins. The observation is a 5-channel float grid: head, body (head and
// tail excluded), tail, fruit, and a constant step-fraction plane.
// horizon = 0 disables truncation.
class Snake {
  public:
    using State = SnakeState;

    explicit Snake(const Params& params = {});

    class Slab {
      public:
        Slab(const Snake& env, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        int capacity_;
        std::vector<std::int32_t> bodies_;
        std::vector<std::int32_t> lengths_;
        std::vector<std::int32_t> fruits_;
        std::vector<std::int64_t> steps_;
        std::vector<rng::Key> keys_;
        std::vector<char> done_;
    };

    void reset_into(rng::Key key, State& out) const;
    void step_inplace(State& s, const Action& a, StepRecord& rec) const;
    Value observe(const State& s) const;
    void metrics_into(const State& s, Extras& out) const;
    std::vector<char> action_mask(const State& s) const;
    std::vector<int> head_sizes() const { return {4}; }
    Spec observation_spec() const;
    Spec action_spec() const { return Spec::discrete(4); }
    int flat_obs_dim() const { return 5 * grid_size_ * grid_size_ + 14; }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "routing"; }
    std::string objective() const { return "Eat fruit without colliding with wall or body"; }

    int grid_size() const { return grid_size_; }
    int horizon() const { return horizon_; }

  private:
    void write_channels(const State& s, std::span<double> grid) const;

    int grid_size_;
    int horizon_;
};

std::shared_ptr<Environment> make_snake(const std::string& id, const Params& params);

} // namespace envkit::envs
