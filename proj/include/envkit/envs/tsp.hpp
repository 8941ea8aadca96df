#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"
#include "envkit/tsp_generators.hpp"

namespace envkit::envs {

// Total Euclidean length of the closed tour visiting `order` (a permutation
// of all cities) and returning to order[0]. coords is flattened (x0, y0,
// x1, y1, ...).
double tour_length(std::span<const double> coords_xy, std::span<const std::int32_t> order);

struct TspState {
    std::vector<double> coords_xy; // 2N
    std::vector<char> visited;     // N
    std::vector<std::int32_t> trajectory;
    std::int32_t position = -1; // -1 before the first city is chosen
    std::int64_t step_count = 0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const TspState&, const TspState&) = default;
};

// Travelling salesman: each action visits an unvisited city. With the
// default terminal reward mode the reward is 0 until the last city, where it
// is the negative closed-tour length; dense mode pays the negative edge
// length per move plus the closing edge at the end. Episode returns agree
// between modes.
class Tsp {
  public:
    using State = TspState;

    explicit Tsp(const Params& params = {});

    class Slab {
      public:
        Slab(const Tsp& env, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        int n_;
        std::vector<double> coords_;
        std::vector<char> visited_;
        std::vector<std::int32_t> trajectories_;
        std::vector<std::int32_t> traj_lens_;
        std::vector<std::int32_t> positions_;
        std::vector<std::int64_t> steps_;
        std::vector<rng::Key> keys_;
        std::vector<char> done_;
    };

    void reset_into(rng::Key key, State& out) const;
    void step_inplace(State& s, const Action& a, StepRecord& rec) const;
    Value observe(const State& s) const;
    void metrics_into(const State& s, Extras& out) const;
    std::vector<char> action_mask(const State& s) const;
    std::vector<int> head_sizes() const { return {num_cities_}; }
    Spec observation_spec() const;
    Spec action_spec() const { return Spec::discrete(num_cities_); }
    int flat_obs_dim() const { return 6 * num_cities_; }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "routing"; }
    std::string objective() const { return "Visit every city once on the shortest closed tour"; }

    int num_cities() const { return num_cities_; }
    bool dense_reward() const { return dense_reward_; }

  private:
    int num_cities_;
    bool dense_reward_;
    gen::CoordSource source_;
};

std::shared_ptr<Environment> make_tsp(const std::string& id, const Params& params);

} // namespace envkit::envs
