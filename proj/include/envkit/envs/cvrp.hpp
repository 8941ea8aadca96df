#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"

namespace envkit::envs {

struct CvrpState {
    std::vector<double> coords_xy; // 2*(N+1); node 0 is the depot
    std::vector<std::int32_t> demands; // N customers, zeroed once served
    std::int32_t remaining_capacity = 0;
    std::int32_t position = 0; // node index, 0 = depot
    std::vector<std::int32_t> route; // nodes visited so far, depot visits included
    double route_length = 0.0;
    std::int64_t step_count = 0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const CvrpState&, const CvrpState&) = default;
};

// Capacitated vehicle routing with a single vehicle. Action = next node
// (0 = depot). A customer is valid iff unvisited and its demand fits the
// remaining capacity; the depot is valid iff the vehicle is away from it.
// Visiting the depot refills capacity. Terminal when every customer is
// served and the vehicle returns to the depot; the terminal reward is the
// negative total route length (dense mode pays per edge instead).
class Cvrp {
  public:
    using State = CvrpState;

    explicit Cvrp(const Params& params = {});

    class Slab {
      public:
        Slab(const Cvrp& env, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        int n_;
        int route_cap_;
        std::vector<double> coords_;
        std::vector<std::int32_t> demands_;
        std::vector<std::int32_t> capacities_;
        std::vector<std::int32_t> positions_;
        std::vector<std::int32_t> routes_;
        std::vector<std::int32_t> route_lens_;
        std::vector<double> lengths_;
        std::vector<std::int64_t> steps_;
        std::vector<rng::Key> keys_;
        std::vector<char> done_;
    };

    void reset_into(rng::Key key, State& out) const;
    void step_inplace(State& s, const Action& a, StepRecord& rec) const;
    Value observe(const State& s) const;
    void metrics_into(const State& s, Extras& out) const;
    std::vector<char> action_mask(const State& s) const;
    std::vector<int> head_sizes() const { return {num_customers_ + 1}; }
    Spec observation_spec() const;
    Spec action_spec() const { return Spec::discrete(num_customers_ + 1); }
    int flat_obs_dim() const { return 5 * num_customers_ + 5; }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "routing"; }
    std::string objective() const { return "Serve all demands on the shortest capacitated route"; }

    int num_customers() const { return num_customers_; }
    int capacity() const { return capacity_; }
    int max_demand() const { return max_demand_; }
    int route_capacity() const { return 2 * num_customers_ + 2; }

  private:
    int num_customers_;
    int capacity_;
    int max_demand_;
    bool dense_reward_;
};

std::shared_ptr<Environment> make_cvrp(const std::string& id, const Params& params);

} // namespace envkit::envs
