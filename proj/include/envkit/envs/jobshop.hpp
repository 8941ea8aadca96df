#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"

namespace envkit::envs {

// Static problem data: per job, the ordered (machine, duration) operation
// list, padded to max_ops with machine -1 / duration 0.
struct JobShopInstance {
    int num_jobs = 0;
    int num_machines = 0;
    int max_ops = 0;
    std::vector<std::int32_t> op_machine;  // num_jobs * max_ops
    std::vector<std::int32_t> op_duration; // num_jobs * max_ops
    std::vector<std::int32_t> num_ops;     // per job

    friend bool operator==(const JobShopInstance&, const JobShopInstance&) = default;
};

// Plain-text matrix format: one job per line, whitespace-separated pairs
// "machine duration".
std::string write_jobshop_instance(const JobShopInstance& instance);
JobShopInstance parse_jobshop_instance(const std::string& text);

struct JobShopState {
    JobShopInstance instance;
    std::vector<std::int32_t> op_index;    // next operation per job
    std::vector<std::int32_t> machine_rem; // remaining steps per machine
    std::vector<std::int32_t> machine_job; // running job per machine, -1 idle
    std::int64_t step_count = 0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const JobShopState&, const JobShopState&) = default;
};

// Job-shop scheduling at unit time steps. The action assigns one job id per
// machine (num_jobs = no-op). A job is assignable iff the machine is idle,
// the job is idle, and the job's next operation runs on that machine; a job
// id may appear at most once per action. Every step costs -1 until all
// operations complete, so the episode return is the negative makespan.
class JobShop {
  public:
    using State = JobShopState;

    explicit JobShop(const Params& params = {});

    class Slab {
      public:
        Slab(const JobShop& env, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        int jobs_, machines_, max_ops_;
        std::vector<std::int32_t> op_machine_;
        std::vector<std::int32_t> op_duration_;
        std::vector<std::int32_t> num_ops_;
        std::vector<std::int32_t> op_index_;
        std::vector<std::int32_t> machine_rem_;
        std::vector<std::int32_t> machine_job_;
        std::vector<std::int64_t> steps_;
        std::vector<rng::Key> keys_;
        std::vector<char> done_;
    };

    void reset_into(rng::Key key, State& out) const;
    void step_inplace(State& s, const Action& a, StepRecord& rec) const;
    Value observe(const State& s) const;
    void metrics_into(const State& s, Extras& out) const;
    std::vector<char> action_mask(const State& s) const;
    std::vector<int> head_sizes() const {
        return std::vector<int>(static_cast<std::size_t>(num_machines_), num_jobs_ + 1);
    }
    void constrain_head(int head, const Action& prefix, std::span<char> head_mask) const;
    Spec observation_spec() const;
    Spec action_spec() const;
    int flat_obs_dim() const {
        return 2 * num_jobs_ * max_ops_ + num_jobs_ + 2 * num_machines_ +
               num_machines_ * (num_jobs_ + 1);
    }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "packing"; }
    std::string objective() const { return "Schedule all job operations minimizing the makespan"; }

    int num_jobs() const { return num_jobs_; }
    int num_machines() const { return num_machines_; }
    int max_ops() const { return max_ops_; }
    int max_duration() const { return max_duration_; }
    int horizon() const { return horizon_; }

    // Instance generator, exposed for tests.
    JobShopInstance generate_instance(rng::Key key) const;

  private:
    int num_jobs_;
    int num_machines_;
    int max_ops_;
    int max_duration_;
    int horizon_;
    std::shared_ptr<const JobShopInstance> fixed_instance_; // from instance_file, optional
};

std::shared_ptr<Environment> make_jobshop(const std::string& id, const Params& params);

} // namespace envkit::envs
