#pragma once
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "envkit/rng.hpp"
#include "envkit/specs.hpp"
#include "envkit/timestep.hpp"
#include "envkit/value.hpp"

namespace envkit {

// Discrete action, one entry per action head. Single-head environments use a
// length-1 vector; JobShop uses one entry per machine, RubiksCube one per
// move component.
using Action = std::vector<std::int64_t>;

// Type-erased simulator state. Concrete states are plain value structs held
// in a StateBox; reset/step never mutate their inputs.
struct StateBase {
    virtual ~StateBase() = default;
    virtual std::unique_ptr<StateBase> clone() const = 0;
};

template <class S>
struct StateBox final : StateBase {
    S state;
    explicit StateBox(S s) : state(std::move(s)) {}
    std::unique_ptr<StateBase> clone() const override { return std::make_unique<StateBox<S>>(state); }
};

template <class S>
const S& unbox(const StateBase& base) {
    return dynamic_cast<const StateBox<S>&>(base).state;
}

using StatePtr = std::unique_ptr<StateBase>;

struct RenderOut {
    enum class Format { ppm, svg };
    Format format = Format::ppm;
    std::string payload; // complete file contents
    const char* suffix() const { return format == Format::ppm ? ".ppm" : ".svg"; }
};

class BatchCore; // batch.hpp

// Environment contract: pure reset/step over explicit states. Instances are
// immutable after construction; any number of threads may call reset/step
// concurrently.
class Environment {
  public:
    virtual ~Environment() = default;

    virtual const std::string& id() const = 0;
    virtual std::string category() const = 0;  // logic / routing / packing
    virtual std::string objective() const = 0; // one-line task description

    virtual Spec observation_spec() const = 0;
    virtual Spec action_spec() const = 0;

    // Pure: equal keys produce identical states and timesteps. The emitted
    // timestep is FIRST with reward 0, discount 1.
    virtual std::pair<StatePtr, TimeStep> reset(rng::Key key) const = 0;

    // Pure: the input state is unchanged and stays usable. Actions that fail
    // spec validation or are masked invalid raise InvalidActionError;
    // stepping a terminal state raises ContractViolationError.
    virtual std::pair<StatePtr, TimeStep> step(const StateBase& state, const Action& action) const = 0;

    // Step with auto-reset: when the inner step terminates, the environment
    // is immediately reset with a key split from the terminal state's key and
    // the LAST record is emitted with the fresh observation in place of the
    // terminal one.
    virtual std::pair<StatePtr, TimeStep> step_autoreset(const StateBase& state,
                                                         const Action& action) const = 0;

    virtual Value observe(const StateBase& state) const = 0;
    virtual bool is_terminal(const StateBase& state) const = 0;
    virtual bool states_equal(const StateBase& a, const StateBase& b) const = 0;

    // Valid-action mask, concatenated over action heads.
    virtual std::vector<int> action_head_sizes() const = 0;
    virtual std::vector<char> action_mask(const StateBase& state) const = 0;

    // Tighten the mask of head `head` given already-chosen earlier heads
    // (e.g. JobShop forbids assigning one job to two machines). Default: no
    // extra constraint.
    virtual void constrain_head(int head, const Action& prefix, std::span<char> head_mask) const;

    // Flat float encoding of the observation for dense-network agents. The
    // per-environment layouts are documented in the README.
    virtual int flat_obs_dim() const = 0;
    virtual void flat_obs_into(const StateBase& state, std::span<double> out) const = 0;
    std::vector<double> flat_obs(const StateBase& state) const;

    virtual RenderOut render(const StateBase& state) const = 0;

    virtual std::unique_ptr<BatchCore> make_batch(int batch_size) const = 0;

    int num_action_heads() const { return static_cast<int>(action_head_sizes().size()); }
    int mask_dim() const;
};

// Wraps an environment so that `step` immediately resets finished episodes.
std::shared_ptr<Environment> auto_reset_wrap(std::shared_ptr<const Environment> env);

// Uniformly samples a valid action (per head, respecting cross-head
// constraints). Used by the random baseline and tests.
Action sample_valid_action(const Environment& env, const StateBase& state, rng::Key key);

// First masked-valid action in head order; the fixed policy of the
// throughput benchmark.
Action first_valid_action(const Environment& env, const StateBase& state);

} // namespace envkit
