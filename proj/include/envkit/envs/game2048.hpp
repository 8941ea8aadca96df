#pragma once
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"

namespace envkit::envs {

// Classic 2048 line rule: nonzeros compact toward index 0, equal adjacent
// pairs merge once left-to-right (no cascading). Returns the merge reward
// (sum of merged results).
std::int64_t shift_and_merge_line(std::span<std::int32_t> line);

struct Game2048State {
    std::array<std::int32_t, 16> board{}; // tile values; 0 = empty
    std::int64_t step_count = 0;
    double score = 0.0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const Game2048State&, const Game2048State&) = default;
};

// 4x4 sliding-merge game. Actions: 0=up, 1=right, 2=down, 3=left; a move is
// valid iff it changes the board. After each move one tile spawns on a
// uniformly random empty cell, value 2 with probability 0.9, else 4.
// Terminal when no move changes the board.
class Game2048 {
  public:
    using State = Game2048State;

    explicit Game2048(const Params& params = {});

    class Slab {
      public:
        Slab(const Game2048&, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        std::vector<std::int32_t> boards_;
        std::vector<std::int64_t> steps_;
        std::vector<double> scores_;
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
    int flat_obs_dim() const { return 20; }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "logic"; }
    std::string objective() const { return "Merge equal tiles to reach a high value"; }
};

std::shared_ptr<Environment> make_game2048(const std::string& id, const Params& params);

} // namespace envkit::envs
