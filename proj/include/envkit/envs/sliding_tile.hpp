#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"

namespace envkit::envs {

struct PuzzleState {
    std::vector<std::int32_t> tiles; // g*g permutation of 0..g*g-1; 0 = blank
    std::int32_t blank_row = 0;
    std::int32_t blank_col = 0;
    std::int64_t step_count = 0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const PuzzleState&, const PuzzleState&) = default;
};

// Sliding tile puzzle. Action d in {0=up,1=right,2=down,3=left} moves the
// tile on the opposite side of the blank in direction d (the blank moves in
// direction -d). Reward is +1 per tile newly on its solved slot and -1 per
// tile newly off it, so one of {-1, 0, +1} per step. Solved = identity
// permutation with the blank at the top-left. Reset shuffles with
// `shuffle_moves` random legal moves, preserving solvability.
class SlidingTile {
  public:
    using State = PuzzleState;

    explicit SlidingTile(const Params& params = {});

    class Slab {
      public:
        Slab(const SlidingTile& env, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        int stride_;
        std::vector<std::int32_t> tiles_;
        std::vector<std::int32_t> blanks_; // row, col interleaved
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
    int flat_obs_dim() const { return 2 * grid_size_ * grid_size_ + 4; }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "logic"; }
    std::string objective() const { return "Slide tiles until the puzzle is sorted"; }

    int grid_size() const { return grid_size_; }
    int shuffle_moves() const { return shuffle_moves_; }
    int step_limit() const { return step_limit_; }
    double prop_correct(const State& s) const;
    bool solved(const State& s) const;

  private:
    int grid_size_;
    int shuffle_moves_;
    int step_limit_;
};

std::shared_ptr<Environment> make_sliding_tile(const std::string& id, const Params& params);

} // namespace envkit::envs
