#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"

namespace envkit::envs {

struct MazeState {
    std::vector<char> walls; // rows*cols, 1 = wall
    std::int32_t agent_row = 0, agent_col = 0;
    std::int32_t target_row = 0, target_col = 0;
    std::int64_t step_count = 0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const MazeState&, const MazeState&) = default;
};

// Perfect maze on an odd-dimension wall grid, carved by randomized
// depth-first search: every open cell is connected to every other. Agent and
// target start on distinct open cells; reward 1 on reaching the target
// (termination), horizon rows*cols (truncation). Actions 0=up, 1=right,
// 2=down, 3=left; the mask excludes moves into walls or off the grid.
class Maze {
  public:
    using State = MazeState;

    explicit Maze(const Params& params = {});

    class Slab {
      public:
        Slab(const Maze& env, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        int stride_;
        std::vector<char> walls_;
        std::vector<std::int32_t> agents_;  // row, col interleaved
        std::vector<std::int32_t> targets_;
        std::vector<std::int64_t> steps_;
        std::vector<rng::Key> keys_;
        std::vector<char> done_;
    };

    void reset_into(rng::Key key, State& out) const;
    void step_inplace(State& s, const Action& a, StepRecord& rec) const;
    Value observe(const State& s) const;
    void metrics_into(const State&, Extras&) const {}
    std::vector<char> action_mask(const State& s) const;
    std::vector<int> head_sizes() const { return {4}; }
    Spec observation_spec() const;
    Spec action_spec() const { return Spec::discrete(4); }
    int flat_obs_dim() const { return 14; }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "routing"; }
    std::string objective() const { return "Reach the single target cell"; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int horizon() const { return horizon_; }

  private:
    int rows_;
    int cols_;
    int horizon_;
};

// Standalone generator: walls grid carved by keyed DFS plus agent/target
// placement. rows and cols must be odd and >= 3.
MazeState generate_maze(rng::Key key, int rows, int cols);

std::shared_ptr<Environment> make_maze(const std::string& id, const Params& params);

} // namespace envkit::envs
