#pragma once
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/env_model.hpp"
#include "envkit/params.hpp"

namespace envkit::envs {

// Sticker layout: index (face*n + row)*n + col, faces ordered
// {up, front, right, back, left, down}, rows top-to-bottom and columns
// left-to-right as seen from outside each face on the standard unfolded
// cross (up above front, down below front).
//
// A move is (face, depth, direction): depth counts layers inward from the
// named face (0 = the face layer), direction 0 = clockwise seen from outside
// that face, 1 = counterclockwise, 2 = half turn.
std::vector<std::int8_t> cube_move(std::span<const std::int8_t> stickers, int cube_size, int face,
                                   int depth, int direction);

bool cube_solved(std::span<const std::int8_t> stickers, int cube_size);

struct CubeState {
    std::vector<std::int8_t> stickers; // 6*n*n color ids in 0..5
    std::int64_t step_count = 0;
    rng::Key key;
    bool done = false;

    friend bool operator==(const CubeState&, const CubeState&) = default;
};

// Reset scrambles a solved cube with `num_scrambles` uniform random moves.
// Reward 1 exactly when the cube becomes solved (termination); the step
// limit truncates with reward 0.
class RubiksCube {
  public:
    using State = CubeState;

    explicit RubiksCube(const Params& params = {});

    class Slab {
      public:
        Slab(const RubiksCube& env, int batch);
        void store(int i, const State& s);
        void load_into(int i, State& out) const;

      private:
        int stride_;
        std::vector<std::int8_t> stickers_;
        std::vector<std::int64_t> steps_;
        std::vector<rng::Key> keys_;
        std::vector<char> done_;
    };

    void reset_into(rng::Key key, State& out) const;
    void step_inplace(State& s, const Action& a, StepRecord& rec) const;
    Value observe(const State& s) const;
    void metrics_into(const State& s, Extras& out) const;
    std::vector<char> action_mask(const State& s) const;
    std::vector<int> head_sizes() const { return {6, num_depths_, 3}; }
    Spec observation_spec() const;
    Spec action_spec() const;
    int flat_obs_dim() const { return 6 * cube_size_ * cube_size_ * 6; }
    void flat_obs_into(const State& s, std::span<double> out) const;
    RenderOut render(const State& s) const;
    std::string category() const { return "logic"; }
    std::string objective() const { return "Turn layers until every face is a single color"; }

    int cube_size() const { return cube_size_; }
    int num_scrambles() const { return num_scrambles_; }
    int step_limit() const { return step_limit_; }
    int num_moves() const { return 6 * num_depths_ * 3; }

  private:
    void apply_table_move(std::vector<std::int8_t>& stickers, int face, int depth, int direction,
                          std::vector<std::int8_t>& scratch) const;

    int cube_size_;
    int num_depths_;
    int num_scrambles_;
    int step_limit_;
    // move tables indexed by (face*num_depths + depth)*3 + direction;
    // result[t] = src[table[t]].
    std::shared_ptr<const std::vector<std::vector<std::int32_t>>> tables_;
};

std::shared_ptr<Environment> make_rubiks_cube(const std::string& id, const Params& params);

} // namespace envkit::envs
