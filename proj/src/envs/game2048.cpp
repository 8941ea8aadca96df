#include "envkit/envs/game2048.hpp"

#include <algorithm>
#include <cmath>

#include "envkit/render.hpp"

namespace envkit::envs {
namespace {

// Indices of the four cells of `line` number i along direction d, ordered so
// that index 0 is the edge the tiles slide toward.
std::array<int, 4> line_indices(int direction, int line) {
    std::array<int, 4> idx{};
    for (int k = 0; k < 4; ++k) {
        switch (direction) {
            case 0: idx[k] = k * 4 + line; break;          // up: columns, top first
            case 1: idx[k] = line * 4 + (3 - k); break;    // right: rows, right first
            case 2: idx[k] = (3 - k) * 4 + line; break;    // down: columns, bottom first
            default: idx[k] = line * 4 + k; break;         // left: rows, left first
        }
    }
    return idx;
}

// Applies the line rule along `direction`; returns the merge reward, or -1
// if the move does not change the board (invalid).
std::int64_t apply_move(std::array<std::int32_t, 16>& board, int direction) {
    std::int64_t reward = 0;
    bool changed = false;
    for (int line = 0; line < 4; ++line) {
        const auto idx = line_indices(direction, line);
        std::array<std::int32_t, 4> vals{};
        for (int k = 0; k < 4; ++k) {
            vals[k] = board[static_cast<std::size_t>(idx[k])];
        }
        const auto before = vals;
        reward += shift_and_merge_line(vals);
        if (vals != before) {
            changed = true;
        }
        for (int k = 0; k < 4; ++k) {
            board[static_cast<std::size_t>(idx[k])] = vals[k];
        }
    }
    return changed ? reward : -1;
}

bool any_move_possible(const std::array<std::int32_t, 16>& board) {
    for (int d = 0; d < 4; ++d) {
        auto copy = board;
        if (apply_move(copy, d) >= 0) {
            return true;
        }
    }
    return false;
}

} // namespace

std::int64_t shift_and_merge_line(std::span<std::int32_t> line) {
    std::array<std::int32_t, 4> out{};
    std::int64_t reward = 0;
    int w = 0;
    std::int32_t pending = 0;
    for (std::int32_t v : line) {
        if (v == 0) {
            continue;
        }
        if (pending == 0) {
            pending = v;
        } else if (pending == v) {
            out[static_cast<std::size_t>(w++)] = 2 * v;
            reward += 2 * v;
            pending = 0;
        } else {
            out[static_cast<std::size_t>(w++)] = pending;
            pending = v;
        }
    }
    if (pending != 0) {
        out[static_cast<std::size_t>(w++)] = pending;
    }
    std::copy(out.begin(), out.end(), line.begin());
    return reward;
}

Game2048::Game2048(const Params&) {}

void Game2048::reset_into(rng::Key key, State& out) const {
    const auto keys = rng::split(key, 2);
    out.board.fill(0);
    out.step_count = 0;
    out.score = 0.0;
    out.done = false;
    out.key = keys[0];
    const auto cell = rng::randint_at(keys[1], 0, 0, 16);
    const bool four = rng::uniform01(keys[1], 1) >= 0.9;
    out.board[static_cast<std::size_t>(cell)] = four ? 4 : 2;
}

void Game2048::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("game2048: stepping a terminal state");
    }
    const int direction = static_cast<int>(a.at(0));
    if (direction < 0 || direction > 3) {
        throw InvalidActionError("game2048: action must be in 0..3");
    }
    const std::int64_t reward = apply_move(s.board, direction);
    if (reward < 0) {
        throw InvalidActionError("game2048: move does not change the board (masked invalid)");
    }

    const auto keys = rng::split(s.key, 2);
    s.key = keys[0];
    int empties = 0;
    for (std::int32_t v : s.board) {
        empties += v == 0;
    }
    // A valid move always frees at least one cell.
    const auto pick = rng::randint_at(keys[1], 0, 0, empties);
    const bool four = rng::uniform01(keys[1], 1) >= 0.9;
    int seen = 0;
    for (auto& v : s.board) {
        if (v == 0 && seen++ == pick) {
            v = four ? 4 : 2;
            break;
        }
    }

    s.step_count += 1;
    s.score += static_cast<double>(reward);
    rec.reward = static_cast<double>(reward);
    if (!any_move_possible(s.board)) {
        s.done = true;
        rec.type = StepType::Last;
        rec.discount = 0.0;
    } else {
        rec.type = StepType::Mid;
        rec.discount = 1.0;
    }
}

Value Game2048::observe(const State& s) const {
    std::vector<std::int64_t> board(16);
    for (int i = 0; i < 16; ++i) {
        board[static_cast<std::size_t>(i)] = s.board[static_cast<std::size_t>(i)];
    }
    const auto mask = action_mask(s);
    std::vector<std::int64_t> mask_i(mask.begin(), mask.end());
    return Value::map({
        {"board", Value::tensor_i({4, 4}, std::move(board))},
        {"action_mask", Value::tensor_i({4}, std::move(mask_i))},
        {"step_count", Value::scalar_i(s.step_count)},
    });
}

void Game2048::metrics_into(const State& s, Extras& out) const {
    out.emplace_back("score", s.score);
    std::int32_t highest = 0;
    for (std::int32_t v : s.board) {
        highest = std::max(highest, v);
    }
    out.emplace_back("highest_tile", static_cast<double>(highest));
}

std::vector<char> Game2048::action_mask(const State& s) const {
    std::vector<char> mask(4, 0);
    for (int d = 0; d < 4; ++d) {
        auto copy = s.board;
        mask[static_cast<std::size_t>(d)] = apply_move(copy, d) >= 0 ? 1 : 0;
    }
    return mask;
}

Spec Game2048::observation_spec() const {
    return Spec::composite({
        {"board", Spec::array({4, 4}, Dtype::i64)},
        {"action_mask", Spec::bounded({4}, Dtype::i64, 0, 1)},
        {"step_count", Spec::array({}, Dtype::i64)},
    });
}

void Game2048::flat_obs_into(const State& s, std::span<double> out) const {
    // 16 log2-scaled tiles + 4 mask bits.
    for (int i = 0; i < 16; ++i) {
        const std::int32_t v = s.board[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = v == 0 ? 0.0 : std::log2(static_cast<double>(v)) / 16.0;
    }
    const auto mask = action_mask(s);
    for (int d = 0; d < 4; ++d) {
        out[static_cast<std::size_t>(16 + d)] = mask[static_cast<std::size_t>(d)] ? 1.0 : 0.0;
    }
}

RenderOut Game2048::render(const State& s) const {
    Raster img = Raster::for_grid(4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const std::int32_t v = s.board[static_cast<std::size_t>(r * 4 + c)];
            if (v == 0) {
                img.fill_cell(r, c, 205, 193, 180);
            } else {
                const int level = static_cast<int>(std::log2(static_cast<double>(v)));
                const std::uint8_t red = static_cast<std::uint8_t>(std::min(238, 150 + level * 8));
                const std::uint8_t green = static_cast<std::uint8_t>(std::max(80, 228 - level * 12));
                img.fill_cell(r, c, red, green, 90);
            }
        }
    }
    return img.to_render_out();
}

Game2048::Slab::Slab(const Game2048&, int batch)
    : boards_(static_cast<std::size_t>(batch) * 16),
      steps_(static_cast<std::size_t>(batch)),
      scores_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void Game2048::Slab::store(int i, const State& s) {
    std::copy(s.board.begin(), s.board.end(), boards_.begin() + static_cast<std::ptrdiff_t>(i) * 16);
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    scores_[static_cast<std::size_t>(i)] = s.score;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void Game2048::Slab::load_into(int i, State& out) const {
    std::copy(boards_.begin() + static_cast<std::ptrdiff_t>(i) * 16,
              boards_.begin() + static_cast<std::ptrdiff_t>(i + 1) * 16, out.board.begin());
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.score = scores_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_game2048(const std::string& id, const Params& params) {
    return make_env(id, Game2048(params));
}

} // namespace envkit::envs
