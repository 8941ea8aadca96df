#include "envkit/envs/maze.hpp"

#include "envkit/render.hpp"

namespace envkit::envs {
namespace {

constexpr int kDr[4] = {-1, 0, 1, 0}; // up, right, down, left
constexpr int kDc[4] = {0, 1, 0, -1};

} // namespace

MazeState generate_maze(rng::Key key, int rows, int cols) {
    if (rows < 3 || cols < 3 || rows % 2 == 0 || cols % 2 == 0) {
        throw InvalidArgumentError("maze: rows and cols must be odd and >= 3");
    }
    const auto keys = rng::split(key, 3); // state key, carve key, placement key
    MazeState s;
    s.walls.assign(static_cast<std::size_t>(rows) * cols, 1);
    s.key = keys[0];

    // Randomized DFS over the cell lattice (odd coordinates), knocking the
    // corridor wall between visited cells.
    const int crows = (rows - 1) / 2;
    const int ccols = (cols - 1) / 2;
    std::vector<char> visited(static_cast<std::size_t>(crows) * ccols, 0);
    std::vector<std::pair<int, int>> stack;
    std::uint64_t draw = 0;
    const int start_cell =
        static_cast<int>(rng::randint_at(keys[1], draw++, 0, static_cast<std::int64_t>(crows) * ccols));
    stack.emplace_back(start_cell / ccols, start_cell % ccols);
    visited[static_cast<std::size_t>(start_cell)] = 1;
    s.walls[static_cast<std::size_t>((2 * (start_cell / ccols) + 1)) * cols +
            (2 * (start_cell % ccols) + 1)] = 0;
    while (!stack.empty()) {
        const auto [cr, cc] = stack.back();
        int options[4];
        int count = 0;
        for (int d = 0; d < 4; ++d) {
            const int nr = cr + kDr[d];
            const int nc = cc + kDc[d];
            if (nr >= 0 && nr < crows && nc >= 0 && nc < ccols &&
                !visited[static_cast<std::size_t>(nr) * ccols + nc]) {
                options[count++] = d;
            }
        }
        if (count == 0) {
            stack.pop_back();
            continue;
        }
        const int d = options[rng::randint_at(keys[1], draw++, 0, count)];
        const int nr = cr + kDr[d];
        const int nc = cc + kDc[d];
        visited[static_cast<std::size_t>(nr) * ccols + nc] = 1;
        // Open the far cell and the corridor between.
        s.walls[static_cast<std::size_t>(2 * nr + 1) * cols + (2 * nc + 1)] = 0;
        s.walls[static_cast<std::size_t>(2 * cr + 1 + kDr[d]) * cols + (2 * cc + 1 + kDc[d])] = 0;
        stack.emplace_back(nr, nc);
    }

    // Uniform distinct open cells for agent and target.
    std::vector<std::int32_t> open;
    for (std::int32_t k = 0; k < rows * cols; ++k) {
        if (!s.walls[static_cast<std::size_t>(k)]) {
            open.push_back(k);
        }
    }
    const auto agent_pick = rng::randint_at(keys[2], 0, 0, static_cast<std::int64_t>(open.size()));
    auto target_pick = rng::randint_at(keys[2], 1, 0, static_cast<std::int64_t>(open.size()) - 1);
    if (target_pick >= agent_pick) {
        ++target_pick;
    }
    s.agent_row = open[static_cast<std::size_t>(agent_pick)] / cols;
    s.agent_col = open[static_cast<std::size_t>(agent_pick)] % cols;
    s.target_row = open[static_cast<std::size_t>(target_pick)] / cols;
    s.target_col = open[static_cast<std::size_t>(target_pick)] % cols;
    return s;
}

Maze::Maze(const Params& params)
    : rows_(static_cast<int>(params.get_int("rows", 21))),
      cols_(static_cast<int>(params.get_int("cols", 21))),
      horizon_(static_cast<int>(params.get_int("horizon", 0))) {
    if (rows_ < 3 || cols_ < 3 || rows_ % 2 == 0 || cols_ % 2 == 0) {
        throw InvalidArgumentError("maze: rows and cols must be odd and >= 3");
    }
    if (horizon_ <= 0) {
        horizon_ = rows_ * cols_;
    }
}

void Maze::reset_into(rng::Key key, State& out) const {
    out = generate_maze(key, rows_, cols_);
}

std::vector<char> Maze::action_mask(const State& s) const {
    std::vector<char> mask(4, 0);
    for (int d = 0; d < 4; ++d) {
        const int nr = s.agent_row + kDr[d];
        const int nc = s.agent_col + kDc[d];
        mask[static_cast<std::size_t>(d)] =
            (nr >= 0 && nr < rows_ && nc >= 0 && nc < cols_ &&
             !s.walls[static_cast<std::size_t>(nr) * cols_ + nc])
                ? 1
                : 0;
    }
    return mask;
}

void Maze::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("maze: stepping a terminal state");
    }
    const int d = static_cast<int>(a.at(0));
    if (d < 0 || d > 3) {
        throw InvalidActionError("maze: action must be in 0..3");
    }
    const int nr = s.agent_row + kDr[d];
    const int nc = s.agent_col + kDc[d];
    if (nr < 0 || nr >= rows_ || nc < 0 || nc >= cols_ ||
        s.walls[static_cast<std::size_t>(nr) * cols_ + nc]) {
        throw InvalidActionError("maze: move into a wall (masked invalid)");
    }
    s.agent_row = nr;
    s.agent_col = nc;
    s.step_count += 1;
    if (nr == s.target_row && nc == s.target_col) {
        s.done = true;
        rec = StepRecord{StepType::Last, 1.0, 0.0};
    } else if (s.step_count >= horizon_) {
        s.done = true;
        rec = StepRecord{StepType::Last, 0.0, 1.0};
    } else {
        rec = StepRecord{StepType::Mid, 0.0, 1.0};
    }
}

Value Maze::observe(const State& s) const {
    std::vector<std::int64_t> walls(s.walls.begin(), s.walls.end());
    const auto mask = action_mask(s);
    std::vector<std::int64_t> mask_i(mask.begin(), mask.end());
    return Value::map({
        {"walls", Value::tensor_i({rows_, cols_}, std::move(walls))},
        {"agent_position", Value::tensor_i({2}, {s.agent_row, s.agent_col})},
        {"target_position", Value::tensor_i({2}, {s.target_row, s.target_col})},
        {"action_mask", Value::tensor_i({4}, std::move(mask_i))},
        {"step_count", Value::scalar_i(s.step_count)},
    });
}

Spec Maze::observation_spec() const {
    const double max_dim = static_cast<double>(std::max(rows_, cols_) - 1);
    return Spec::composite({
        {"walls", Spec::bounded({rows_, cols_}, Dtype::i64, 0, 1)},
        {"agent_position", Spec::bounded({2}, Dtype::i64, 0, max_dim)},
        {"target_position", Spec::bounded({2}, Dtype::i64, 0, max_dim)},
        {"action_mask", Spec::bounded({4}, Dtype::i64, 0, 1)},
        {"step_count", Spec::array({}, Dtype::i64)},
    });
}

void Maze::flat_obs_into(const State& s, std::span<double> out) const {
    // Compact dense-net encoding standing in for a convolutional trunk:
    // normalized agent and target positions, mask, step fraction, then
    // shortest walk distance to the target from the agent cell and from its
    // four neighbors (1.0 for blocked neighbors). Everything derives from the
    // observation alone; the full grids stay available in the observation
    // tree.
    const int cells = rows_ * cols_;
    out[0] = static_cast<double>(s.agent_row) / (rows_ - 1);
    out[1] = static_cast<double>(s.agent_col) / (cols_ - 1);
    out[2] = static_cast<double>(s.target_row) / (rows_ - 1);
    out[3] = static_cast<double>(s.target_col) / (cols_ - 1);
    const auto mask = action_mask(s);
    for (int d = 0; d < 4; ++d) {
        out[static_cast<std::size_t>(4 + d)] = mask[static_cast<std::size_t>(d)] ? 1.0 : 0.0;
    }
    out[8] = static_cast<double>(s.step_count) / static_cast<double>(horizon_);

    // Breadth-first distances from the target over open cells.
    std::vector<std::int32_t> dist(static_cast<std::size_t>(cells), -1);
    std::vector<std::int32_t> queue;
    queue.reserve(static_cast<std::size_t>(cells));
    const std::int32_t target = s.target_row * cols_ + s.target_col;
    dist[static_cast<std::size_t>(target)] = 0;
    queue.push_back(target);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::int32_t cur = queue[head];
        const int r = cur / cols_, c = cur % cols_;
        for (int d = 0; d < 4; ++d) {
            const int nr = r + kDr[d], nc = c + kDc[d];
            if (nr < 0 || nr >= rows_ || nc < 0 || nc >= cols_) {
                continue;
            }
            const std::int32_t idx = nr * cols_ + nc;
            if (!s.walls[static_cast<std::size_t>(idx)] && dist[static_cast<std::size_t>(idx)] < 0) {
                dist[static_cast<std::size_t>(idx)] = dist[static_cast<std::size_t>(cur)] + 1;
                queue.push_back(idx);
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(cells);
    const auto norm_dist = [&](int r, int c) {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
            return 1.0;
        }
        const auto v = dist[static_cast<std::size_t>(r * cols_ + c)];
        return v < 0 ? 1.0 : static_cast<double>(v) * scale;
    };
    out[9] = norm_dist(s.agent_row, s.agent_col);
    for (int d = 0; d < 4; ++d) {
        out[static_cast<std::size_t>(10 + d)] = norm_dist(s.agent_row + kDr[d], s.agent_col + kDc[d]);
    }
}

RenderOut Maze::render(const State& s) const {
    Raster img = Raster::for_grid(rows_, cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            if (s.walls[static_cast<std::size_t>(r) * cols_ + c]) {
                img.fill_cell(r, c, 40, 40, 40);
            }
        }
    }
    img.fill_cell(s.target_row, s.target_col, 60, 200, 60);
    img.fill_cell_inset(s.agent_row, s.agent_col, 3, 220, 60, 60);
    return img.to_render_out();
}

Maze::Slab::Slab(const Maze& env, int batch)
    : stride_(env.rows() * env.cols()),
      walls_(static_cast<std::size_t>(batch) * stride_),
      agents_(static_cast<std::size_t>(batch) * 2),
      targets_(static_cast<std::size_t>(batch) * 2),
      steps_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void Maze::Slab::store(int i, const State& s) {
    std::copy(s.walls.begin(), s.walls.end(),
              walls_.begin() + static_cast<std::ptrdiff_t>(i) * stride_);
    agents_[static_cast<std::size_t>(i) * 2] = s.agent_row;
    agents_[static_cast<std::size_t>(i) * 2 + 1] = s.agent_col;
    targets_[static_cast<std::size_t>(i) * 2] = s.target_row;
    targets_[static_cast<std::size_t>(i) * 2 + 1] = s.target_col;
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void Maze::Slab::load_into(int i, State& out) const {
    out.walls.assign(walls_.begin() + static_cast<std::ptrdiff_t>(i) * stride_,
                     walls_.begin() + static_cast<std::ptrdiff_t>(i + 1) * stride_);
    out.agent_row = agents_[static_cast<std::size_t>(i) * 2];
    out.agent_col = agents_[static_cast<std::size_t>(i) * 2 + 1];
    out.target_row = targets_[static_cast<std::size_t>(i) * 2];
    out.target_col = targets_[static_cast<std::size_t>(i) * 2 + 1];
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_maze(const std::string& id, const Params& params) {
    return make_env(id, Maze(params));
}

} // namespace envkit::envs
