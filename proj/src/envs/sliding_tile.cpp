#include "envkit/envs/sliding_tile.hpp"

#include "envkit/render.hpp"

namespace envkit::envs {
namespace {

constexpr int kDr[4] = {-1, 0, 1, 0}; // up, right, down, left
constexpr int kDc[4] = {0, 1, 0, -1};

} // namespace

SlidingTile::SlidingTile(const Params& params)
    : grid_size_(static_cast<int>(params.get_int("grid_size", 5))),
      shuffle_moves_(static_cast<int>(params.get_int("shuffle_moves", 200))),
      step_limit_(static_cast<int>(params.get_int("step_limit", 500))) {
    if (grid_size_ < 2) {
        throw InvalidArgumentError("sliding_tile: grid_size must be >= 2");
    }
    if (shuffle_moves_ < 0 || step_limit_ < 1) {
        throw InvalidArgumentError("sliding_tile: shuffle_moves >= 0 and step_limit >= 1 required");
    }
}

std::vector<char> SlidingTile::action_mask(const State& s) const {
    // Action d moves the tile at blank - delta(d) into the blank; valid iff
    // that source cell is on the grid.
    std::vector<char> mask(4, 0);
    for (int d = 0; d < 4; ++d) {
        const int sr = s.blank_row - kDr[d];
        const int sc = s.blank_col - kDc[d];
        mask[static_cast<std::size_t>(d)] =
            (sr >= 0 && sr < grid_size_ && sc >= 0 && sc < grid_size_) ? 1 : 0;
    }
    return mask;
}

void SlidingTile::reset_into(rng::Key key, State& out) const {
    const auto keys = rng::split(key, 2);
    const int g = grid_size_;
    out.tiles.resize(static_cast<std::size_t>(g) * g);
    for (int k = 0; k < g * g; ++k) {
        out.tiles[static_cast<std::size_t>(k)] = k;
    }
    out.blank_row = 0;
    out.blank_col = 0;
    out.step_count = 0;
    out.key = keys[0];
    out.done = false;

    // Shuffle with random legal moves so the instance stays solvable.
    for (int m = 0; m < shuffle_moves_; ++m) {
        const auto mask = action_mask(out);
        int count = 0;
        for (char v : mask) {
            count += v != 0;
        }
        auto pick = rng::randint_at(keys[1], static_cast<std::uint64_t>(m), 0, count);
        int d = 0;
        for (; d < 4; ++d) {
            if (mask[static_cast<std::size_t>(d)] && pick-- == 0) {
                break;
            }
        }
        const int sr = out.blank_row - kDr[d];
        const int sc = out.blank_col - kDc[d];
        std::swap(out.tiles[static_cast<std::size_t>(sr * g + sc)],
                  out.tiles[static_cast<std::size_t>(out.blank_row * g + out.blank_col)]);
        out.blank_row = sr;
        out.blank_col = sc;
    }
}

void SlidingTile::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("sliding_tile: stepping a terminal state");
    }
    const int d = static_cast<int>(a.at(0));
    if (d < 0 || d > 3) {
        throw InvalidActionError("sliding_tile: action must be in 0..3");
    }
    const int g = grid_size_;
    const int sr = s.blank_row - kDr[d];
    const int sc = s.blank_col - kDc[d];
    if (sr < 0 || sr >= g || sc < 0 || sc >= g) {
        throw InvalidActionError("sliding_tile: no tile can move in that direction (masked invalid)");
    }
    const int src = sr * g + sc;
    const int dst = s.blank_row * g + s.blank_col;
    const std::int32_t tile = s.tiles[static_cast<std::size_t>(src)];
    const bool was_correct = tile == src;
    const bool now_correct = tile == dst;
    s.tiles[static_cast<std::size_t>(dst)] = tile;
    s.tiles[static_cast<std::size_t>(src)] = 0;
    s.blank_row = sr;
    s.blank_col = sc;
    s.step_count += 1;

    rec.reward = static_cast<double>((now_correct ? 1 : 0) - (was_correct ? 1 : 0));
    if (solved(s)) {
        s.done = true;
        rec.type = StepType::Last;
        rec.discount = 0.0;
    } else if (s.step_count >= step_limit_) {
        s.done = true;
        rec.type = StepType::Last;
        rec.discount = 1.0;
    } else {
        rec.type = StepType::Mid;
        rec.discount = 1.0;
    }
}

bool SlidingTile::solved(const State& s) const {
    for (std::size_t k = 0; k < s.tiles.size(); ++k) {
        if (s.tiles[k] != static_cast<std::int32_t>(k)) {
            return false;
        }
    }
    return true;
}

double SlidingTile::prop_correct(const State& s) const {
    // The blank counts as a tile, so a solved puzzle reads exactly 1.0.
    int correct = 0;
    for (std::size_t k = 0; k < s.tiles.size(); ++k) {
        correct += s.tiles[k] == static_cast<std::int32_t>(k);
    }
    return static_cast<double>(correct) / static_cast<double>(s.tiles.size());
}

Value SlidingTile::observe(const State& s) const {
    std::vector<std::int64_t> tiles(s.tiles.begin(), s.tiles.end());
    const auto mask = action_mask(s);
    std::vector<std::int64_t> mask_i(mask.begin(), mask.end());
    return Value::map({
        {"tiles", Value::tensor_i({grid_size_, grid_size_}, std::move(tiles))},
        {"blank_position", Value::tensor_i({2}, {s.blank_row, s.blank_col})},
        {"action_mask", Value::tensor_i({4}, std::move(mask_i))},
        {"step_count", Value::scalar_i(s.step_count)},
    });
}

void SlidingTile::metrics_into(const State& s, Extras& out) const {
    out.emplace_back("prop_correctly_placed", prop_correct(s));
}

Spec SlidingTile::observation_spec() const {
    const std::int64_t g = grid_size_;
    return Spec::composite({
        {"tiles", Spec::bounded({g, g}, Dtype::i64, 0, static_cast<double>(g * g - 1))},
        {"blank_position", Spec::bounded({2}, Dtype::i64, 0, static_cast<double>(g - 1))},
        {"action_mask", Spec::bounded({4}, Dtype::i64, 0, 1)},
        {"step_count", Spec::array({}, Dtype::i64)},
    });
}

void SlidingTile::flat_obs_into(const State& s, std::span<double> out) const {
    // Normalized tile ids, blank one-hot, mask.
    const int cells = grid_size_ * grid_size_;
    for (int k = 0; k < cells; ++k) {
        out[static_cast<std::size_t>(k)] =
            static_cast<double>(s.tiles[static_cast<std::size_t>(k)]) / (cells - 1);
    }
    for (int k = 0; k < cells; ++k) {
        out[static_cast<std::size_t>(cells + k)] = 0.0;
    }
    out[static_cast<std::size_t>(cells + s.blank_row * grid_size_ + s.blank_col)] = 1.0;
    const auto mask = action_mask(s);
    for (int d = 0; d < 4; ++d) {
        out[static_cast<std::size_t>(2 * cells + d)] = mask[static_cast<std::size_t>(d)] ? 1.0 : 0.0;
    }
}

RenderOut SlidingTile::render(const State& s) const {
    const int g = grid_size_;
    Raster img = Raster::for_grid(g, g);
    for (int r = 0; r < g; ++r) {
        for (int c = 0; c < g; ++c) {
            const std::int32_t tile = s.tiles[static_cast<std::size_t>(r * g + c)];
            if (tile == 0) {
                img.fill_cell(r, c, 30, 30, 30);
            } else {
                const auto shade = static_cast<std::uint8_t>(80 + (tile * 175) / (g * g - 1));
                img.fill_cell(r, c, shade, shade, 255);
                if (tile == r * g + c) {
                    img.fill_cell_inset(r, c, 6, 40, 200, 40); // marker: tile in place
                }
            }
        }
    }
    return img.to_render_out();
}

SlidingTile::Slab::Slab(const SlidingTile& env, int batch)
    : stride_(env.grid_size() * env.grid_size()),
      tiles_(static_cast<std::size_t>(batch) * stride_),
      blanks_(static_cast<std::size_t>(batch) * 2),
      steps_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void SlidingTile::Slab::store(int i, const State& s) {
    std::copy(s.tiles.begin(), s.tiles.end(),
              tiles_.begin() + static_cast<std::ptrdiff_t>(i) * stride_);
    blanks_[static_cast<std::size_t>(i) * 2] = s.blank_row;
    blanks_[static_cast<std::size_t>(i) * 2 + 1] = s.blank_col;
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void SlidingTile::Slab::load_into(int i, State& out) const {
    out.tiles.assign(tiles_.begin() + static_cast<std::ptrdiff_t>(i) * stride_,
                     tiles_.begin() + static_cast<std::ptrdiff_t>(i + 1) * stride_);
    out.blank_row = blanks_[static_cast<std::size_t>(i) * 2];
    out.blank_col = blanks_[static_cast<std::size_t>(i) * 2 + 1];
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_sliding_tile(const std::string& id, const Params& params) {
    return make_env(id, SlidingTile(params));
}

} // namespace envkit::envs
