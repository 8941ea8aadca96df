#include "envkit/envs/snake.hpp"

#include <algorithm>

#include "envkit/render.hpp"

namespace envkit::envs {
namespace {

constexpr int kDr[4] = {-1, 0, 1, 0}; // up, right, down, left
constexpr int kDc[4] = {0, 1, 0, -1};

} // namespace

Snake::Snake(const Params& params)
    : grid_size_(static_cast<int>(params.get_int("grid_size", 12))),
      horizon_(static_cast<int>(params.get_int("horizon", 4000))) {
    if (grid_size_ < 2) {
        throw InvalidArgumentError("snake: grid_size must be >= 2");
    }
    if (horizon_ < 0) {
        throw InvalidArgumentError("snake: horizon must be >= 0 (0 = unlimited)");
    }
}

void Snake::reset_into(rng::Key key, State& out) const {
    const auto keys = rng::split(key, 2);
    const int cells = grid_size_ * grid_size_;
    const auto head = rng::randint_at(keys[1], 0, 0, cells);
    auto fruit = rng::randint_at(keys[1], 1, 0, cells - 1);
    if (fruit >= head) {
        ++fruit;
    }
    out.body.assign(1, static_cast<std::int32_t>(head));
    out.fruit = static_cast<std::int32_t>(fruit);
    out.step_count = 0;
    out.key = keys[0];
    out.done = false;
}

std::vector<char> Snake::action_mask(const State& s) const {
    std::vector<char> mask(4, 1);
    if (s.body.size() >= 2) {
        const std::int32_t head = s.body[0];
        const std::int32_t neck = s.body[1];
        const int hr = head / grid_size_, hc = head % grid_size_;
        for (int d = 0; d < 4; ++d) {
            const int nr = hr + kDr[d];
            const int nc = hc + kDc[d];
            if (nr == neck / grid_size_ && nc == neck % grid_size_) {
                mask[static_cast<std::size_t>(d)] = 0;
            }
        }
    }
    return mask;
}

void Snake::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("snake: stepping a terminal state");
    }
    const int d = static_cast<int>(a.at(0));
    if (d < 0 || d > 3) {
        throw InvalidActionError("snake: action must be in 0..3");
    }
    if (!action_mask(s)[static_cast<std::size_t>(d)]) {
        throw InvalidActionError("snake: reversing into the neck (masked invalid)");
    }
    const auto keys = rng::split(s.key, 2);
    s.key = keys[0];

    const int g = grid_size_;
    const std::int32_t head = s.body[0];
    const int nr = head / g + kDr[d];
    const int nc = head % g + kDc[d];
    s.step_count += 1;

    if (nr < 0 || nr >= g || nc < 0 || nc >= g) {
        s.done = true;
        rec = StepRecord{StepType::Last, 0.0, 0.0};
        return;
    }
    const std::int32_t target = static_cast<std::int32_t>(nr * g + nc);
    const bool eat = target == s.fruit;
    // Collision check excludes the tail cell when it vacates this step.
    const std::size_t occupied = eat ? s.body.size() : s.body.size() - 1;
    for (std::size_t k = 0; k < occupied; ++k) {
        if (s.body[k] == target) {
            s.done = true;
            rec = StepRecord{StepType::Last, 0.0, 0.0};
            return;
        }
    }

    s.body.insert(s.body.begin(), target);
    if (!eat) {
        s.body.pop_back();
        rec = StepRecord{StepType::Mid, 0.0, 1.0};
    } else {
        rec = StepRecord{StepType::Mid, 1.0, 1.0};
        if (static_cast<int>(s.body.size()) == g * g) {
            s.done = true;
            rec = StepRecord{StepType::Last, 1.0, 0.0}; // board full: won
            return;
        }
        // Spawn a new fruit on the k-th empty cell (row-major scan).
        const int empties = g * g - static_cast<int>(s.body.size());
        auto pick = rng::randint_at(keys[1], 0, 0, empties);
        std::vector<char> blocked(static_cast<std::size_t>(g) * g, 0);
        for (std::int32_t cell : s.body) {
            blocked[static_cast<std::size_t>(cell)] = 1;
        }
        for (std::int32_t cell = 0; cell < g * g; ++cell) {
            if (!blocked[static_cast<std::size_t>(cell)] && pick-- == 0) {
                s.fruit = cell;
                break;
            }
        }
    }
    if (horizon_ > 0 && s.step_count >= horizon_ && !s.done) {
        s.done = true;
        rec.type = StepType::Last;
        rec.discount = 1.0;
    }
}

void Snake::write_channels(const State& s, std::span<double> grid) const {
    const int cells = grid_size_ * grid_size_;
    std::fill(grid.begin(), grid.begin() + 4 * cells, 0.0);
    grid[static_cast<std::size_t>(s.body[0])] = 1.0; // head plane
    for (std::size_t k = 1; k + 1 < s.body.size(); ++k) {
        grid[static_cast<std::size_t>(cells + s.body[k])] = 1.0; // body plane
    }
    if (s.body.size() >= 2) {
        grid[static_cast<std::size_t>(2 * cells + s.body.back())] = 1.0; // tail plane
    }
    grid[static_cast<std::size_t>(3 * cells + s.fruit)] = 1.0; // fruit plane
    const double frac = horizon_ > 0
                            ? static_cast<double>(s.step_count) / static_cast<double>(horizon_)
                            : 0.0;
    std::fill(grid.begin() + 4 * cells, grid.begin() + 5 * cells, frac);
}

Value Snake::observe(const State& s) const {
    std::vector<double> grid(static_cast<std::size_t>(5 * grid_size_ * grid_size_));
    write_channels(s, grid);
    const auto mask = action_mask(s);
    std::vector<std::int64_t> mask_i(mask.begin(), mask.end());
    return Value::map({
        {"grid", Value::tensor_f({5, grid_size_, grid_size_}, std::move(grid))},
        {"action_mask", Value::tensor_i({4}, std::move(mask_i))},
        {"step_count", Value::scalar_i(s.step_count)},
    });
}

void Snake::metrics_into(const State& s, Extras& out) const {
    out.emplace_back("length", static_cast<double>(s.body.size()));
}

Spec Snake::observation_spec() const {
    return Spec::composite({
        {"grid", Spec::bounded({5, grid_size_, grid_size_}, Dtype::f64, 0.0, 1.0)},
        {"action_mask", Spec::bounded({4}, Dtype::i64, 0, 1)},
        {"step_count", Spec::array({}, Dtype::i64)},
    });
}

void Snake::flat_obs_into(const State& s, std::span<double> out) const {
    // 5-channel grid, mask, then hand features standing in for a conv
    // trunk: normalized fruit offset from the head, per-direction fatality
    // flags and per-direction fruit-approach deltas. All derived from the
    // grid channels.
    const int g = grid_size_;
    const int cells = g * g;
    write_channels(s, out.subspan(0, static_cast<std::size_t>(5 * cells)));
    const auto mask = action_mask(s);
    for (int d = 0; d < 4; ++d) {
        out[static_cast<std::size_t>(5 * cells + d)] = mask[static_cast<std::size_t>(d)] ? 1.0 : 0.0;
    }
    const int hr = s.body[0] / g, hc = s.body[0] % g;
    const int fr = s.fruit / g, fc = s.fruit % g;
    out[static_cast<std::size_t>(5 * cells + 4)] = static_cast<double>(fr - hr) / g;
    out[static_cast<std::size_t>(5 * cells + 5)] = static_cast<double>(fc - hc) / g;
    for (int d = 0; d < 4; ++d) {
        const int nr = hr + kDr[d], nc = hc + kDc[d];
        bool fatal = nr < 0 || nr >= g || nc < 0 || nc >= g;
        if (!fatal) {
            const std::int32_t cell = static_cast<std::int32_t>(nr * g + nc);
            const bool eats = cell == s.fruit;
            const std::size_t occupied = eats ? s.body.size() : s.body.size() - 1;
            for (std::size_t k = 0; k < occupied; ++k) {
                if (s.body[k] == cell) {
                    fatal = true;
                    break;
                }
            }
        }
        out[static_cast<std::size_t>(5 * cells + 6 + d)] = fatal ? 1.0 : 0.0;
        const double before = std::abs(fr - hr) + std::abs(fc - hc);
        const double after = std::abs(fr - (hr + kDr[d])) + std::abs(fc - (hc + kDc[d]));
        out[static_cast<std::size_t>(5 * cells + 10 + d)] = (before - after + 1.0) / 2.0;
    }
}

RenderOut Snake::render(const State& s) const {
    const int g = grid_size_;
    Raster img = Raster::for_grid(g, g);
    for (std::size_t k = 1; k < s.body.size(); ++k) {
        img.fill_cell(s.body[k] / g, s.body[k] % g, 80, 160, 80);
    }
    img.fill_cell(s.body[0] / g, s.body[0] % g, 30, 110, 30);
    if (!s.done || s.fruit != s.body[0]) {
        img.fill_cell_inset(s.fruit / g, s.fruit % g, 4, 220, 50, 50);
    }
    return img.to_render_out();
}

Snake::Slab::Slab(const Snake& env, int batch)
    : capacity_(env.grid_size() * env.grid_size()),
      bodies_(static_cast<std::size_t>(batch) * capacity_),
      lengths_(static_cast<std::size_t>(batch)),
      fruits_(static_cast<std::size_t>(batch)),
      steps_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void Snake::Slab::store(int i, const State& s) {
    std::copy(s.body.begin(), s.body.end(),
              bodies_.begin() + static_cast<std::ptrdiff_t>(i) * capacity_);
    lengths_[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(s.body.size());
    fruits_[static_cast<std::size_t>(i)] = s.fruit;
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void Snake::Slab::load_into(int i, State& out) const {
    const auto len = lengths_[static_cast<std::size_t>(i)];
    out.body.assign(bodies_.begin() + static_cast<std::ptrdiff_t>(i) * capacity_,
                    bodies_.begin() + static_cast<std::ptrdiff_t>(i) * capacity_ + len);
    out.fruit = fruits_[static_cast<std::size_t>(i)];
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_snake(const std::string& id, const Params& params) {
    return make_env(id, Snake(params));
}

} // namespace envkit::envs
