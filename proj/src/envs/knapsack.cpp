#include "envkit/envs/knapsack.hpp"

#include <algorithm>
#include <cmath>

#include "envkit/render.hpp"

namespace envkit::envs {

Knapsack::Knapsack(const Params& params)
    : num_items_(static_cast<int>(params.get_int("num_items", 50))),
      capacity_(params.get_double("capacity", 12.5)) {
    if (num_items_ < 1) {
        throw InvalidArgumentError("knapsack: num_items must be >= 1");
    }
    if (!(capacity_ > 0)) {
        throw InvalidArgumentError("knapsack: capacity must be > 0");
    }
}

void Knapsack::reset_into(rng::Key key, State& out) const {
    const auto keys = rng::split(key, 2);
    out.weights.resize(static_cast<std::size_t>(num_items_));
    out.values.resize(static_cast<std::size_t>(num_items_));
    for (int i = 0; i < num_items_; ++i) {
        // open01 keeps weights and values strictly inside (0,1)
        out.weights[static_cast<std::size_t>(i)] =
            rng::open01(keys[1], 2 * static_cast<std::uint64_t>(i));
        out.values[static_cast<std::size_t>(i)] =
            rng::open01(keys[1], 2 * static_cast<std::uint64_t>(i) + 1);
    }
    out.packed.assign(static_cast<std::size_t>(num_items_), 0);
    out.remaining_budget = capacity_;
    out.step_count = 0;
    out.key = keys[0];
    out.done = false;
}

std::vector<char> Knapsack::action_mask(const State& s) const {
    std::vector<char> mask(static_cast<std::size_t>(num_items_));
    for (int i = 0; i < num_items_; ++i) {
        mask[static_cast<std::size_t>(i)] =
            (!s.packed[static_cast<std::size_t>(i)] &&
             s.weights[static_cast<std::size_t>(i)] <= s.remaining_budget)
                ? 1
                : 0;
    }
    return mask;
}

void Knapsack::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("knapsack: stepping a terminal state");
    }
    const auto item = a.at(0);
    if (item < 0 || item >= num_items_) {
        throw InvalidActionError("knapsack: item index out of range");
    }
    if (s.packed[static_cast<std::size_t>(item)]) {
        throw InvalidActionError("knapsack: item already packed (masked invalid)");
    }
    if (s.weights[static_cast<std::size_t>(item)] > s.remaining_budget) {
        throw InvalidActionError("knapsack: item does not fit (masked invalid)");
    }
    s.packed[static_cast<std::size_t>(item)] = 1;
    s.remaining_budget -= s.weights[static_cast<std::size_t>(item)];
    s.step_count += 1;
    const double reward = s.values[static_cast<std::size_t>(item)];

    bool any_fits = false;
    for (int i = 0; i < num_items_; ++i) {
        if (!s.packed[static_cast<std::size_t>(i)] &&
            s.weights[static_cast<std::size_t>(i)] <= s.remaining_budget) {
            any_fits = true;
            break;
        }
    }
    if (!any_fits) {
        s.done = true;
        rec = StepRecord{StepType::Last, reward, 0.0};
    } else {
        rec = StepRecord{StepType::Mid, reward, 1.0};
    }
}

Value Knapsack::observe(const State& s) const {
    std::vector<double> weights(s.weights.begin(), s.weights.end());
    std::vector<double> values(s.values.begin(), s.values.end());
    std::vector<std::int64_t> packed(s.packed.begin(), s.packed.end());
    const auto mask = action_mask(s);
    std::vector<std::int64_t> mask_i(mask.begin(), mask.end());
    return Value::map({
        {"weights", Value::tensor_f({num_items_}, std::move(weights))},
        {"values", Value::tensor_f({num_items_}, std::move(values))},
        {"packed", Value::tensor_i({num_items_}, std::move(packed))},
        {"remaining_budget", Value::scalar_f(s.remaining_budget)},
        {"action_mask", Value::tensor_i({num_items_}, std::move(mask_i))},
    });
}

void Knapsack::metrics_into(const State& s, Extras& out) const {
    double total = 0.0;
    for (int i = 0; i < num_items_; ++i) {
        if (s.packed[static_cast<std::size_t>(i)]) {
            total += s.values[static_cast<std::size_t>(i)];
        }
    }
    out.emplace_back("total_value", total);
    out.emplace_back("utilization", (capacity_ - s.remaining_budget) / capacity_);
}

Spec Knapsack::observation_spec() const {
    return Spec::composite({
        {"weights", Spec::bounded({num_items_}, Dtype::f64, 0.0, 1.0)},
        {"values", Spec::bounded({num_items_}, Dtype::f64, 0.0, 1.0)},
        {"packed", Spec::bounded({num_items_}, Dtype::i64, 0, 1)},
        {"remaining_budget", Spec::bounded({}, Dtype::f64, 0.0, capacity_)},
        {"action_mask", Spec::bounded({num_items_}, Dtype::i64, 0, 1)},
    });
}

void Knapsack::flat_obs_into(const State& s, std::span<double> out) const {
    const std::size_t n = static_cast<std::size_t>(num_items_);
    const auto mask = action_mask(s);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = s.weights[i];
        out[n + i] = s.values[i];
        out[2 * n + i] = s.packed[i] ? 1.0 : 0.0;
        out[3 * n + i] = mask[i] ? 1.0 : 0.0;
    }
    out[4 * n] = s.remaining_budget / capacity_;
}

RenderOut Knapsack::render(const State& s) const {
    // Items as a square grid of cells, green = packed, gray = unpacked,
    // shaded by value.
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_items_))));
    Raster img = Raster::for_grid(side, side);
    for (int i = 0; i < num_items_; ++i) {
        const int r = i / side, c = i % side;
        const auto v = static_cast<std::uint8_t>(80 + 175 * s.values[static_cast<std::size_t>(i)]);
        if (s.packed[static_cast<std::size_t>(i)]) {
            img.fill_cell(r, c, 40, v, 40);
        } else {
            img.fill_cell(r, c, v, v, v);
        }
    }
    return img.to_render_out();
}

Knapsack::Slab::Slab(const Knapsack& env, int batch)
    : n_(env.num_items()),
      weights_(static_cast<std::size_t>(batch) * n_),
      values_(static_cast<std::size_t>(batch) * n_),
      packed_(static_cast<std::size_t>(batch) * n_),
      budgets_(static_cast<std::size_t>(batch)),
      steps_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void Knapsack::Slab::store(int i, const State& s) {
    std::copy(s.weights.begin(), s.weights.end(),
              weights_.begin() + static_cast<std::ptrdiff_t>(i) * n_);
    std::copy(s.values.begin(), s.values.end(),
              values_.begin() + static_cast<std::ptrdiff_t>(i) * n_);
    std::copy(s.packed.begin(), s.packed.end(),
              packed_.begin() + static_cast<std::ptrdiff_t>(i) * n_);
    budgets_[static_cast<std::size_t>(i)] = s.remaining_budget;
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void Knapsack::Slab::load_into(int i, State& out) const {
    out.weights.assign(weights_.begin() + static_cast<std::ptrdiff_t>(i) * n_,
                       weights_.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_);
    out.values.assign(values_.begin() + static_cast<std::ptrdiff_t>(i) * n_,
                      values_.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_);
    out.packed.assign(packed_.begin() + static_cast<std::ptrdiff_t>(i) * n_,
                      packed_.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_);
    out.remaining_budget = budgets_[static_cast<std::size_t>(i)];
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_knapsack(const std::string& id, const Params& params) {
    return make_env(id, Knapsack(params));
}

} // namespace envkit::envs
