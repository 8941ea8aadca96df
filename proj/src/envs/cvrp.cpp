#include "envkit/envs/cvrp.hpp"

#include <cmath>

#include "envkit/render.hpp"

namespace envkit::envs {
namespace {

double edge(std::span<const double> xy, std::int32_t a, std::int32_t b) {
    const double dx = xy[static_cast<std::size_t>(2 * a)] - xy[static_cast<std::size_t>(2 * b)];
    const double dy = xy[static_cast<std::size_t>(2 * a + 1)] - xy[static_cast<std::size_t>(2 * b + 1)];
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace

Cvrp::Cvrp(const Params& params)
    : num_customers_(static_cast<int>(params.get_int("num_customers", 20))),
      capacity_(static_cast<int>(params.get_int("capacity", 30))),
      max_demand_(static_cast<int>(params.get_int("max_demand", 9))),
      dense_reward_(params.get_int("dense_reward", 0) != 0) {
    if (num_customers_ < 1) {
        throw InvalidArgumentError("cvrp: num_customers must be >= 1");
    }
    if (max_demand_ < 1 || capacity_ < max_demand_) {
        throw InvalidArgumentError("cvrp: requires 1 <= max_demand <= capacity");
    }
}

void Cvrp::reset_into(rng::Key key, State& out) const {
    const auto keys = rng::split(key, 3);
    const int nodes = num_customers_ + 1;
    out.coords_xy.resize(static_cast<std::size_t>(2 * nodes));
    for (int i = 0; i < 2 * nodes; ++i) {
        out.coords_xy[static_cast<std::size_t>(i)] =
            rng::uniform01(keys[1], static_cast<std::uint64_t>(i));
    }
    out.demands.resize(static_cast<std::size_t>(num_customers_));
    for (int c = 0; c < num_customers_; ++c) {
        out.demands[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(
            rng::randint_at(keys[2], static_cast<std::uint64_t>(c), 1, max_demand_ + 1));
    }
    out.remaining_capacity = capacity_;
    out.position = 0;
    out.route.assign(1, 0);
    out.route_length = 0.0;
    out.step_count = 0;
    out.key = keys[0];
    out.done = false;
}

std::vector<char> Cvrp::action_mask(const State& s) const {
    std::vector<char> mask(static_cast<std::size_t>(num_customers_ + 1), 0);
    mask[0] = s.position != 0 ? 1 : 0;
    for (int c = 0; c < num_customers_; ++c) {
        const auto d = s.demands[static_cast<std::size_t>(c)];
        mask[static_cast<std::size_t>(c + 1)] = (d > 0 && d <= s.remaining_capacity) ? 1 : 0;
    }
    return mask;
}

void Cvrp::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("cvrp: stepping a terminal state");
    }
    const auto node = a.at(0);
    if (node < 0 || node > num_customers_) {
        throw InvalidActionError("cvrp: node index out of range");
    }
    if (node == 0) {
        if (s.position == 0) {
            throw InvalidActionError("cvrp: already at the depot (masked invalid)");
        }
    } else {
        const auto d = s.demands[static_cast<std::size_t>(node - 1)];
        if (d == 0) {
            throw InvalidActionError("cvrp: customer already served (masked invalid)");
        }
        if (d > s.remaining_capacity) {
            throw InvalidActionError("cvrp: demand exceeds remaining capacity (masked invalid)");
        }
    }

    const double step_len = edge(s.coords_xy, s.position, static_cast<std::int32_t>(node));
    s.route_length += step_len;
    s.position = static_cast<std::int32_t>(node);
    s.route.push_back(static_cast<std::int32_t>(node));
    s.step_count += 1;

    bool all_served = true;
    if (node == 0) {
        s.remaining_capacity = capacity_;
    } else {
        s.remaining_capacity -= s.demands[static_cast<std::size_t>(node - 1)];
        s.demands[static_cast<std::size_t>(node - 1)] = 0;
    }
    for (std::int32_t d : s.demands) {
        if (d > 0) {
            all_served = false;
            break;
        }
    }

    double reward = dense_reward_ ? -step_len : 0.0;
    if (all_served && s.position == 0) {
        s.done = true;
        if (!dense_reward_) {
            reward = -s.route_length;
        }
        rec = StepRecord{StepType::Last, reward, 0.0};
    } else {
        rec = StepRecord{StepType::Mid, reward, 1.0};
    }
}

Value Cvrp::observe(const State& s) const {
    std::vector<double> coords(s.coords_xy.begin(), s.coords_xy.end());
    std::vector<std::int64_t> demands(s.demands.begin(), s.demands.end());
    const auto mask = action_mask(s);
    std::vector<std::int64_t> mask_i(mask.begin(), mask.end());
    return Value::map({
        {"coordinates", Value::tensor_f({num_customers_ + 1, 2}, std::move(coords))},
        {"demands", Value::tensor_i({num_customers_}, std::move(demands))},
        {"position", Value::scalar_i(s.position)},
        {"remaining_capacity", Value::scalar_i(s.remaining_capacity)},
        {"action_mask", Value::tensor_i({num_customers_ + 1}, std::move(mask_i))},
    });
}

void Cvrp::metrics_into(const State& s, Extras& out) const {
    int served = 0;
    for (std::int32_t d : s.demands) {
        served += d == 0;
    }
    out.emplace_back("num_served", static_cast<double>(served));
}

Spec Cvrp::observation_spec() const {
    return Spec::composite({
        {"coordinates", Spec::bounded({num_customers_ + 1, 2}, Dtype::f64, 0.0, 1.0)},
        {"demands", Spec::bounded({num_customers_}, Dtype::i64, 0, max_demand_)},
        {"position", Spec::bounded({}, Dtype::i64, 0, num_customers_)},
        {"remaining_capacity", Spec::bounded({}, Dtype::i64, 0, capacity_)},
        {"action_mask", Spec::bounded({num_customers_ + 1}, Dtype::i64, 0, 1)},
    });
}

void Cvrp::flat_obs_into(const State& s, std::span<double> out) const {
    // coords (2N+2), scaled demands (N), position one-hot (N+1), capacity
    // fraction (1), mask (N+1).
    const std::size_t n = static_cast<std::size_t>(num_customers_);
    std::size_t w = 0;
    for (std::size_t k = 0; k < 2 * (n + 1); ++k) {
        out[w++] = s.coords_xy[k];
    }
    for (std::size_t c = 0; c < n; ++c) {
        out[w++] = static_cast<double>(s.demands[c]) / max_demand_;
    }
    for (std::size_t k = 0; k <= n; ++k) {
        out[w++] = 0.0;
    }
    out[w - (n + 1) + static_cast<std::size_t>(s.position)] = 1.0;
    out[w++] = static_cast<double>(s.remaining_capacity) / capacity_;
    const auto mask = action_mask(s);
    for (std::size_t k = 0; k <= n; ++k) {
        out[w++] = mask[k] ? 1.0 : 0.0;
    }
}

RenderOut Cvrp::render(const State& s) const {
    SvgBuilder svg;
    // Trips drawn in alternating colors, split at depot visits.
    static const char* kTripColors[4] = {"#4060c0", "#c06040", "#40a060", "#a040a0"};
    std::vector<std::pair<double, double>> seg;
    int trip = 0;
    for (std::size_t k = 0; k < s.route.size(); ++k) {
        const std::int32_t node = s.route[k];
        seg.emplace_back(s.coords_xy[static_cast<std::size_t>(2 * node)],
                         s.coords_xy[static_cast<std::size_t>(2 * node) + 1]);
        if (node == 0 && seg.size() > 1) {
            svg.add_polyline(seg, kTripColors[trip++ % 4], 2.0);
            seg.clear();
            seg.emplace_back(s.coords_xy[0], s.coords_xy[1]);
        }
    }
    if (seg.size() > 1) {
        svg.add_polyline(seg, kTripColors[trip % 4], 2.0);
    }
    svg.add_rect(s.coords_xy[0], s.coords_xy[1], 10.0, 10.0, "#202020");
    for (int c = 0; c < num_customers_; ++c) {
        const bool served = s.demands[static_cast<std::size_t>(c)] == 0;
        svg.add_circle(s.coords_xy[static_cast<std::size_t>(2 * (c + 1))],
                       s.coords_xy[static_cast<std::size_t>(2 * (c + 1)) + 1], 4.0,
                       served ? "#808080" : "#c03030");
    }
    return svg.to_render_out();
}

Cvrp::Slab::Slab(const Cvrp& env, int batch)
    : n_(env.num_customers()),
      route_cap_(env.route_capacity()),
      coords_(static_cast<std::size_t>(batch) * 2 * (n_ + 1)),
      demands_(static_cast<std::size_t>(batch) * n_),
      capacities_(static_cast<std::size_t>(batch)),
      positions_(static_cast<std::size_t>(batch)),
      routes_(static_cast<std::size_t>(batch) * route_cap_),
      route_lens_(static_cast<std::size_t>(batch)),
      lengths_(static_cast<std::size_t>(batch)),
      steps_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void Cvrp::Slab::store(int i, const State& s) {
    std::copy(s.coords_xy.begin(), s.coords_xy.end(),
              coords_.begin() + static_cast<std::ptrdiff_t>(i) * 2 * (n_ + 1));
    std::copy(s.demands.begin(), s.demands.end(),
              demands_.begin() + static_cast<std::ptrdiff_t>(i) * n_);
    capacities_[static_cast<std::size_t>(i)] = s.remaining_capacity;
    positions_[static_cast<std::size_t>(i)] = s.position;
    std::copy(s.route.begin(), s.route.end(),
              routes_.begin() + static_cast<std::ptrdiff_t>(i) * route_cap_);
    route_lens_[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(s.route.size());
    lengths_[static_cast<std::size_t>(i)] = s.route_length;
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void Cvrp::Slab::load_into(int i, State& out) const {
    out.coords_xy.assign(coords_.begin() + static_cast<std::ptrdiff_t>(i) * 2 * (n_ + 1),
                         coords_.begin() + static_cast<std::ptrdiff_t>(i + 1) * 2 * (n_ + 1));
    out.demands.assign(demands_.begin() + static_cast<std::ptrdiff_t>(i) * n_,
                       demands_.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_);
    out.remaining_capacity = capacities_[static_cast<std::size_t>(i)];
    out.position = positions_[static_cast<std::size_t>(i)];
    const auto len = route_lens_[static_cast<std::size_t>(i)];
    out.route.assign(routes_.begin() + static_cast<std::ptrdiff_t>(i) * route_cap_,
                     routes_.begin() + static_cast<std::ptrdiff_t>(i) * route_cap_ + len);
    out.route_length = lengths_[static_cast<std::size_t>(i)];
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_cvrp(const std::string& id, const Params& params) {
    return make_env(id, Cvrp(params));
}

} // namespace envkit::envs
