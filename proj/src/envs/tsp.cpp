#include "envkit/envs/tsp.hpp"

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

double tour_length(std::span<const double> coords_xy, std::span<const std::int32_t> order) {
    const std::size_t n = coords_xy.size() / 2;
    if (order.size() != n) {
        throw InvalidArgumentError("tour_length: order must cover every city");
    }
    std::vector<char> seen(n, 0);
    for (std::int32_t c : order) {
        if (c < 0 || static_cast<std::size_t>(c) >= n || seen[static_cast<std::size_t>(c)]) {
            throw InvalidArgumentError("tour_length: order is not a permutation");
        }
        seen[static_cast<std::size_t>(c)] = 1;
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        total += edge(coords_xy, order[k], order[k + 1]);
    }
    total += edge(coords_xy, order[order.size() - 1], order[0]);
    return total;
}

Tsp::Tsp(const Params& params)
    : num_cities_(static_cast<int>(params.get_int("num_cities", 20))),
      dense_reward_(params.get_int("dense_reward", 0) != 0),
      source_(gen::compile_generator(gen::generator_spec_from_params(params, num_cities_))) {
    if (num_cities_ < 2) {
        throw InvalidArgumentError("tsp: num_cities must be >= 2");
    }
}

void Tsp::reset_into(rng::Key key, State& out) const {
    const auto keys = rng::split(key, 2);
    const auto pts = source_(keys[1]);
    out.coords_xy.resize(static_cast<std::size_t>(2 * num_cities_));
    for (int i = 0; i < num_cities_; ++i) {
        out.coords_xy[static_cast<std::size_t>(2 * i)] = pts[static_cast<std::size_t>(i)][0];
        out.coords_xy[static_cast<std::size_t>(2 * i) + 1] = pts[static_cast<std::size_t>(i)][1];
    }
    out.visited.assign(static_cast<std::size_t>(num_cities_), 0);
    out.trajectory.clear();
    out.position = -1;
    out.step_count = 0;
    out.key = keys[0];
    out.done = false;
}

std::vector<char> Tsp::action_mask(const State& s) const {
    std::vector<char> mask(static_cast<std::size_t>(num_cities_));
    for (int c = 0; c < num_cities_; ++c) {
        mask[static_cast<std::size_t>(c)] = s.visited[static_cast<std::size_t>(c)] ? 0 : 1;
    }
    return mask;
}

void Tsp::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("tsp: stepping a terminal state");
    }
    const auto city = a.at(0);
    if (city < 0 || city >= num_cities_) {
        throw InvalidActionError("tsp: city index out of range");
    }
    if (s.visited[static_cast<std::size_t>(city)]) {
        throw InvalidActionError("tsp: city already visited (masked invalid)");
    }
    double reward = 0.0;
    if (dense_reward_ && s.position >= 0) {
        reward -= edge(s.coords_xy, s.position, static_cast<std::int32_t>(city));
    }
    s.visited[static_cast<std::size_t>(city)] = 1;
    s.trajectory.push_back(static_cast<std::int32_t>(city));
    s.position = static_cast<std::int32_t>(city);
    s.step_count += 1;

    if (static_cast<int>(s.trajectory.size()) == num_cities_) {
        s.done = true;
        if (dense_reward_) {
            reward -= edge(s.coords_xy, s.trajectory.back(), s.trajectory.front());
        } else {
            reward = -tour_length(s.coords_xy, s.trajectory);
        }
        rec = StepRecord{StepType::Last, reward, 0.0};
    } else {
        rec = StepRecord{StepType::Mid, reward, 1.0};
    }
}

Value Tsp::observe(const State& s) const {
    std::vector<double> coords(s.coords_xy.begin(), s.coords_xy.end());
    std::vector<std::int64_t> traj(static_cast<std::size_t>(num_cities_), -1);
    for (std::size_t k = 0; k < s.trajectory.size(); ++k) {
        traj[k] = s.trajectory[k];
    }
    const auto mask = action_mask(s);
    std::vector<std::int64_t> mask_i(mask.begin(), mask.end());
    return Value::map({
        {"coordinates", Value::tensor_f({num_cities_, 2}, std::move(coords))},
        {"position", Value::scalar_i(s.position)},
        {"trajectory", Value::tensor_i({num_cities_}, std::move(traj))},
        {"action_mask", Value::tensor_i({num_cities_}, std::move(mask_i))},
    });
}

void Tsp::metrics_into(const State& s, Extras& out) const {
    out.emplace_back("num_visited", static_cast<double>(s.trajectory.size()));
}

Spec Tsp::observation_spec() const {
    const double n = num_cities_;
    return Spec::composite({
        {"coordinates", Spec::bounded({num_cities_, 2}, Dtype::f64, 0.0, 1.0)},
        {"position", Spec::bounded({}, Dtype::i64, -1, n - 1)},
        {"trajectory", Spec::bounded({num_cities_}, Dtype::i64, -1, n - 1)},
        {"action_mask", Spec::bounded({num_cities_}, Dtype::i64, 0, 1)},
    });
}

void Tsp::flat_obs_into(const State& s, std::span<double> out) const {
    // coords (2N), position one-hot (N), visited (N), mask (N), distance
    // from the current city to each city (N, zeros before the first move).
    const std::size_t n = static_cast<std::size_t>(num_cities_);
    for (std::size_t k = 0; k < 2 * n; ++k) {
        out[k] = s.coords_xy[k];
    }
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(2 * n),
              out.begin() + static_cast<std::ptrdiff_t>(3 * n), 0.0);
    if (s.position >= 0) {
        out[2 * n + static_cast<std::size_t>(s.position)] = 1.0;
    }
    for (std::size_t c = 0; c < n; ++c) {
        out[3 * n + c] = s.visited[c] ? 1.0 : 0.0;
        out[4 * n + c] = s.visited[c] ? 0.0 : 1.0;
        out[5 * n + c] = s.position >= 0
                             ? edge(s.coords_xy, s.position, static_cast<std::int32_t>(c))
                             : 0.0;
    }
}

RenderOut Tsp::render(const State& s) const {
    SvgBuilder svg;
    std::vector<std::pair<double, double>> path;
    for (std::int32_t c : s.trajectory) {
        path.emplace_back(s.coords_xy[static_cast<std::size_t>(2 * c)],
                          s.coords_xy[static_cast<std::size_t>(2 * c) + 1]);
    }
    svg.add_polyline(path, "#4060c0", 2.0, s.done);
    for (int c = 0; c < num_cities_; ++c) {
        const bool visited = s.visited[static_cast<std::size_t>(c)] != 0;
        svg.add_circle(s.coords_xy[static_cast<std::size_t>(2 * c)],
                       s.coords_xy[static_cast<std::size_t>(2 * c) + 1], 4.0,
                       visited ? "#808080" : "#202020");
    }
    if (s.position >= 0) {
        svg.add_circle(s.coords_xy[static_cast<std::size_t>(2 * s.position)],
                       s.coords_xy[static_cast<std::size_t>(2 * s.position) + 1], 6.0, "#c03030");
    }
    return svg.to_render_out();
}

Tsp::Slab::Slab(const Tsp& env, int batch)
    : n_(env.num_cities()),
      coords_(static_cast<std::size_t>(batch) * 2 * n_),
      visited_(static_cast<std::size_t>(batch) * n_),
      trajectories_(static_cast<std::size_t>(batch) * n_),
      traj_lens_(static_cast<std::size_t>(batch)),
      positions_(static_cast<std::size_t>(batch)),
      steps_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void Tsp::Slab::store(int i, const State& s) {
    std::copy(s.coords_xy.begin(), s.coords_xy.end(),
              coords_.begin() + static_cast<std::ptrdiff_t>(i) * 2 * n_);
    std::copy(s.visited.begin(), s.visited.end(),
              visited_.begin() + static_cast<std::ptrdiff_t>(i) * n_);
    std::copy(s.trajectory.begin(), s.trajectory.end(),
              trajectories_.begin() + static_cast<std::ptrdiff_t>(i) * n_);
    traj_lens_[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(s.trajectory.size());
    positions_[static_cast<std::size_t>(i)] = s.position;
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void Tsp::Slab::load_into(int i, State& out) const {
    out.coords_xy.assign(coords_.begin() + static_cast<std::ptrdiff_t>(i) * 2 * n_,
                         coords_.begin() + static_cast<std::ptrdiff_t>(i + 1) * 2 * n_);
    out.visited.assign(visited_.begin() + static_cast<std::ptrdiff_t>(i) * n_,
                       visited_.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_);
    const auto len = traj_lens_[static_cast<std::size_t>(i)];
    out.trajectory.assign(trajectories_.begin() + static_cast<std::ptrdiff_t>(i) * n_,
                          trajectories_.begin() + static_cast<std::ptrdiff_t>(i) * n_ + len);
    out.position = positions_[static_cast<std::size_t>(i)];
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_tsp(const std::string& id, const Params& params) {
    return make_env(id, Tsp(params));
}

} // namespace envkit::envs
