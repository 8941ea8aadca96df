#include "envkit/envs/jobshop.hpp"

#include <fstream>
#include <sstream>

#include "envkit/render.hpp"

namespace envkit::envs {

std::string write_jobshop_instance(const JobShopInstance& instance) {
    std::ostringstream ss;
    for (int j = 0; j < instance.num_jobs; ++j) {
        for (int k = 0; k < instance.num_ops[static_cast<std::size_t>(j)]; ++k) {
            if (k) {
                ss << " ";
            }
            ss << instance.op_machine[static_cast<std::size_t>(j * instance.max_ops + k)] << " "
               << instance.op_duration[static_cast<std::size_t>(j * instance.max_ops + k)];
        }
        ss << "\n";
    }
    return ss.str();
}

JobShopInstance parse_jobshop_instance(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::vector<std::pair<int, int>>> jobs;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::vector<std::pair<int, int>> ops;
        int machine = 0, duration = 0;
        while (ss >> machine) {
            if (!(ss >> duration)) {
                throw ParseError("jobshop line " + std::to_string(line_no) +
                                 ": machine without duration");
            }
            if (machine < 0 || duration < 1) {
                throw ParseError("jobshop line " + std::to_string(line_no) +
                                 ": machine must be >= 0 and duration >= 1");
            }
            ops.emplace_back(machine, duration);
        }
        if (!ss.eof()) {
            throw ParseError("jobshop line " + std::to_string(line_no) + ": malformed token");
        }
        if (!ops.empty()) {
            jobs.push_back(std::move(ops));
        }
    }
    if (jobs.empty()) {
        throw ParseError("jobshop: no jobs found");
    }
    JobShopInstance inst;
    inst.num_jobs = static_cast<int>(jobs.size());
    for (const auto& ops : jobs) {
        inst.max_ops = std::max(inst.max_ops, static_cast<int>(ops.size()));
        for (const auto& [m, d] : ops) {
            inst.num_machines = std::max(inst.num_machines, m + 1);
        }
    }
    inst.op_machine.assign(static_cast<std::size_t>(inst.num_jobs) * inst.max_ops, -1);
    inst.op_duration.assign(static_cast<std::size_t>(inst.num_jobs) * inst.max_ops, 0);
    inst.num_ops.resize(static_cast<std::size_t>(inst.num_jobs));
    for (int j = 0; j < inst.num_jobs; ++j) {
        inst.num_ops[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(jobs[static_cast<std::size_t>(j)].size());
        for (std::size_t k = 0; k < jobs[static_cast<std::size_t>(j)].size(); ++k) {
            inst.op_machine[static_cast<std::size_t>(j * inst.max_ops) + k] =
                jobs[static_cast<std::size_t>(j)][k].first;
            inst.op_duration[static_cast<std::size_t>(j * inst.max_ops) + k] =
                jobs[static_cast<std::size_t>(j)][k].second;
        }
    }
    return inst;
}

JobShop::JobShop(const Params& params)
    : num_jobs_(static_cast<int>(params.get_int("num_jobs", 5))),
      num_machines_(static_cast<int>(params.get_int("num_machines", 4))),
      max_ops_(static_cast<int>(params.get_int("max_ops", 4))),
      max_duration_(static_cast<int>(params.get_int("max_duration", 6))),
      horizon_(static_cast<int>(params.get_int("horizon", 0))) {
    const std::string path = params.get_string("instance_file", "");
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ParseError("cannot open jobshop instance file: " + path);
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        auto inst = parse_jobshop_instance(buffer.str());
        num_jobs_ = inst.num_jobs;
        num_machines_ = inst.num_machines;
        max_ops_ = inst.max_ops;
        max_duration_ = 1;
        for (std::int32_t d : inst.op_duration) {
            max_duration_ = std::max(max_duration_, d);
        }
        fixed_instance_ = std::make_shared<const JobShopInstance>(std::move(inst));
    }
    if (num_jobs_ < 1 || num_machines_ < 1 || max_ops_ < 1 || max_duration_ < 1) {
        throw InvalidArgumentError("jobshop: all size parameters must be >= 1");
    }
    if (horizon_ <= 0) {
        horizon_ = num_jobs_ * max_ops_ * max_duration_;
    }
}

JobShopInstance JobShop::generate_instance(rng::Key key) const {
    JobShopInstance inst;
    inst.num_jobs = num_jobs_;
    inst.num_machines = num_machines_;
    inst.max_ops = max_ops_;
    inst.op_machine.assign(static_cast<std::size_t>(num_jobs_) * max_ops_, -1);
    inst.op_duration.assign(static_cast<std::size_t>(num_jobs_) * max_ops_, 0);
    inst.num_ops.resize(static_cast<std::size_t>(num_jobs_));
    for (int j = 0; j < num_jobs_; ++j) {
        const rng::Key job_key = rng::fold_in(key, static_cast<std::uint64_t>(j));
        const auto ops = rng::randint_at(job_key, 0, 1, max_ops_ + 1);
        inst.num_ops[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(ops);
        for (int k = 0; k < ops; ++k) {
            inst.op_machine[static_cast<std::size_t>(j * max_ops_ + k)] = static_cast<std::int32_t>(
                rng::randint_at(job_key, 1 + 2 * static_cast<std::uint64_t>(k), 0, num_machines_));
            inst.op_duration[static_cast<std::size_t>(j * max_ops_ + k)] = static_cast<std::int32_t>(
                rng::randint_at(job_key, 2 + 2 * static_cast<std::uint64_t>(k), 1, max_duration_ + 1));
        }
    }
    return inst;
}

void JobShop::reset_into(rng::Key key, State& out) const {
    const auto keys = rng::split(key, 2);
    out.instance = fixed_instance_ ? *fixed_instance_ : generate_instance(keys[1]);
    out.op_index.assign(static_cast<std::size_t>(num_jobs_), 0);
    out.machine_rem.assign(static_cast<std::size_t>(num_machines_), 0);
    out.machine_job.assign(static_cast<std::size_t>(num_machines_), -1);
    out.step_count = 0;
    out.key = keys[0];
    out.done = false;
}

std::vector<char> JobShop::action_mask(const State& s) const {
    // Row per machine: job j assignable iff machine idle, job idle, and j's
    // next operation runs here; the no-op column is always valid.
    std::vector<char> job_busy(static_cast<std::size_t>(num_jobs_), 0);
    for (std::int32_t j : s.machine_job) {
        if (j >= 0) {
            job_busy[static_cast<std::size_t>(j)] = 1;
        }
    }
    std::vector<char> mask(static_cast<std::size_t>(num_machines_) * (num_jobs_ + 1), 0);
    for (int m = 0; m < num_machines_; ++m) {
        auto row = mask.begin() + static_cast<std::ptrdiff_t>(m) * (num_jobs_ + 1);
        row[num_jobs_] = 1; // no-op
        if (s.machine_rem[static_cast<std::size_t>(m)] > 0) {
            continue;
        }
        for (int j = 0; j < num_jobs_; ++j) {
            if (job_busy[static_cast<std::size_t>(j)]) {
                continue;
            }
            const auto next = s.op_index[static_cast<std::size_t>(j)];
            if (next >= s.instance.num_ops[static_cast<std::size_t>(j)]) {
                continue;
            }
            if (s.instance.op_machine[static_cast<std::size_t>(j * max_ops_ + next)] == m) {
                row[j] = 1;
            }
        }
    }
    return mask;
}

void JobShop::constrain_head(int head, const Action& prefix, std::span<char> head_mask) const {
    (void)head;
    for (std::int64_t chosen : prefix) {
        if (chosen >= 0 && chosen < num_jobs_) {
            head_mask[static_cast<std::size_t>(chosen)] = 0;
        }
    }
}

void JobShop::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("jobshop: stepping a terminal state");
    }
    if (static_cast<int>(a.size()) != num_machines_) {
        throw InvalidActionError("jobshop: action must assign one job id per machine");
    }
    const auto mask = action_mask(s);
    std::vector<char> used(static_cast<std::size_t>(num_jobs_), 0);
    for (int m = 0; m < num_machines_; ++m) {
        const auto j = a[static_cast<std::size_t>(m)];
        if (j < 0 || j > num_jobs_) {
            throw InvalidActionError("jobshop: job id out of range");
        }
        if (j == num_jobs_) {
            continue; // no-op
        }
        if (!mask[static_cast<std::size_t>(m * (num_jobs_ + 1) + j)]) {
            throw InvalidActionError("jobshop: job " + std::to_string(j) +
                                     " not assignable to machine " + std::to_string(m) +
                                     " (masked invalid)");
        }
        if (used[static_cast<std::size_t>(j)]) {
            throw InvalidActionError("jobshop: job " + std::to_string(j) +
                                     " assigned to two machines");
        }
        used[static_cast<std::size_t>(j)] = 1;
    }

    // Start the assigned operations.
    for (int m = 0; m < num_machines_; ++m) {
        const auto j = a[static_cast<std::size_t>(m)];
        if (j == num_jobs_) {
            continue;
        }
        const auto next = s.op_index[static_cast<std::size_t>(j)];
        s.machine_job[static_cast<std::size_t>(m)] = static_cast<std::int32_t>(j);
        s.machine_rem[static_cast<std::size_t>(m)] =
            s.instance.op_duration[static_cast<std::size_t>(j * max_ops_ + next)];
    }
    // Advance time one unit.
    for (int m = 0; m < num_machines_; ++m) {
        if (s.machine_rem[static_cast<std::size_t>(m)] > 0) {
            s.machine_rem[static_cast<std::size_t>(m)] -= 1;
            if (s.machine_rem[static_cast<std::size_t>(m)] == 0) {
                const auto j = s.machine_job[static_cast<std::size_t>(m)];
                s.op_index[static_cast<std::size_t>(j)] += 1;
                s.machine_job[static_cast<std::size_t>(m)] = -1;
            }
        }
    }
    s.step_count += 1;

    bool complete = true;
    for (int j = 0; j < num_jobs_; ++j) {
        if (s.op_index[static_cast<std::size_t>(j)] < s.instance.num_ops[static_cast<std::size_t>(j)]) {
            complete = false;
            break;
        }
    }
    if (complete) {
        s.done = true;
        rec = StepRecord{StepType::Last, -1.0, 0.0};
    } else if (s.step_count >= horizon_) {
        s.done = true;
        rec = StepRecord{StepType::Last, -1.0, 1.0};
    } else {
        rec = StepRecord{StepType::Mid, -1.0, 1.0};
    }
}

Value JobShop::observe(const State& s) const {
    std::vector<std::int64_t> machines(s.instance.op_machine.begin(), s.instance.op_machine.end());
    std::vector<std::int64_t> durations(s.instance.op_duration.begin(), s.instance.op_duration.end());
    std::vector<std::int64_t> op_index(s.op_index.begin(), s.op_index.end());
    std::vector<std::int64_t> machine_rem(s.machine_rem.begin(), s.machine_rem.end());
    std::vector<std::int64_t> machine_job(s.machine_job.begin(), s.machine_job.end());
    const auto mask = action_mask(s);
    std::vector<std::int64_t> mask_i(mask.begin(), mask.end());
    return Value::map({
        {"ops_machine_ids", Value::tensor_i({num_jobs_, max_ops_}, std::move(machines))},
        {"ops_durations", Value::tensor_i({num_jobs_, max_ops_}, std::move(durations))},
        {"op_index", Value::tensor_i({num_jobs_}, std::move(op_index))},
        {"machines_remaining_times", Value::tensor_i({num_machines_}, std::move(machine_rem))},
        {"machines_job_ids", Value::tensor_i({num_machines_}, std::move(machine_job))},
        {"action_mask", Value::tensor_i({num_machines_, num_jobs_ + 1}, std::move(mask_i))},
        {"step_count", Value::scalar_i(s.step_count)},
    });
}

void JobShop::metrics_into(const State& s, Extras& out) const {
    std::int64_t remaining = 0;
    for (int j = 0; j < num_jobs_; ++j) {
        remaining += s.instance.num_ops[static_cast<std::size_t>(j)] -
                     s.op_index[static_cast<std::size_t>(j)];
    }
    out.emplace_back("ops_remaining", static_cast<double>(remaining));
}

Spec JobShop::observation_spec() const {
    return Spec::composite({
        {"ops_machine_ids", Spec::bounded({num_jobs_, max_ops_}, Dtype::i64, -1, num_machines_ - 1)},
        {"ops_durations", Spec::bounded({num_jobs_, max_ops_}, Dtype::i64, 0, max_duration_)},
        {"op_index", Spec::bounded({num_jobs_}, Dtype::i64, 0, max_ops_)},
        {"machines_remaining_times", Spec::bounded({num_machines_}, Dtype::i64, 0, max_duration_)},
        {"machines_job_ids", Spec::bounded({num_machines_}, Dtype::i64, -1, num_jobs_ - 1)},
        {"action_mask", Spec::bounded({num_machines_, num_jobs_ + 1}, Dtype::i64, 0, 1)},
        {"step_count", Spec::array({}, Dtype::i64)},
    });
}

Spec JobShop::action_spec() const {
    return Spec::multi_discrete(
        std::vector<std::int64_t>(static_cast<std::size_t>(num_machines_), num_jobs_ + 1));
}

void JobShop::flat_obs_into(const State& s, std::span<double> out) const {
    std::size_t w = 0;
    for (std::size_t k = 0; k < s.instance.op_machine.size(); ++k) {
        out[w++] = static_cast<double>(s.instance.op_machine[k] + 1) / num_machines_;
        out[w++] = static_cast<double>(s.instance.op_duration[k]) / max_duration_;
    }
    for (int j = 0; j < num_jobs_; ++j) {
        out[w++] = static_cast<double>(s.op_index[static_cast<std::size_t>(j)]) / max_ops_;
    }
    for (int m = 0; m < num_machines_; ++m) {
        out[w++] = static_cast<double>(s.machine_rem[static_cast<std::size_t>(m)]) / max_duration_;
        out[w++] = static_cast<double>(s.machine_job[static_cast<std::size_t>(m)] + 1) / num_jobs_;
    }
    const auto mask = action_mask(s);
    for (char v : mask) {
        out[w++] = v ? 1.0 : 0.0;
    }
}

RenderOut JobShop::render(const State& s) const {
    // Gantt-style raster: one row per machine over the horizon; columns
    // before `step_count` show history only as elапsed time (not stored), so
    // the render shows the current machine occupancy block.
    Raster img = Raster::for_grid(num_machines_, std::max(8, max_duration_ + 2));
    static constexpr std::uint8_t kJobColors[6][3] = {{200, 80, 80},  {80, 160, 200}, {90, 190, 90},
                                                      {210, 170, 60}, {170, 90, 190}, {120, 120, 120}};
    for (int m = 0; m < num_machines_; ++m) {
        const auto j = s.machine_job[static_cast<std::size_t>(m)];
        const auto rem = s.machine_rem[static_cast<std::size_t>(m)];
        for (int t = 0; t < rem; ++t) {
            const auto& c = kJobColors[static_cast<std::size_t>(j >= 0 ? j % 6 : 5)];
            img.fill_cell(m, 1 + t, c[0], c[1], c[2]);
        }
    }
    return img.to_render_out();
}

JobShop::Slab::Slab(const JobShop& env, int batch)
    : jobs_(env.num_jobs()),
      machines_(env.num_machines()),
      max_ops_(env.max_ops()),
      op_machine_(static_cast<std::size_t>(batch) * jobs_ * max_ops_),
      op_duration_(static_cast<std::size_t>(batch) * jobs_ * max_ops_),
      num_ops_(static_cast<std::size_t>(batch) * jobs_),
      op_index_(static_cast<std::size_t>(batch) * jobs_),
      machine_rem_(static_cast<std::size_t>(batch) * machines_),
      machine_job_(static_cast<std::size_t>(batch) * machines_),
      steps_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void JobShop::Slab::store(int i, const State& s) {
    const int ops = jobs_ * max_ops_;
    std::copy(s.instance.op_machine.begin(), s.instance.op_machine.end(),
              op_machine_.begin() + static_cast<std::ptrdiff_t>(i) * ops);
    std::copy(s.instance.op_duration.begin(), s.instance.op_duration.end(),
              op_duration_.begin() + static_cast<std::ptrdiff_t>(i) * ops);
    std::copy(s.instance.num_ops.begin(), s.instance.num_ops.end(),
              num_ops_.begin() + static_cast<std::ptrdiff_t>(i) * jobs_);
    std::copy(s.op_index.begin(), s.op_index.end(),
              op_index_.begin() + static_cast<std::ptrdiff_t>(i) * jobs_);
    std::copy(s.machine_rem.begin(), s.machine_rem.end(),
              machine_rem_.begin() + static_cast<std::ptrdiff_t>(i) * machines_);
    std::copy(s.machine_job.begin(), s.machine_job.end(),
              machine_job_.begin() + static_cast<std::ptrdiff_t>(i) * machines_);
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void JobShop::Slab::load_into(int i, State& out) const {
    const int ops = jobs_ * max_ops_;
    out.instance.num_jobs = jobs_;
    out.instance.num_machines = machines_;
    out.instance.max_ops = max_ops_;
    out.instance.op_machine.assign(op_machine_.begin() + static_cast<std::ptrdiff_t>(i) * ops,
                                   op_machine_.begin() + static_cast<std::ptrdiff_t>(i + 1) * ops);
    out.instance.op_duration.assign(op_duration_.begin() + static_cast<std::ptrdiff_t>(i) * ops,
                                    op_duration_.begin() + static_cast<std::ptrdiff_t>(i + 1) * ops);
    out.instance.num_ops.assign(num_ops_.begin() + static_cast<std::ptrdiff_t>(i) * jobs_,
                                num_ops_.begin() + static_cast<std::ptrdiff_t>(i + 1) * jobs_);
    out.op_index.assign(op_index_.begin() + static_cast<std::ptrdiff_t>(i) * jobs_,
                        op_index_.begin() + static_cast<std::ptrdiff_t>(i + 1) * jobs_);
    out.machine_rem.assign(machine_rem_.begin() + static_cast<std::ptrdiff_t>(i) * machines_,
                           machine_rem_.begin() + static_cast<std::ptrdiff_t>(i + 1) * machines_);
    out.machine_job.assign(machine_job_.begin() + static_cast<std::ptrdiff_t>(i) * machines_,
                           machine_job_.begin() + static_cast<std::ptrdiff_t>(i + 1) * machines_);
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_jobshop(const std::string& id, const Params& params) {
    return make_env(id, JobShop(params));
}

} // namespace envkit::envs
