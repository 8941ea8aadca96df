// envkit command line: list environments, benchmark throughput, roll out
// policies, train agents, render states. Exit codes: 0 success, 2 usage
// error, 3 runtime error.
#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "envkit/a2c.hpp"
#include "envkit/batch.hpp"
#include "envkit/distrib.hpp"
#include "envkit/env.hpp"
#include "envkit/errors.hpp"
#include "envkit/fileio.hpp"
#include "envkit/registry.hpp"

namespace fs = std::filesystem;
using namespace envkit;

namespace {

int default_threads() {
    if (const char* env = std::getenv("ENVKIT_NUM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 0) {
            return v;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

Params overrides_from_pairs(const std::vector<std::string>& pairs) {
    Params params;
    for (const auto& pair : pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw InvalidArgumentError("--param expects key=value, got '" + pair + "'");
        }
        params.set(pair.substr(0, eq), pair.substr(eq + 1));
    }
    return params;
}

Params env_overrides_from_config(const Params& config) {
    Params overrides;
    for (const auto& [key, value] : config.entries()) {
        if (key.rfind("env.", 0) == 0) {
            overrides.set(key.substr(4), value);
        }
    }
    return overrides;
}

int cmd_list() {
    const auto& registry = default_registry();
    std::printf("%-32s %-8s %-52s %s\n", "id", "category", "objective", "defaults");
    for (const auto& desc : registry.descriptors()) {
        std::string defaults;
        for (const auto& [k, v] : desc.default_params.entries()) {
            if (!defaults.empty()) {
                defaults += " ";
            }
            defaults += k + "=" + v;
        }
        std::printf("%-32s %-8s %-52s %s\n", desc.id.c_str(), desc.category.c_str(),
                    desc.objective.c_str(), defaults.c_str());
    }
    return 0;
}

int cmd_bench(const std::vector<std::string>& env_ids, const std::vector<int>& batch_sizes,
              const std::string& out_path, std::uint64_t seed, int threads, int steps_per_block,
              int blocks) {
    std::string csv = throughput_csv_header() + "\n";
    for (const auto& id : env_ids) {
        const auto env = default_registry().make(id);
        for (int bs : batch_sizes) {
            if (bs < 1) {
                throw InvalidArgumentError("batch sizes must be >= 1");
            }
            const auto report = run_throughput_epoch(*env, rng::key_from_seed(seed), bs,
                                                     steps_per_block, blocks, threads);
            const std::string row = throughput_csv_row(report);
            std::printf("%s\n", row.c_str());
            std::fflush(stdout);
            csv += row + "\n";
        }
    }
    if (!out_path.empty()) {
        io::atomic_write(out_path, csv);
    }
    return 0;
}

nn::MlpParams load_policy_checkpoint(const std::string& path) {
    const auto ckpt = io::decode_checkpoint(io::read_file(path));
    return io::mlp_from_checkpoint(ckpt);
}

void write_frame(const std::string& dir, int index, const RenderOut& render) {
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%05d%s", index, render.suffix());
    io::atomic_write((fs::path(dir) / name).string(), render.payload);
}

int cmd_rollout(const std::string& env_id, const std::string& policy, int steps,
                std::uint64_t seed, bool frames, const std::string& out_dir,
                const std::vector<std::string>& param_pairs) {
    const auto env = default_registry().make(env_id, overrides_from_pairs(param_pairs));
    nn::MlpParams net;
    const bool use_net = policy != "random";
    if (use_net) {
        net = load_policy_checkpoint(policy);
    }
    if (frames && out_dir.empty()) {
        throw InvalidArgumentError("--frames requires --out <dir>");
    }
    if (frames) {
        fs::create_directories(out_dir);
    }

    const auto keys = rng::split(rng::key_from_seed(seed), 2);
    auto [state, ts] = env->reset(keys[0]);
    if (frames) {
        write_frame(out_dir, 0, env->render(*state));
    }
    const auto heads = env->action_head_sizes();
    nn::MlpTrace trace;
    std::vector<double> logits;
    std::vector<double> values;
    std::vector<double> obs(static_cast<std::size_t>(env->flat_obs_dim()));

    double episode_return = 0.0;
    int episode = 0;
    std::vector<double> returns;
    for (int t = 0; t < steps; ++t) {
        const auto base_mask = env->action_mask(*state);
        if (use_net) {
            env->flat_obs_into(*state, obs);
            nn::mlp_forward(net, obs.data(), 1, trace, logits, values);
        }
        Action action;
        int offset = 0;
        for (std::size_t h = 0; h < heads.size(); ++h) {
            const int width = heads[h];
            std::vector<char> head_mask(base_mask.begin() + offset,
                                        base_mask.begin() + offset + width);
            env->constrain_head(static_cast<int>(h), action, head_mask);
            std::vector<double> head_logits(static_cast<std::size_t>(width), 0.0);
            if (use_net) {
                std::copy(logits.begin() + offset, logits.begin() + offset + width,
                          head_logits.begin());
            }
            const rng::Key k = rng::fold_in(rng::fold_in(keys[1], static_cast<std::uint64_t>(t)),
                                            static_cast<std::uint64_t>(h));
            action.push_back(masked_categorical_sample(head_logits, head_mask, k).index);
            offset += width;
        }
        auto [next, ts2] = env->step_autoreset(*state, action);
        state = std::move(next);
        ts = std::move(ts2);
        episode_return += ts.reward;
        if (frames) {
            write_frame(out_dir, t + 1, env->render(*state));
        }
        if (ts.last()) {
            std::printf("episode %d return %.10g\n", episode++, episode_return);
            returns.push_back(episode_return);
            episode_return = 0.0;
        }
    }
    if (!returns.empty()) {
        double sum = 0.0;
        for (double r : returns) {
            sum += r;
        }
        std::printf("episodes %zu mean_return %.10g\n", returns.size(),
                    sum / static_cast<double>(returns.size()));
    } else {
        std::printf("episodes 0 partial_return %.10g\n", episode_return);
    }
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
    const Params config = io::load_config(config_path);
    const std::string env_id = config.get_string("env_id", "");
    if (env_id.empty()) {
        throw InvalidArgumentError("config must set env_id");
    }
    const auto env = default_registry().make(env_id, env_overrides_from_config(config));
    const a2c::TrainConfig cfg = a2c::config_from_params(config);

    fs::create_directories(out_dir);
    std::string csv = a2c::curve_csv_header() + "\n";
    const auto result = a2c::train(*env, cfg, [&csv](const a2c::EpochRecord& rec) {
        const std::string row = a2c::curve_csv_row(rec);
        std::printf("%s\n", row.c_str());
        std::fflush(stdout);
        csv += row + "\n";
    });
    io::atomic_write((fs::path(out_dir) / "curve.csv").string(), csv);
    io::atomic_write((fs::path(out_dir) / "checkpoint.bin").string(),
                     io::encode_checkpoint(io::checkpoint_from_mlp(result.params)));
    return 0;
}

int cmd_render_demo(const std::string& env_id, std::uint64_t seed, std::string out_path,
                    const std::vector<std::string>& param_pairs) {
    const auto env = default_registry().make(env_id, overrides_from_pairs(param_pairs));
    auto [state, ts] = env->reset(rng::key_from_seed(seed));
    const auto render = env->render(*state);
    if (out_path.empty()) {
        out_path = "render" + std::string(render.suffix());
    }
    io::atomic_write(out_path, render.payload);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"envkit: batched combinatorial RL environments"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List registered environments");

    auto* bench = app.add_subcommand("bench", "Measure step throughput per batch size");
    std::vector<std::string> bench_envs;
    std::vector<int> bench_sizes = {1, 8, 64, 512, 4096};
    std::string bench_out;
    std::uint64_t bench_seed = 0;
    int bench_threads = default_threads();
    int bench_steps = 50, bench_blocks = 500;
    bench->add_option("--env", bench_envs, "Environment id(s)")->required();
    bench->add_option("--batch-sizes", bench_sizes, "Batch sizes to sweep");
    bench->add_option("--out", bench_out, "CSV output path");
    bench->add_option("--seed", bench_seed, "Reset seed");
    bench->add_option("--threads", bench_threads, "Worker threads (0 = serial reference)");
    bench->add_option("--steps-per-block", bench_steps, "Steps per block");
    bench->add_option("--blocks", bench_blocks, "Blocks per epoch");

    auto* roll = app.add_subcommand("rollout", "Roll out a policy and print episode returns");
    std::string roll_env, roll_policy = "random", roll_out;
    int roll_steps = 100;
    std::uint64_t roll_seed = 0;
    bool roll_frames = false;
    std::vector<std::string> roll_params;
    roll->add_option("--env", roll_env, "Environment id")->required();
    roll->add_option("--policy", roll_policy, "'random' or checkpoint path");
    roll->add_option("--steps", roll_steps, "Number of steps");
    roll->add_option("--seed", roll_seed, "Seed");
    roll->add_flag("--frames", roll_frames, "Write one image per step");
    roll->add_option("--out", roll_out, "Frame output directory");
    roll->add_option("--param", roll_params, "Environment parameter override key=value");

    auto* train = app.add_subcommand("train", "Train the actor-critic agent from a config file");
    std::string train_config, train_out = "train_out";
    train->add_option("--config", train_config, "key=value config file")->required();
    train->add_option("--out", train_out, "Output directory");

    auto* demo = app.add_subcommand("render-demo", "Render the reset state of an environment");
    std::string demo_env, demo_out;
    std::uint64_t demo_seed = 0;
    std::vector<std::string> demo_params;
    demo->add_option("--env", demo_env, "Environment id")->required();
    demo->add_option("--seed", demo_seed, "Seed");
    demo->add_option("--out", demo_out, "Output file");
    demo->add_option("--param", demo_params, "Environment parameter override key=value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            return app.exit(e);
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (list->parsed()) {
            return cmd_list();
        }
        if (bench->parsed()) {
            return cmd_bench(bench_envs, bench_sizes, bench_out, bench_seed, bench_threads,
                             bench_steps, bench_blocks);
        }
        if (roll->parsed()) {
            return cmd_rollout(roll_env, roll_policy, roll_steps, roll_seed, roll_frames, roll_out,
                               roll_params);
        }
        if (train->parsed()) {
            return cmd_train(train_config, train_out);
        }
        if (demo->parsed()) {
            return cmd_render_demo(demo_env, demo_seed, demo_out, demo_params);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
