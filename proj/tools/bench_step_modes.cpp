// Compares the serial reference stepping path against the OpenMP path for
// every registered environment: same keys, same actions, timing side by side.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "envkit/batch.hpp"
#include "envkit/registry.hpp"

using namespace envkit;

namespace {

double time_epoch(const Environment& env, int batch_size, int steps, int threads) {
    auto batch = env.make_batch(batch_size);
    batch->reset_all(rng::key_from_seed(7), threads);
    std::vector<std::int64_t> actions(
        static_cast<std::size_t>(batch_size) * batch->head_sizes().size());
    std::vector<char> masks(static_cast<std::size_t>(batch_size) * batch->mask_dim());
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < steps; ++t) {
        batch->write_masks(masks, threads);
        // first valid action per entry
        const auto& heads = batch->head_sizes();
        for (int i = 0; i < batch_size; ++i) {
            if (batch->done_flags()[static_cast<std::size_t>(i)]) {
                for (std::size_t h = 0; h < heads.size(); ++h) {
                    actions[static_cast<std::size_t>(i) * heads.size() + h] = 0;
                }
                continue;
            }
            Action prefix;
            int offset = 0;
            for (std::size_t h = 0; h < heads.size(); ++h) {
                std::vector<char> head_mask(
                    masks.begin() + static_cast<std::ptrdiff_t>(i) * batch->mask_dim() + offset,
                    masks.begin() + static_cast<std::ptrdiff_t>(i) * batch->mask_dim() + offset +
                        heads[h]);
                batch->constrain_head(static_cast<int>(h), prefix, head_mask);
                std::int64_t pick = 0;
                for (std::size_t k = 0; k < head_mask.size(); ++k) {
                    if (head_mask[k]) {
                        pick = static_cast<std::int64_t>(k);
                        break;
                    }
                }
                prefix.push_back(pick);
                actions[static_cast<std::size_t>(i) * heads.size() + h] = pick;
                offset += heads[h];
            }
        }
        batch->step(actions, StepMode::freeze_done, threads);
    }
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int batch_size = 256;
    int steps = 500;
    if (argc > 1) {
        batch_size = std::atoi(argv[1]);
    }
    if (argc > 2) {
        steps = std::atoi(argv[2]);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    const int threads = hw == 0 ? 2 : static_cast<int>(hw);
    std::printf("batch=%d steps=%d omp_threads=%d\n", batch_size, steps, threads);
    std::printf("%-32s %14s %14s %8s\n", "env_id", "serial_sps", "omp_sps", "speedup");
    for (const auto& desc : default_registry().descriptors()) {
        const auto env = default_registry().make(desc.id);
        const double serial = time_epoch(*env, batch_size, steps, 0);
        const double omp = time_epoch(*env, batch_size, steps, threads);
        const double total = static_cast<double>(batch_size) * steps;
        std::printf("%-32s %14.0f %14.0f %8.2f\n", desc.id.c_str(), total / serial, total / omp,
                    serial / omp);
    }
    return 0;
}
