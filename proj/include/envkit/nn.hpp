#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "envkit/rng.hpp"

namespace envkit::nn {

// Dense layer, weights row-major (out x in).
struct Linear {
    int in = 0;
    int out = 0;
    std::vector<double> w;
    std::vector<double> b;
};

// Sequence of dense layers with rectifier nonlinearities between them (none
// after the last layer).
using Stack = std::vector<Linear>;

// He-uniform weights, zero biases, deterministic in the key.
Stack make_stack(int input, std::span<const int> hidden, int output, rng::Key key);

// Pre-activation inputs of every layer, kept for the backward pass.
struct StackTrace {
    std::vector<std::vector<double>> inputs; // inputs[l] = input of layer l (B x in_l)
    std::vector<double> output;              // B x out_last (pre-ReLU; last layer is linear)
};

void stack_forward(const Stack& stack, const double* x, int batch, StackTrace& trace);

// Accumulates parameter gradients into `grads` (same shape as the stack) and
// optionally writes the input gradient (B x in_0).
void stack_backward(const Stack& stack, const StackTrace& trace, const double* d_out, int batch,
                    Stack& grads, double* d_x);

// Actor-critic parameter bundle: with a shared torso the heads read the same
// trunk features; otherwise policy and value are independent stacks.
struct MlpParams {
    bool shared_torso = false;
    int input_dim = 0;
    int num_logits = 0;
    std::vector<int> hidden;
    Stack torso;  // shared_torso only
    Stack policy; // full stack when separate, single head layer when shared
    Stack value;
};

MlpParams make_mlp(int input_dim, std::vector<int> hidden, int num_logits, bool shared_torso,
                   rng::Key key);

struct MlpTrace {
    StackTrace torso;
    StackTrace policy;
    StackTrace value;
    std::vector<double> torso_relu; // shared mode: rectified trunk features
};

// logits: B x num_logits, values: B.
void mlp_forward(const MlpParams& params, const double* obs, int batch, MlpTrace& trace,
                 std::vector<double>& logits, std::vector<double>& values);

// d_logits: B x num_logits, d_values: B. Gradients accumulate into `grads`.
void mlp_backward(const MlpParams& params, const MlpTrace& trace, const double* d_logits,
                  const double* d_values, int batch, MlpParams& grads);

MlpParams zeros_like(const MlpParams& params);
std::size_t param_count(const MlpParams& params);
void sgd_step(MlpParams& params, const MlpParams& grads, double lr);

// Flat parameter vector round-trip (checkpoint format and finite-difference
// tests iterate parameters through these).
std::vector<double> to_flat(const MlpParams& params);
void from_flat(MlpParams& params, std::span<const double> flat);
std::vector<std::uint32_t> layer_dims(const MlpParams& params);

} // namespace envkit::nn
