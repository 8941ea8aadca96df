#include "envkit/nn.hpp"

#include <cmath>

#include "envkit/errors.hpp"

namespace envkit::nn {
namespace {

Linear make_linear(int in, int out, rng::Key key) {
    Linear layer;
    layer.in = in;
    layer.out = out;
    layer.w.resize(static_cast<std::size_t>(in) * out);
    layer.b.assign(static_cast<std::size_t>(out), 0.0);
    const double limit = std::sqrt(6.0 / in);
    for (std::size_t k = 0; k < layer.w.size(); ++k) {
        layer.w[k] = (2.0 * rng::uniform01(key, k) - 1.0) * limit;
    }
    return layer;
}

} // namespace

Stack make_stack(int input, std::span<const int> hidden, int output, rng::Key key) {
    Stack stack;
    int in = input;
    std::uint64_t idx = 0;
    for (int h : hidden) {
        stack.push_back(make_linear(in, h, rng::fold_in(key, idx++)));
        in = h;
    }
    stack.push_back(make_linear(in, output, rng::fold_in(key, idx++)));
    // Small output layer: the initial policy starts near uniform and the
    // initial value estimate near zero.
    for (double& w : stack.back().w) {
        w *= 0.01;
    }
    return stack;
}

void stack_forward(const Stack& stack, const double* x, int batch, StackTrace& trace) {
    trace.inputs.resize(stack.size());
    trace.inputs[0].assign(x, x + static_cast<std::size_t>(batch) * stack.front().in);
    for (std::size_t l = 0; l < stack.size(); ++l) {
        const Linear& layer = stack[l];
        const std::vector<double>& in = trace.inputs[l];
        if (in.size() != static_cast<std::size_t>(batch) * layer.in) {
            throw InvalidArgumentError("stack_forward: dimension mismatch");
        }
        std::vector<double>& dst = (l + 1 == stack.size()) ? trace.output : trace.inputs[l + 1];
        dst.assign(static_cast<std::size_t>(batch) * layer.out, 0.0);
        for (int n = 0; n < batch; ++n) {
            const double* row = in.data() + static_cast<std::size_t>(n) * layer.in;
            double* out_row = dst.data() + static_cast<std::size_t>(n) * layer.out;
            for (int o = 0; o < layer.out; ++o) {
                const double* wrow = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
                double acc = layer.b[static_cast<std::size_t>(o)];
                for (int i = 0; i < layer.in; ++i) {
                    acc += wrow[i] * row[i];
                }
                out_row[o] = acc;
            }
        }
        if (l + 1 < stack.size()) {
            for (double& v : dst) {
                v = v > 0 ? v : 0.0; // ReLU between layers
            }
        }
    }
}

void stack_backward(const Stack& stack, const StackTrace& trace, const double* d_out, int batch,
                    Stack& grads, double* d_x) {
    std::vector<double> d_cur(d_out, d_out + static_cast<std::size_t>(batch) * stack.back().out);
    std::vector<double> d_prev;
    for (std::size_t l = stack.size(); l-- > 0;) {
        const Linear& layer = stack[l];
        Linear& g = grads[l];
        const auto& input = trace.inputs[l];
        const bool need_dx = l > 0 || d_x != nullptr;
        if (need_dx) {
            d_prev.assign(static_cast<std::size_t>(batch) * layer.in, 0.0);
        }
        for (int n = 0; n < batch; ++n) {
            const double* in_row = input.data() + static_cast<std::size_t>(n) * layer.in;
            const double* do_row = d_cur.data() + static_cast<std::size_t>(n) * layer.out;
            double* dp_row = need_dx ? d_prev.data() + static_cast<std::size_t>(n) * layer.in : nullptr;
            for (int o = 0; o < layer.out; ++o) {
                const double d = do_row[o];
                if (d == 0.0) {
                    continue;
                }
                g.b[static_cast<std::size_t>(o)] += d;
                double* gw_row = g.w.data() + static_cast<std::size_t>(o) * layer.in;
                const double* w_row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) {
                    gw_row[i] += d * in_row[i];
                    if (dp_row) {
                        dp_row[i] += d * w_row[i];
                    }
                }
            }
        }
        if (l > 0) {
            // Input of layer l is the rectified output of layer l-1: ReLU
            // gate passes gradient where the activation is positive.
            for (std::size_t k = 0; k < d_prev.size(); ++k) {
                if (input[k] <= 0.0) {
                    d_prev[k] = 0.0;
                }
            }
            d_cur.swap(d_prev);
        } else if (d_x != nullptr) {
            std::copy(d_prev.begin(), d_prev.end(), d_x);
        }
    }
}

MlpParams make_mlp(int input_dim, std::vector<int> hidden, int num_logits, bool shared_torso,
                   rng::Key key) {
    MlpParams p;
    p.shared_torso = shared_torso;
    p.input_dim = input_dim;
    p.num_logits = num_logits;
    p.hidden = std::move(hidden);
    const auto keys = rng::split(key, 3);
    if (shared_torso) {
        if (p.hidden.empty()) {
            throw InvalidArgumentError("mlp: shared torso requires at least one hidden layer");
        }
        std::vector<int> trunk(p.hidden.begin(), p.hidden.end() - 1);
        p.torso = make_stack(input_dim, trunk, p.hidden.back(), keys[0]);
        p.policy = {make_linear(p.hidden.back(), num_logits, keys[1])};
        p.value = {make_linear(p.hidden.back(), 1, keys[2])};
    } else {
        p.policy = make_stack(input_dim, p.hidden, num_logits, keys[1]);
        p.value = make_stack(input_dim, p.hidden, 1, keys[2]);
    }
    return p;
}

void mlp_forward(const MlpParams& params, const double* obs, int batch, MlpTrace& trace,
                 std::vector<double>& logits, std::vector<double>& values) {
    if (params.shared_torso) {
        stack_forward(params.torso, obs, batch, trace.torso);
        trace.torso_relu = trace.torso.output;
        for (double& v : trace.torso_relu) {
            v = v > 0 ? v : 0.0;
        }
        stack_forward(params.policy, trace.torso_relu.data(), batch, trace.policy);
        stack_forward(params.value, trace.torso_relu.data(), batch, trace.value);
    } else {
        stack_forward(params.policy, obs, batch, trace.policy);
        stack_forward(params.value, obs, batch, trace.value);
    }
    logits = trace.policy.output;
    values.resize(static_cast<std::size_t>(batch));
    for (int n = 0; n < batch; ++n) {
        values[static_cast<std::size_t>(n)] = trace.value.output[static_cast<std::size_t>(n)];
    }
}

void mlp_backward(const MlpParams& params, const MlpTrace& trace, const double* d_logits,
                  const double* d_values, int batch, MlpParams& grads) {
    if (params.shared_torso) {
        const int trunk_dim = params.hidden.back();
        std::vector<double> d_trunk(static_cast<std::size_t>(batch) * trunk_dim, 0.0);
        std::vector<double> d_tmp(static_cast<std::size_t>(batch) * trunk_dim, 0.0);
        stack_backward(params.policy, trace.policy, d_logits, batch, grads.policy, d_trunk.data());
        stack_backward(params.value, trace.value, d_values, batch, grads.value, d_tmp.data());
        for (std::size_t k = 0; k < d_trunk.size(); ++k) {
            d_trunk[k] += d_tmp[k];
            if (trace.torso.output[k] <= 0.0) {
                d_trunk[k] = 0.0; // trunk ReLU gate
            }
        }
        stack_backward(params.torso, trace.torso, d_trunk.data(), batch, grads.torso, nullptr);
    } else {
        stack_backward(params.policy, trace.policy, d_logits, batch, grads.policy, nullptr);
        stack_backward(params.value, trace.value, d_values, batch, grads.value, nullptr);
    }
}

MlpParams zeros_like(const MlpParams& params) {
    MlpParams z = params;
    for (Stack* stack : {&z.torso, &z.policy, &z.value}) {
        for (Linear& layer : *stack) {
            std::fill(layer.w.begin(), layer.w.end(), 0.0);
            std::fill(layer.b.begin(), layer.b.end(), 0.0);
        }
    }
    return z;
}

std::size_t param_count(const MlpParams& params) {
    std::size_t n = 0;
    for (const Stack* stack : {&params.torso, &params.policy, &params.value}) {
        for (const Linear& layer : *stack) {
            n += layer.w.size() + layer.b.size();
        }
    }
    return n;
}

void sgd_step(MlpParams& params, const MlpParams& grads, double lr) {
    const Stack* gs[3] = {&grads.torso, &grads.policy, &grads.value};
    Stack* ps[3] = {&params.torso, &params.policy, &params.value};
    for (int s = 0; s < 3; ++s) {
        for (std::size_t l = 0; l < ps[s]->size(); ++l) {
            Linear& p = (*ps[s])[l];
            const Linear& g = (*gs[s])[l];
            for (std::size_t k = 0; k < p.w.size(); ++k) {
                p.w[k] -= lr * g.w[k];
            }
            for (std::size_t k = 0; k < p.b.size(); ++k) {
                p.b[k] -= lr * g.b[k];
            }
        }
    }
}

std::vector<double> to_flat(const MlpParams& params) {
    std::vector<double> flat;
    flat.reserve(param_count(params));
    for (const Stack* stack : {&params.torso, &params.policy, &params.value}) {
        for (const Linear& layer : *stack) {
            flat.insert(flat.end(), layer.w.begin(), layer.w.end());
            flat.insert(flat.end(), layer.b.begin(), layer.b.end());
        }
    }
    return flat;
}

void from_flat(MlpParams& params, std::span<const double> flat) {
    std::size_t at = 0;
    for (Stack* stack : {&params.torso, &params.policy, &params.value}) {
        for (Linear& layer : *stack) {
            for (double& v : layer.w) {
                v = flat[at++];
            }
            for (double& v : layer.b) {
                v = flat[at++];
            }
        }
    }
    if (at != flat.size()) {
        throw InvalidArgumentError("from_flat: wrong parameter count");
    }
}

std::vector<std::uint32_t> layer_dims(const MlpParams& params) {
    std::vector<std::uint32_t> dims;
    for (const Stack* stack : {&params.torso, &params.policy, &params.value}) {
        dims.push_back(static_cast<std::uint32_t>(stack->size()));
        for (const Linear& layer : *stack) {
            dims.push_back(static_cast<std::uint32_t>(layer.in));
            dims.push_back(static_cast<std::uint32_t>(layer.out));
        }
    }
    return dims;
}

} // namespace envkit::nn
