#include "envkit/distrib.hpp"

#include <cmath>
#include <limits>

#include "envkit/errors.hpp"

namespace envkit {
namespace {

double masked_max(std::span<const double> logits, std::span<const char> mask) {
    double m = -std::numeric_limits<double>::infinity();
    bool any_valid = false;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            any_valid = true;
            if (std::isnan(logits[i])) {
                throw ContractViolationError("masked categorical: non-finite logits");
            }
            if (logits[i] > m) {
                m = logits[i];
            }
        }
    }
    if (!any_valid) {
        throw ContractViolationError("masked categorical: no valid action in mask");
    }
    return m;
}

} // namespace

void masked_softmax(std::span<const double> logits, std::span<const char> mask,
                    std::span<double> probs_out) {
    const double m = masked_max(logits, mask);
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double e = mask[i] ? std::exp(logits[i] - m) : 0.0;
        probs_out[i] = e;
        z += e;
    }
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs_out[i] /= z;
    }
}

CategoricalSample masked_categorical_sample(std::span<const double> logits, std::span<const char> mask,
                                            rng::Key key) {
    const double m = masked_max(logits, mask);
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            z += std::exp(logits[i] - m);
        }
    }
    const double u = rng::uniform01(key) * z;
    double acc = 0.0;
    std::int64_t chosen = -1;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!mask[i]) {
            continue;
        }
        acc += std::exp(logits[i] - m);
        if (u < acc) {
            chosen = static_cast<std::int64_t>(i);
            break;
        }
    }
    if (chosen < 0) { // u == z due to rounding: take the last valid entry
        for (std::size_t i = logits.size(); i-- > 0;) {
            if (mask[i]) {
                chosen = static_cast<std::int64_t>(i);
                break;
            }
        }
    }
    CategoricalSample out;
    out.index = chosen;
    const double log_z = std::log(z);
    out.log_prob = logits[static_cast<std::size_t>(chosen)] - m - log_z;
    double h = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            const double lp = logits[i] - m - log_z;
            h -= std::exp(lp) * lp;
        }
    }
    out.entropy = h;
    return out;
}

std::int64_t masked_argmax(std::span<const double> logits, std::span<const char> mask) {
    std::int64_t best = -1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i] && logits[i] > best_v) {
            best_v = logits[i];
            best = static_cast<std::int64_t>(i);
        }
    }
    if (best < 0) {
        throw ContractViolationError("masked argmax: no valid action in mask");
    }
    return best;
}

double masked_log_prob(std::span<const double> logits, std::span<const char> mask, std::int64_t index) {
    const double m = masked_max(logits, mask);
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            z += std::exp(logits[i] - m);
        }
    }
    return logits[static_cast<std::size_t>(index)] - m - std::log(z);
}

double masked_entropy(std::span<const double> logits, std::span<const char> mask) {
    const double m = masked_max(logits, mask);
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            z += std::exp(logits[i] - m);
        }
    }
    const double log_z = std::log(z);
    double h = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            const double lp = logits[i] - m - log_z;
            h -= std::exp(lp) * lp;
        }
    }
    return h;
}

} // namespace envkit
