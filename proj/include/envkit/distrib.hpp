#pragma once
#include <cstdint>
#include <span>

#include "envkit/rng.hpp"

namespace envkit {

struct CategoricalSample {
    std::int64_t index = 0;
    double log_prob = 0.0;
    double entropy = 0.0;
};

// Masked categorical over one action head. Invalid entries get probability
// exactly zero; probabilities over the valid support are proportional to
// exp(logits). Entropy is computed over the valid support. At least one mask
// entry must be true (ContractViolationError otherwise).
CategoricalSample masked_categorical_sample(std::span<const double> logits, std::span<const char> mask,
                                            rng::Key key);

// Deterministic argmax over the valid support (ties to the lowest index).
std::int64_t masked_argmax(std::span<const double> logits, std::span<const char> mask);

// log-prob and entropy of a given valid index under the masked softmax.
// Writes d(log_prob)/d(logit_k) terms lazily via the returned probabilities:
// probs_out, when non-empty, receives the masked softmax probabilities
// (zeros at invalid entries).
void masked_softmax(std::span<const double> logits, std::span<const char> mask,
                    std::span<double> probs_out);

double masked_log_prob(std::span<const double> logits, std::span<const char> mask, std::int64_t index);

double masked_entropy(std::span<const double> logits, std::span<const char> mask);

} // namespace envkit
