#include "envkit/registry.hpp"

#include <algorithm>

#include "envkit/errors.hpp"

namespace envkit {
namespace {

int edit_distance(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<int> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        prev[j] = static_cast<int>(j);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

} // namespace

int Registry::parse_version(const std::string& id) {
    const auto pos = id.rfind("-v");
    if (pos == std::string::npos || pos + 2 >= id.size()) {
        throw InvalidArgumentError("environment id must end in -v<N>: " + id);
    }
    int version = 0;
    for (std::size_t i = pos + 2; i < id.size(); ++i) {
        if (id[i] < '0' || id[i] > '9') {
            throw InvalidArgumentError("environment id must end in -v<N>: " + id);
        }
        version = version * 10 + (id[i] - '0');
    }
    return version;
}

void Registry::register_env(EnvDescriptor desc) {
    parse_version(desc.id);
    for (const auto& d : order_) {
        if (d.id == desc.id) {
            throw ConflictError("environment id already registered: " + desc.id);
        }
    }
    order_.push_back(std::move(desc));
}

bool Registry::contains(const std::string& id) const {
    return std::any_of(order_.begin(), order_.end(), [&](const auto& d) { return d.id == id; });
}

const EnvDescriptor& Registry::descriptor(const std::string& id) const {
    for (const auto& d : order_) {
        if (d.id == id) {
            return d;
        }
    }
    // Rank registered ids by edit distance and suggest the closest three.
    std::vector<std::pair<int, std::string>> ranked;
    ranked.reserve(order_.size());
    for (const auto& d : order_) {
        ranked.emplace_back(edit_distance(id, d.id), d.id);
    }
    std::sort(ranked.begin(), ranked.end());
    std::string msg = "unknown environment id '" + id + "'";
    if (!ranked.empty()) {
        msg += "; nearest matches:";
        for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
            msg += (i ? ", " : " ") + ranked[i].second;
        }
    }
    throw NotFoundError(msg);
}

std::shared_ptr<Environment> Registry::make(const std::string& id, const Params& overrides) const {
    const EnvDescriptor& desc = descriptor(id);
    return desc.builder(id, desc.default_params.merged(overrides));
}

} // namespace envkit
