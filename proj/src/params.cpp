#include "envkit/params.hpp"

#include <cstdlib>
#include <sstream>

namespace envkit {

void Params::set_double(const std::string& name, double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    values_[name] = ss.str();
}

std::int64_t Params::get_int(const std::string& name, std::int64_t fallback) const {
    auto it = values_.find(name);
    if (it == values_.end()) {
        return fallback;
    }
    char* end = nullptr;
    const long long v = std::strtoll(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0') {
        throw InvalidArgumentError("parameter '" + name + "' is not an integer: " + it->second);
    }
    return static_cast<std::int64_t>(v);
}

double Params::get_double(const std::string& name, double fallback) const {
    auto it = values_.find(name);
    if (it == values_.end()) {
        return fallback;
    }
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0') {
        throw InvalidArgumentError("parameter '" + name + "' is not a number: " + it->second);
    }
    return v;
}

std::string Params::get_string(const std::string& name, const std::string& fallback) const {
    auto it = values_.find(name);
    return it == values_.end() ? fallback : it->second;
}

Params Params::merged(const Params& overrides) const {
    Params out = *this;
    for (const auto& [k, v] : overrides.values_) {
        out.values_[k] = v;
    }
    return out;
}

} // namespace envkit
