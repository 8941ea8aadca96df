#pragma once
#include <cstdint>
#include <map>
#include <string>

#include "envkit/errors.hpp"

namespace envkit {

// Flat named-parameter map used by environment constructors, the registry
// and config files. Values are stored as strings and parsed on access.
class Params {
  public:
    Params() = default;
    Params(std::initializer_list<std::pair<const std::string, std::string>> init) : values_(init) {}

    bool has(const std::string& name) const { return values_.count(name) != 0; }

    void set(const std::string& name, std::string value) { values_[name] = std::move(value); }
    void set_int(const std::string& name, std::int64_t v) { values_[name] = std::to_string(v); }
    void set_double(const std::string& name, double v);

    std::int64_t get_int(const std::string& name, std::int64_t fallback) const;
    double get_double(const std::string& name, double fallback) const;
    std::string get_string(const std::string& name, const std::string& fallback) const;

    // This map updated with `overrides`. Unknown-key checks are left to the
    // consumer, which knows the legal key set.
    Params merged(const Params& overrides) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

} // namespace envkit
