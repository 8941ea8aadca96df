#pragma once
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "envkit/env.hpp"
#include "envkit/params.hpp"

namespace envkit {

// Registered environment: a stable versioned id, its builder and the default
// configuration the id stands for.
struct EnvDescriptor {
    std::string id; // must end in "-v<N>"
    std::string category;
    std::string objective;
    Params default_params;
    std::function<std::shared_ptr<Environment>(const std::string& id, const Params&)> builder;
};

class Registry {
  public:
    // Duplicate ids raise ConflictError; malformed ids raise
    // InvalidArgumentError.
    void register_env(EnvDescriptor desc);

    // Builds the environment for `id` with defaults updated by `overrides`.
    // Unknown ids raise NotFoundError listing the nearest registered ids.
    std::shared_ptr<Environment> make(const std::string& id, const Params& overrides = {}) const;

    bool contains(const std::string& id) const;
    const EnvDescriptor& descriptor(const std::string& id) const;
    // Registration order (the stable listing order of the CLI).
    const std::vector<EnvDescriptor>& descriptors() const { return order_; }

    // Parses the "-v<N>" suffix; returns the version number.
    static int parse_version(const std::string& id);

  private:
    std::vector<EnvDescriptor> order_;
};

// Process-wide registry pre-populated with the standard environments.
const Registry& default_registry();

} // namespace envkit
