#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envkit/value.hpp"

namespace envkit {

// Declarative description of the shape/dtype/bounds of observations and
// actions, arranged as a tree. Leaves are Array / BoundedArray /
// DiscreteArray / MultiDiscreteArray; interior nodes are Composite with
// uniquely named, ordered children.
class Spec {
  public:
    enum class Kind { Array, BoundedArray, DiscreteArray, MultiDiscreteArray, Composite };

    static Spec array(std::vector<std::int64_t> shape, Dtype dtype);
    static Spec bounded(std::vector<std::int64_t> shape, Dtype dtype, double minimum, double maximum);
    static Spec discrete(std::int64_t num_values);
    static Spec multi_discrete(std::vector<std::int64_t> num_values);
    static Spec composite(std::vector<std::pair<std::string, Spec>> children);

    Kind kind() const { return kind_; }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    Dtype dtype() const { return dtype_; }
    double minimum() const { return minimum_; }
    double maximum() const { return maximum_; }
    std::int64_t num_values() const { return num_values_[0]; }
    const std::vector<std::int64_t>& num_values_vector() const { return num_values_; }
    const std::vector<std::pair<std::string, Spec>>& children() const { return children_; }
    const Spec& child(std::string_view name) const;

    struct Failure {
        std::string path;   // slash-separated tree path of the offending node
        std::string reason;
        std::string to_string() const { return path.empty() ? reason : path + ": " + reason; }
    };

    // nullopt = value conforms. Otherwise the failure names the offending
    // path and reason.
    std::optional<Failure> validate(const Value& value) const;

    // Canonical minimal conforming value: zeros, the lower bound, or value 0
    // for discrete specs.
    Value generate_value() const;

  private:
    Kind kind_ = Kind::Array;
    std::vector<std::int64_t> shape_;
    Dtype dtype_ = Dtype::f64;
    double minimum_ = 0.0;
    double maximum_ = 0.0;
    std::vector<std::int64_t> num_values_;
    std::vector<std::pair<std::string, Spec>> children_;

    std::optional<Failure> validate_at(const Value& value, const std::string& path) const;
};

} // namespace envkit
