#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace envkit {

enum class Dtype { f64, i64 };

// Nested observation/action value: a tree whose leaves are dense tensors of
// doubles or 64-bit ints and whose interior nodes are ordered name->child
// maps. Rank-0 tensors represent scalars.
class Value {
  public:
    enum class Kind { FloatTensor, IntTensor, Map };

    Value() : kind_(Kind::Map) {}

    static Value scalar_f(double v) {
        Value out;
        out.kind_ = Kind::FloatTensor;
        out.fdata_ = {v};
        return out;
    }
    static Value scalar_i(std::int64_t v) {
        Value out;
        out.kind_ = Kind::IntTensor;
        out.idata_ = {v};
        return out;
    }
    static Value tensor_f(std::vector<std::int64_t> shape, std::vector<double> data);
    static Value tensor_i(std::vector<std::int64_t> shape, std::vector<std::int64_t> data);
    static Value map(std::vector<std::pair<std::string, Value>> children) {
        Value out;
        out.kind_ = Kind::Map;
        out.children_ = std::move(children);
        return out;
    }

    Kind kind() const { return kind_; }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    const std::vector<double>& floats() const { return fdata_; }
    const std::vector<std::int64_t>& ints() const { return idata_; }
    const std::vector<std::pair<std::string, Value>>& children() const { return children_; }

    std::int64_t numel() const;

    // Child lookup by name; throws NotFoundError when absent.
    const Value& child(std::string_view name) const;
    bool has_child(std::string_view name) const;

    // Depth-first append of every leaf entry, ints cast to double.
    void flatten_into(std::vector<double>& out) const;
    std::vector<double> flatten() const;

    friend bool operator==(const Value&, const Value&) = default;

  private:
    Kind kind_;
    std::vector<std::int64_t> shape_; // tensors only; empty = scalar
    std::vector<double> fdata_;
    std::vector<std::int64_t> idata_;
    std::vector<std::pair<std::string, Value>> children_;
};

} // namespace envkit
