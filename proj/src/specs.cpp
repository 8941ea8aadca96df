#include "envkit/specs.hpp"

#include <unordered_set>

#include "envkit/errors.hpp"

namespace envkit {
namespace {

std::int64_t shape_numel(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (std::int64_t d : shape) {
        n *= d;
    }
    return n;
}

std::string shape_str(const std::vector<std::int64_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

} // namespace

Spec Spec::array(std::vector<std::int64_t> shape, Dtype dtype) {
    for (std::int64_t d : shape) {
        if (d < 0) throw InvalidArgumentError("spec: negative dimension");
    }
    Spec s;
    s.kind_ = Kind::Array;
    s.shape_ = std::move(shape);
    s.dtype_ = dtype;
    return s;
}

Spec Spec::bounded(std::vector<std::int64_t> shape, Dtype dtype, double minimum, double maximum) {
    if (!(minimum <= maximum)) {
        throw InvalidArgumentError("spec: bounded requires minimum <= maximum");
    }
    Spec s = array(std::move(shape), dtype);
    s.kind_ = Kind::BoundedArray;
    s.minimum_ = minimum;
    s.maximum_ = maximum;
    return s;
}

Spec Spec::discrete(std::int64_t num_values) {
    if (num_values < 1) {
        throw InvalidArgumentError("spec: discrete requires num_values >= 1");
    }
    Spec s;
    s.kind_ = Kind::DiscreteArray;
    s.dtype_ = Dtype::i64;
    s.num_values_ = {num_values};
    return s;
}

Spec Spec::multi_discrete(std::vector<std::int64_t> num_values) {
    for (std::int64_t n : num_values) {
        if (n < 1) throw InvalidArgumentError("spec: multi_discrete requires num_values >= 1");
    }
    Spec s;
    s.kind_ = Kind::MultiDiscreteArray;
    s.dtype_ = Dtype::i64;
    s.shape_ = {static_cast<std::int64_t>(num_values.size())};
    s.num_values_ = std::move(num_values);
    return s;
}

Spec Spec::composite(std::vector<std::pair<std::string, Spec>> children) {
    std::unordered_set<std::string> names;
    for (const auto& [name, child] : children) {
        if (!names.insert(name).second) {
            throw InvalidArgumentError("spec: duplicate child name '" + name + "'");
        }
    }
    Spec s;
    s.kind_ = Kind::Composite;
    s.children_ = std::move(children);
    return s;
}

const Spec& Spec::child(std::string_view name) const {
    for (const auto& [n, c] : children_) {
        if (n == name) return c;
    }
    throw NotFoundError("spec has no child named '" + std::string(name) + "'");
}

std::optional<Spec::Failure> Spec::validate(const Value& value) const {
    return validate_at(value, "");
}

std::optional<Spec::Failure> Spec::validate_at(const Value& value, const std::string& path) const {
    switch (kind_) {
        case Kind::Composite: {
            if (value.kind() != Value::Kind::Map) {
                return Failure{path, "expected a map value"};
            }
            const auto& got = value.children();
            if (got.size() != children_.size()) {
                for (const auto& [name, child] : children_) {
                    if (!value.has_child(name)) {
                        return Failure{path.empty() ? name : path + "/" + name, "missing child"};
                    }
                }
                return Failure{path, "unexpected extra children"};
            }
            for (std::size_t i = 0; i < children_.size(); ++i) {
                const std::string child_path =
                    path.empty() ? children_[i].first : path + "/" + children_[i].first;
                if (got[i].first != children_[i].first) {
                    return Failure{child_path, "child order/name mismatch (got '" + got[i].first + "')"};
                }
                if (auto f = children_[i].second.validate_at(got[i].second, child_path)) {
                    return f;
                }
            }
            return std::nullopt;
        }
        case Kind::Array:
        case Kind::BoundedArray: {
            const bool want_float = dtype_ == Dtype::f64;
            if (want_float && value.kind() != Value::Kind::FloatTensor) {
                return Failure{path, "expected float tensor"};
            }
            if (!want_float && value.kind() != Value::Kind::IntTensor) {
                return Failure{path, "expected int tensor"};
            }
            if (value.shape() != shape_) {
                return Failure{path, "shape mismatch: expected " + shape_str(shape_) + ", got " +
                                         shape_str(value.shape())};
            }
            if (kind_ == Kind::BoundedArray) {
                if (want_float) {
                    for (double v : value.floats()) {
                        if (!(v >= minimum_ && v <= maximum_)) {
                            return Failure{path, "out of range"};
                        }
                    }
                } else {
                    for (std::int64_t v : value.ints()) {
                        const double d = static_cast<double>(v);
                        if (!(d >= minimum_ && d <= maximum_)) {
                            return Failure{path, "out of range"};
                        }
                    }
                }
            }
            return std::nullopt;
        }
        case Kind::DiscreteArray: {
            if (value.kind() != Value::Kind::IntTensor || !value.shape().empty()) {
                return Failure{path, "expected int scalar"};
            }
            const std::int64_t v = value.ints()[0];
            if (v < 0 || v >= num_values_[0]) {
                return Failure{path, "out of range"};
            }
            return std::nullopt;
        }
        case Kind::MultiDiscreteArray: {
            if (value.kind() != Value::Kind::IntTensor || value.shape() != shape_) {
                return Failure{path, "expected int vector of length " +
                                         std::to_string(num_values_.size())};
            }
            for (std::size_t i = 0; i < num_values_.size(); ++i) {
                const std::int64_t v = value.ints()[i];
                if (v < 0 || v >= num_values_[i]) {
                    return Failure{path, "component " + std::to_string(i) + " out of range"};
                }
            }
            return std::nullopt;
        }
    }
    return Failure{path, "unknown spec kind"};
}

Value Spec::generate_value() const {
    switch (kind_) {
        case Kind::Composite: {
            std::vector<std::pair<std::string, Value>> out;
            out.reserve(children_.size());
            for (const auto& [name, child] : children_) {
                out.emplace_back(name, child.generate_value());
            }
            return Value::map(std::move(out));
        }
        case Kind::Array:
        case Kind::BoundedArray: {
            const std::int64_t n = shape_numel(shape_);
            const double fill = kind_ == Kind::BoundedArray ? minimum_ : 0.0;
            if (dtype_ == Dtype::f64) {
                return Value::tensor_f(shape_, std::vector<double>(static_cast<std::size_t>(n), fill));
            }
            return Value::tensor_i(shape_, std::vector<std::int64_t>(static_cast<std::size_t>(n),
                                                                     static_cast<std::int64_t>(fill)));
        }
        case Kind::DiscreteArray:
            return Value::scalar_i(0);
        case Kind::MultiDiscreteArray:
            return Value::tensor_i(shape_, std::vector<std::int64_t>(num_values_.size(), 0));
    }
    return Value::scalar_i(0);
}

} // namespace envkit
