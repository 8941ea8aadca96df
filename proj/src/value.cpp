#include "envkit/value.hpp"

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

} // namespace

Value Value::tensor_f(std::vector<std::int64_t> shape, std::vector<double> data) {
    if (shape_numel(shape) != static_cast<std::int64_t>(data.size())) {
        throw InvalidArgumentError("tensor_f: shape does not match data size");
    }
    Value out;
    out.kind_ = Kind::FloatTensor;
    out.shape_ = std::move(shape);
    out.fdata_ = std::move(data);
    return out;
}

Value Value::tensor_i(std::vector<std::int64_t> shape, std::vector<std::int64_t> data) {
    if (shape_numel(shape) != static_cast<std::int64_t>(data.size())) {
        throw InvalidArgumentError("tensor_i: shape does not match data size");
    }
    Value out;
    out.kind_ = Kind::IntTensor;
    out.shape_ = std::move(shape);
    out.idata_ = std::move(data);
    return out;
}

std::int64_t Value::numel() const {
    switch (kind_) {
        case Kind::FloatTensor: return static_cast<std::int64_t>(fdata_.size());
        case Kind::IntTensor: return static_cast<std::int64_t>(idata_.size());
        case Kind::Map: {
            std::int64_t n = 0;
            for (const auto& [name, c] : children_) {
                n += c.numel();
            }
            return n;
        }
    }
    return 0;
}

const Value& Value::child(std::string_view name) const {
    for (const auto& [n, c] : children_) {
        if (n == name) {
            return c;
        }
    }
    throw NotFoundError("value has no child named '" + std::string(name) + "'");
}

bool Value::has_child(std::string_view name) const {
    for (const auto& [n, c] : children_) {
        if (n == name) {
            return true;
        }
    }
    return false;
}

void Value::flatten_into(std::vector<double>& out) const {
    switch (kind_) {
        case Kind::FloatTensor:
            out.insert(out.end(), fdata_.begin(), fdata_.end());
            break;
        case Kind::IntTensor:
            for (std::int64_t v : idata_) {
                out.push_back(static_cast<double>(v));
            }
            break;
        case Kind::Map:
            for (const auto& [name, c] : children_) {
                c.flatten_into(out);
            }
            break;
    }
}

std::vector<double> Value::flatten() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(numel()));
    flatten_into(out);
    return out;
}

} // namespace envkit
