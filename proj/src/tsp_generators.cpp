#include "envkit/tsp_generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "envkit/errors.hpp"

namespace envkit::gen {
namespace {

double clip01(double v) {
    return std::min(1.0, std::max(0.0, v));
}

std::string upper(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<Point> uniform_generate(rng::Key key, int n) {
    if (n < 0) {
        throw InvalidArgumentError("generator: n must be >= 0");
    }
    std::vector<Point> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = {rng::uniform01(key, 2 * static_cast<std::uint64_t>(i)),
                                            rng::uniform01(key, 2 * static_cast<std::uint64_t>(i) + 1)};
    }
    return out;
}

std::vector<Point> cluster_generate(rng::Key key, int n, Point center, double radius) {
    if (radius <= 0) {
        throw InvalidArgumentError("cluster: radius must be > 0");
    }
    std::vector<Point> out(static_cast<std::size_t>(n));
    std::uint64_t draw = 0;
    for (int i = 0; i < n; ++i) {
        // Rejection from the bounding square keeps the disk law exact.
        double dx, dy;
        do {
            dx = (2.0 * rng::uniform01(key, draw++) - 1.0) * radius;
            dy = (2.0 * rng::uniform01(key, draw++) - 1.0) * radius;
        } while (dx * dx + dy * dy > radius * radius);
        out[static_cast<std::size_t>(i)] = {clip01(center[0] + dx), clip01(center[1] + dy)};
    }
    return out;
}

std::vector<Point> compression_generate(rng::Key key, int n, Point a, Point b, double thickness) {
    const double vx = b[0] - a[0];
    const double vy = b[1] - a[1];
    const double len = std::sqrt(vx * vx + vy * vy);
    if (len == 0.0) {
        throw InvalidArgumentError("compression: line endpoints must be distinct");
    }
    if (thickness < 0) {
        throw InvalidArgumentError("compression: thickness must be >= 0");
    }
    const double nx = -vy / len; // unit perpendicular
    const double ny = vx / len;
    std::vector<Point> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = rng::uniform01(key, 2 * static_cast<std::uint64_t>(i));
        const double s = (2.0 * rng::uniform01(key, 2 * static_cast<std::uint64_t>(i) + 1) - 1.0) *
                         thickness;
        out[static_cast<std::size_t>(i)] = {clip01(a[0] + t * vx + s * nx),
                                            clip01(a[1] + t * vy + s * ny)};
    }
    return out;
}

std::vector<Point> explosion_generate(rng::Key key, int n, Point reference, double min_push) {
    if (min_push < 0) {
        throw InvalidArgumentError("explosion: min_push must be >= 0");
    }
    std::vector<Point> out = uniform_generate(key, n);
    if (min_push == 0.0) {
        return out;
    }
    for (auto& p : out) {
        double dx = p[0] - reference[0];
        double dy = p[1] - reference[1];
        double norm = std::sqrt(dx * dx + dy * dy);
        if (norm < 1e-15) { // point atop the reference: push along +x
            dx = 1.0;
            dy = 0.0;
            norm = 1.0;
        }
        p[0] = clip01(p[0] + min_push * dx / norm);
        p[1] = clip01(p[1] + min_push * dy / norm);
    }
    return out;
}

std::size_t mixture_select(rng::Key key, const std::vector<double>& weights) {
    if (weights.empty()) {
        throw InvalidArgumentError("mixture: weights must be non-empty");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0) || !std::isfinite(w)) {
            throw InvalidArgumentError("mixture: weights must be positive and finite");
        }
        total += w;
    }
    const double u = rng::uniform01(key) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) {
            return i;
        }
    }
    return weights.size() - 1;
}

std::vector<TsplibInstance> load_instances(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open instance file: " + path);
    }
    std::vector<TsplibInstance> out;
    std::string line;
    int line_no = 0;

    TsplibInstance cur;
    std::int64_t expected = -1;
    bool in_coords = false;
    bool any_header = false;

    const auto fail = [&](const std::string& why) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": " + why);
    };
    const auto finish = [&]() {
        if (!any_header && !in_coords) {
            return;
        }
        if (expected >= 0 && static_cast<std::int64_t>(cur.coords.size()) != expected) {
            fail("expected " + std::to_string(expected) + " coordinates, got " +
                 std::to_string(cur.coords.size()));
        }
        out.push_back(cur);
        cur = TsplibInstance{};
        expected = -1;
        in_coords = false;
        any_header = false;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        const std::string u = upper(t);
        if (u == "EOF") {
            finish();
            continue;
        }
        if (u == "NODE_COORD_SECTION") {
            if (expected < 0) {
                fail("NODE_COORD_SECTION before DIMENSION");
            }
            in_coords = true;
            continue;
        }
        if (in_coords) {
            std::istringstream ss(t);
            long idx = 0;
            double x = 0, y = 0;
            if (!(ss >> idx >> x >> y)) {
                fail("malformed coordinate line");
            }
            cur.coords.push_back({x, y});
            if (static_cast<std::int64_t>(cur.coords.size()) == expected) {
                in_coords = false;
            }
            continue;
        }
        const auto colon = t.find(':');
        if (colon == std::string::npos) {
            fail("expected 'KEY: value' header line");
        }
        const std::string head = upper(trim(t.substr(0, colon)));
        const std::string value = trim(t.substr(colon + 1));
        any_header = true;
        if (head == "NAME") {
            cur.name = value;
        } else if (head == "DIMENSION") {
            try {
                expected = std::stoll(value);
            } catch (...) {
                fail("DIMENSION is not an integer");
            }
            if (expected < 1) {
                fail("DIMENSION must be >= 1");
            }
        } // unknown header keys ignored
    }
    finish();
    if (out.empty()) {
        throw ParseError(path + ": no instances found");
    }
    return out;
}

std::string write_instance(const TsplibInstance& instance) {
    std::ostringstream ss;
    ss << "NAME: " << (instance.name.empty() ? "instance" : instance.name) << "\n";
    ss << "DIMENSION: " << instance.coords.size() << "\n";
    ss << "NODE_COORD_SECTION\n";
    ss.precision(17);
    for (std::size_t i = 0; i < instance.coords.size(); ++i) {
        ss << (i + 1) << " " << instance.coords[i][0] << " " << instance.coords[i][1] << "\n";
    }
    ss << "EOF\n";
    return ss.str();
}

std::vector<Point> normalize_unit_square(const std::vector<Point>& coords) {
    if (coords.empty()) {
        return {};
    }
    double min_x = coords[0][0], max_x = coords[0][0];
    double min_y = coords[0][1], max_y = coords[0][1];
    for (const auto& p : coords) {
        min_x = std::min(min_x, p[0]);
        max_x = std::max(max_x, p[0]);
        min_y = std::min(min_y, p[1]);
        max_y = std::max(max_y, p[1]);
    }
    const double sx = max_x > min_x ? max_x - min_x : 1.0;
    const double sy = max_y > min_y ? max_y - min_y : 1.0;
    std::vector<Point> out(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        out[i] = {max_x > min_x ? (coords[i][0] - min_x) / sx : 0.0,
                  max_y > min_y ? (coords[i][1] - min_y) / sy : 0.0};
    }
    return out;
}

std::vector<Point> subsample(rng::Key key, const std::vector<Point>& coords, int k) {
    if (k < 0 || k > static_cast<int>(coords.size())) {
        throw InvalidArgumentError("subsample: k out of range");
    }
    const auto perm = rng::permutation(key, static_cast<std::int32_t>(coords.size()));
    std::vector<Point> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        out[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    return out;
}

CoordSource compile_generator(const GeneratorSpec& spec) {
    const int n = spec.num_cities;
    if (n < 2) {
        throw InvalidArgumentError("generator: num_cities must be >= 2");
    }
    if (spec.kind == "uniform") {
        return [n](rng::Key key) { return uniform_generate(key, n); };
    }
    if (spec.kind == "cluster") {
        const Point c = spec.center;
        const double r = spec.radius;
        if (r <= 0) {
            throw InvalidArgumentError("cluster: radius must be > 0");
        }
        return [n, c, r](rng::Key key) { return cluster_generate(key, n, c, r); };
    }
    if (spec.kind == "compression") {
        const Point a = spec.line_a, b = spec.line_b;
        const double t = spec.thickness;
        if (a == b) {
            throw InvalidArgumentError("compression: line endpoints must be distinct");
        }
        return [n, a, b, t](rng::Key key) { return compression_generate(key, n, a, b, t); };
    }
    if (spec.kind == "explosion") {
        const Point ref = spec.reference;
        const double push = spec.min_push;
        return [n, ref, push](rng::Key key) { return explosion_generate(key, n, ref, push); };
    }
    if (spec.kind == "from_file") {
        auto instances = std::make_shared<std::vector<std::vector<Point>>>();
        for (const auto& inst : load_instances(spec.path)) {
            instances->push_back(normalize_unit_square(inst.coords));
        }
        for (const auto& coords : *instances) {
            if (static_cast<int>(coords.size()) < n) {
                throw InvalidArgumentError("from_file: instance smaller than num_cities");
            }
        }
        return [n, instances](rng::Key key) {
            const auto keys = rng::split(key, 2);
            const auto idx = rng::randint(keys[0], 0, static_cast<std::int64_t>(instances->size()));
            const auto& coords = (*instances)[static_cast<std::size_t>(idx)];
            if (static_cast<int>(coords.size()) == n) {
                return coords;
            }
            return subsample(keys[1], coords, n);
        };
    }
    if (spec.kind == "mixture") {
        if (spec.components.size() != spec.weights.size() || spec.components.empty()) {
            throw InvalidArgumentError("mixture: components and weights must have equal size >= 1");
        }
        std::vector<CoordSource> sources;
        sources.reserve(spec.components.size());
        for (auto comp : spec.components) {
            comp.num_cities = n;
            sources.push_back(compile_generator(comp));
        }
        const std::vector<double> weights = spec.weights;
        return [sources, weights](rng::Key key) {
            const auto keys = rng::split(key, 2);
            const std::size_t pick = mixture_select(keys[0], weights);
            return sources[pick](keys[1]);
        };
    }
    throw InvalidArgumentError("generator: unknown kind '" + spec.kind + "'");
}

GeneratorSpec generator_spec_from_params(const Params& params, int num_cities) {
    GeneratorSpec spec;
    spec.num_cities = num_cities;
    spec.kind = params.get_string("generator", "uniform");
    spec.center = {params.get_double("center_x", 0.5), params.get_double("center_y", 0.5)};
    spec.radius = params.get_double("radius", 0.15);
    spec.line_a = {params.get_double("line_ax", 0.1), params.get_double("line_ay", 0.1)};
    spec.line_b = {params.get_double("line_bx", 0.9), params.get_double("line_by", 0.9)};
    spec.thickness = params.get_double("thickness", 0.02);
    spec.reference = {params.get_double("reference_x", 0.5), params.get_double("reference_y", 0.5)};
    spec.min_push = params.get_double("min_push", 0.3);
    spec.path = params.get_string("instance_file", "");

    if (spec.kind.rfind("mixture:", 0) == 0) {
        const std::string list = spec.kind.substr(8);
        GeneratorSpec mix = spec;
        mix.kind = "mixture";
        std::stringstream ss(list);
        std::string item;
        while (std::getline(ss, item, '+')) {
            GeneratorSpec comp = spec;
            comp.kind = item;
            comp.components.clear();
            comp.weights.clear();
            mix.components.push_back(comp);
            mix.weights.push_back(1.0);
        }
        return mix;
    }
    return spec;
}

} // namespace envkit::gen
