#pragma once
#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "envkit/params.hpp"
#include "envkit/rng.hpp"

namespace envkit::gen {

using Point = std::array<double, 2>;

// Initial-state coordinate distributions for routing instances. All
// generators emit points inside the unit square (clipped when an offset
// pushes a point out).

// i.i.d. uniform points in [0,1)^2.
std::vector<Point> uniform_generate(rng::Key key, int n);

// Uniform over the disk of `radius` around `center` (rejection from the
// bounding square), then clipped to the unit square.
std::vector<Point> cluster_generate(rng::Key key, int n, Point center, double radius);

// Uniform along the segment [a, b] plus a perpendicular offset uniform in
// [-thickness, thickness], clipped to the unit square.
std::vector<Point> compression_generate(rng::Key key, int n, Point a, Point b, double thickness);

// Uniform points translated radially away from `reference` by `min_push`,
// clipped to the unit square. min_push = 0 reproduces uniform_generate
// under the same key.
std::vector<Point> explosion_generate(rng::Key key, int n, Point reference, double min_push);

// Weighted component selection for mixtures: index i with probability
// weights[i] / sum(weights). Weights must be positive and finite.
std::size_t mixture_select(rng::Key key, const std::vector<double>& weights);

// --- TSPLIB-lite instance files -------------------------------------------
//
// Plain text: header lines `NAME: <s>` and `DIMENSION: <n>` (case
// insensitive, unknown keys ignored), then `NODE_COORD_SECTION`, n lines
// `<index> <x> <y>`, then `EOF`. A file may concatenate several instances.

struct TsplibInstance {
    std::string name;
    std::vector<Point> coords; // as stored in the file
};

std::vector<TsplibInstance> load_instances(const std::string& path);
std::string write_instance(const TsplibInstance& instance);

// Min-max scales each axis to [0,1]; an axis with zero extent maps to 0.
std::vector<Point> normalize_unit_square(const std::vector<Point>& coords);

// k distinct cities chosen by keyed permutation (first k entries, in
// permutation order). k <= coords.size().
std::vector<Point> subsample(rng::Key key, const std::vector<Point>& coords, int k);

// --- Generator configuration ----------------------------------------------

// kind: uniform | cluster | compression | explosion | from_file | mixture.
// Mixture components are drawn with probability proportional to `weights`;
// selection and generation use independent key splits.
struct GeneratorSpec {
    std::string kind = "uniform";
    int num_cities = 20;
    Point center{0.5, 0.5};
    double radius = 0.15;
    Point line_a{0.1, 0.1};
    Point line_b{0.9, 0.9};
    double thickness = 0.02;
    Point reference{0.5, 0.5};
    double min_push = 0.3;
    std::string path; // from_file
    std::vector<GeneratorSpec> components;
    std::vector<double> weights;
};

// Pure coordinate source compiled from a GeneratorSpec; from_file data is
// loaded once at compile time so sampling stays pure.
using CoordSource = std::function<std::vector<Point>(rng::Key)>;

CoordSource compile_generator(const GeneratorSpec& spec);

// Reads generator fields from env params (generator, radius, center_x, ...).
// The mixture kind is spelled "mixture:<k1>+<k2>+..." with equal weights.
GeneratorSpec generator_spec_from_params(const Params& params, int num_cities);

} // namespace envkit::gen
