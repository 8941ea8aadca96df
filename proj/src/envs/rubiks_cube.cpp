#include "envkit/envs/rubiks_cube.hpp"

#include <array>

#include "envkit/render.hpp"

namespace envkit::envs {
namespace {

struct Vec3 {
    int x, y, z;
};

// Face order {U, F, R, B, L, D}; outward normals.
constexpr std::array<Vec3, 6> kNormals = {{{0, 1, 0},
                                           {0, 0, 1},
                                           {1, 0, 0},
                                           {0, 0, -1},
                                           {-1, 0, 0},
                                           {0, -1, 0}}};

Vec3 sticker_position(int n, int face, int i, int j) {
    const int m = n - 1;
    switch (face) {
        case 0: return {j, m, i};          // up
        case 1: return {j, m - i, m};      // front
        case 2: return {m, m - i, m - j};  // right
        case 3: return {m - j, m - i, 0};  // back
        case 4: return {0, m - i, j};      // left
        default: return {j, 0, m - i};     // down
    }
}

int face_from_normal(const Vec3& nrm) {
    for (int f = 0; f < 6; ++f) {
        if (kNormals[static_cast<std::size_t>(f)].x == nrm.x &&
            kNormals[static_cast<std::size_t>(f)].y == nrm.y &&
            kNormals[static_cast<std::size_t>(f)].z == nrm.z) {
            return f;
        }
    }
    throw Error("cube: normal does not match any face");
}

// (row, col) of a sticker on `face` given its cubelet position.
std::pair<int, int> sticker_coords(int n, int face, const Vec3& p) {
    const int m = n - 1;
    switch (face) {
        case 0: return {p.z, p.x};
        case 1: return {m - p.y, p.x};
        case 2: return {m - p.y, m - p.z};
        case 3: return {m - p.y, m - p.x};
        case 4: return {m - p.y, p.z};
        default: return {m - p.z, p.x};
    }
}

// One quarter turn clockwise as seen from the positive end of `axis`
// (0 = x, 1 = y, 2 = z), acting on positions (affine) or normals (linear).
Vec3 rotate_position(const Vec3& p, int axis, int m) {
    switch (axis) {
        case 0: return {p.x, p.z, m - p.y};
        case 1: return {m - p.z, p.y, p.x};
        default: return {p.y, m - p.x, p.z};
    }
}

Vec3 rotate_normal(const Vec3& v, int axis) {
    switch (axis) {
        case 0: return {v.x, v.z, -v.y};
        case 1: return {-v.z, v.y, v.x};
        default: return {v.y, -v.x, v.z};
    }
}

int axis_of_face(int face) {
    const Vec3& nrm = kNormals[static_cast<std::size_t>(face)];
    return nrm.x != 0 ? 0 : (nrm.y != 0 ? 1 : 2);
}

int axis_coord(const Vec3& p, int axis) {
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

// Gather table: result[t] = src[table[t]].
std::vector<std::int32_t> build_move_table(int n, int face, int depth, int direction) {
    const int m = n - 1;
    const int axis = axis_of_face(face);
    const Vec3& nrm = kNormals[static_cast<std::size_t>(face)];
    const bool positive = axis_coord(nrm, axis) > 0;
    const int layer = positive ? m - depth : depth;
    const int quarter = direction == 0 ? 1 : (direction == 1 ? 3 : 2);
    const int turns = positive ? quarter : (4 - quarter) % 4;

    const int total = 6 * n * n;
    std::vector<std::int32_t> table(static_cast<std::size_t>(total));
    for (std::int32_t t = 0; t < total; ++t) {
        table[static_cast<std::size_t>(t)] = t;
    }
    for (int f = 0; f < 6; ++f) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                Vec3 p = sticker_position(n, f, i, j);
                if (axis_coord(p, axis) != layer) {
                    continue;
                }
                Vec3 nv = kNormals[static_cast<std::size_t>(f)];
                for (int q = 0; q < turns; ++q) {
                    p = rotate_position(p, axis, m);
                    nv = rotate_normal(nv, axis);
                }
                const int nf = face_from_normal(nv);
                const auto [ni, nj] = sticker_coords(n, nf, p);
                const int src = (f * n + i) * n + j;
                const int dst = (nf * n + ni) * n + nj;
                table[static_cast<std::size_t>(dst)] = src;
            }
        }
    }
    return table;
}

} // namespace

std::vector<std::int8_t> cube_move(std::span<const std::int8_t> stickers, int cube_size, int face,
                                   int depth, int direction) {
    if (cube_size < 2) {
        throw InvalidArgumentError("cube: cube_size must be >= 2");
    }
    if (face < 0 || face > 5 || depth < 0 || depth >= cube_size / 2 || direction < 0 ||
        direction > 2) {
        throw InvalidActionError("cube: move indices out of range");
    }
    if (stickers.size() != static_cast<std::size_t>(6 * cube_size * cube_size)) {
        throw InvalidArgumentError("cube: sticker buffer has wrong size");
    }
    const auto table = build_move_table(cube_size, face, depth, direction);
    std::vector<std::int8_t> out(stickers.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
        out[t] = stickers[static_cast<std::size_t>(table[t])];
    }
    return out;
}

bool cube_solved(std::span<const std::int8_t> stickers, int cube_size) {
    const int per_face = cube_size * cube_size;
    for (int f = 0; f < 6; ++f) {
        const std::int8_t c0 = stickers[static_cast<std::size_t>(f * per_face)];
        for (int k = 1; k < per_face; ++k) {
            if (stickers[static_cast<std::size_t>(f * per_face + k)] != c0) {
                return false;
            }
        }
    }
    return true;
}

RubiksCube::RubiksCube(const Params& params)
    : cube_size_(static_cast<int>(params.get_int("cube_size", 3))),
      num_depths_(cube_size_ / 2),
      num_scrambles_(static_cast<int>(params.get_int("num_scrambles", 100))),
      step_limit_(static_cast<int>(params.get_int("step_limit", 200))) {
    if (cube_size_ < 2) {
        throw InvalidArgumentError("cube: cube_size must be >= 2");
    }
    if (num_scrambles_ < 0 || step_limit_ < 1) {
        throw InvalidArgumentError("cube: num_scrambles >= 0 and step_limit >= 1 required");
    }
    auto tables = std::make_shared<std::vector<std::vector<std::int32_t>>>();
    tables->reserve(static_cast<std::size_t>(num_moves()));
    for (int face = 0; face < 6; ++face) {
        for (int depth = 0; depth < num_depths_; ++depth) {
            for (int dir = 0; dir < 3; ++dir) {
                tables->push_back(build_move_table(cube_size_, face, depth, dir));
            }
        }
    }
    tables_ = std::move(tables);
}

void RubiksCube::apply_table_move(std::vector<std::int8_t>& stickers, int face, int depth,
                                  int direction, std::vector<std::int8_t>& scratch) const {
    const auto& table =
        (*tables_)[static_cast<std::size_t>((face * num_depths_ + depth) * 3 + direction)];
    scratch.resize(stickers.size());
    for (std::size_t t = 0; t < stickers.size(); ++t) {
        scratch[t] = stickers[static_cast<std::size_t>(table[t])];
    }
    stickers.swap(scratch);
}

void RubiksCube::reset_into(rng::Key key, State& out) const {
    const auto keys = rng::split(key, 2);
    const int per_face = cube_size_ * cube_size_;
    out.stickers.resize(static_cast<std::size_t>(6 * per_face));
    for (int f = 0; f < 6; ++f) {
        for (int k = 0; k < per_face; ++k) {
            out.stickers[static_cast<std::size_t>(f * per_face + k)] = static_cast<std::int8_t>(f);
        }
    }
    std::vector<std::int8_t> scratch;
    for (int s = 0; s < num_scrambles_; ++s) {
        const rng::Key move_key = rng::fold_in(keys[1], static_cast<std::uint64_t>(s));
        const int face = static_cast<int>(rng::randint_at(move_key, 0, 0, 6));
        const int depth = static_cast<int>(rng::randint_at(move_key, 1, 0, num_depths_));
        const int dir = static_cast<int>(rng::randint_at(move_key, 2, 0, 3));
        apply_table_move(out.stickers, face, depth, dir, scratch);
    }
    out.step_count = 0;
    out.key = keys[0];
    out.done = false;
}

void RubiksCube::step_inplace(State& s, const Action& a, StepRecord& rec) const {
    if (s.done) {
        throw ContractViolationError("cube: stepping a terminal state");
    }
    if (a.size() != 3) {
        throw InvalidActionError("cube: action must be (face, depth, direction)");
    }
    const int face = static_cast<int>(a[0]);
    const int depth = static_cast<int>(a[1]);
    const int dir = static_cast<int>(a[2]);
    if (face < 0 || face > 5 || depth < 0 || depth >= num_depths_ || dir < 0 || dir > 2) {
        throw InvalidActionError("cube: move indices out of range");
    }
    std::vector<std::int8_t> scratch;
    apply_table_move(s.stickers, face, depth, dir, scratch);
    s.step_count += 1;
    if (cube_solved(s.stickers, cube_size_)) {
        s.done = true;
        rec = StepRecord{StepType::Last, 1.0, 0.0};
    } else if (s.step_count >= step_limit_) {
        s.done = true;
        rec = StepRecord{StepType::Last, 0.0, 1.0}; // truncation
    } else {
        rec = StepRecord{StepType::Mid, 0.0, 1.0};
    }
}

Value RubiksCube::observe(const State& s) const {
    std::vector<std::int64_t> stickers(s.stickers.begin(), s.stickers.end());
    return Value::map({
        {"stickers", Value::tensor_i({6, cube_size_, cube_size_}, std::move(stickers))},
        {"step_count", Value::scalar_i(s.step_count)},
    });
}

void RubiksCube::metrics_into(const State& s, Extras& out) const {
    out.emplace_back("solved", cube_solved(s.stickers, cube_size_) ? 1.0 : 0.0);
}

std::vector<char> RubiksCube::action_mask(const State&) const {
    // Every turn is always legal.
    return std::vector<char>(static_cast<std::size_t>(6 + num_depths_ + 3), 1);
}

Spec RubiksCube::observation_spec() const {
    return Spec::composite({
        {"stickers", Spec::bounded({6, cube_size_, cube_size_}, Dtype::i64, 0, 5)},
        {"step_count", Spec::array({}, Dtype::i64)},
    });
}

Spec RubiksCube::action_spec() const {
    return Spec::multi_discrete({6, num_depths_, 3});
}

void RubiksCube::flat_obs_into(const State& s, std::span<double> out) const {
    // One-hot colors per sticker.
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < s.stickers.size(); ++k) {
        out[k * 6 + static_cast<std::size_t>(s.stickers[k])] = 1.0;
    }
}

RenderOut RubiksCube::render(const State& s) const {
    // Unfolded cross: U above F, then L F R B in a row, D below F.
    const int n = cube_size_;
    Raster img = Raster::for_grid(3 * n, 4 * n);
    static constexpr std::uint8_t kColors[6][3] = {
        {255, 255, 255}, {0, 158, 96}, {200, 16, 46}, {0, 81, 186}, {255, 136, 0}, {255, 213, 0}};
    const auto draw_face = [&](int face, int row0, int col0) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const auto c = s.stickers[static_cast<std::size_t>((face * n + i) * n + j)];
                img.fill_cell(row0 + i, col0 + j, kColors[c][0], kColors[c][1], kColors[c][2]);
            }
        }
    };
    draw_face(0, 0, n);      // up
    draw_face(4, n, 0);      // left
    draw_face(1, n, n);      // front
    draw_face(2, n, 2 * n);  // right
    draw_face(3, n, 3 * n);  // back
    draw_face(5, 2 * n, n);  // down
    return img.to_render_out();
}

RubiksCube::Slab::Slab(const RubiksCube& env, int batch)
    : stride_(6 * env.cube_size() * env.cube_size()),
      stickers_(static_cast<std::size_t>(batch) * stride_),
      steps_(static_cast<std::size_t>(batch)),
      keys_(static_cast<std::size_t>(batch)),
      done_(static_cast<std::size_t>(batch)) {}

void RubiksCube::Slab::store(int i, const State& s) {
    std::copy(s.stickers.begin(), s.stickers.end(),
              stickers_.begin() + static_cast<std::ptrdiff_t>(i) * stride_);
    steps_[static_cast<std::size_t>(i)] = s.step_count;
    keys_[static_cast<std::size_t>(i)] = s.key;
    done_[static_cast<std::size_t>(i)] = s.done;
}

void RubiksCube::Slab::load_into(int i, State& out) const {
    out.stickers.assign(stickers_.begin() + static_cast<std::ptrdiff_t>(i) * stride_,
                        stickers_.begin() + static_cast<std::ptrdiff_t>(i + 1) * stride_);
    out.step_count = steps_[static_cast<std::size_t>(i)];
    out.key = keys_[static_cast<std::size_t>(i)];
    out.done = done_[static_cast<std::size_t>(i)] != 0;
}

std::shared_ptr<Environment> make_rubiks_cube(const std::string& id, const Params& params) {
    return make_env(id, RubiksCube(params));
}

} // namespace envkit::envs
