#include "envkit/fileio.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "envkit/errors.hpp"
#include "envkit/nn.hpp"

namespace envkit::io {
namespace {

constexpr char kMagic[8] = {'E', 'K', 'C', 'K', 'P', 'T', '0', '\n'};

void append_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

std::uint32_t read_u32(const std::string& bytes, std::size_t& at) {
    if (at + 4 > bytes.size()) {
        throw ParseError("checkpoint: truncated");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + static_cast<std::size_t>(i)]))
             << (8 * i);
    }
    at += 4;
    return v;
}

} // namespace

void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open for writing: " + tmp);
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw Error("write failed: " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error("rename failed: " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open: " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Params parse_config(const std::string& text) {
    Params params;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            continue;
        }
        std::size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) {
            key.pop_back();
        }
        std::size_t vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        params.set(key, value);
    }
    return params;
}

Params load_config(const std::string& path) {
    return parse_config(read_file(path));
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
    std::string out(kMagic, sizeof(kMagic));
    append_u32(out, ckpt.version);
    append_u32(out, ckpt.shared_torso);
    append_u32(out, static_cast<std::uint32_t>(ckpt.layer_dims.size()));
    for (std::uint32_t d : ckpt.layer_dims) {
        append_u32(out, d);
    }
    append_u32(out, static_cast<std::uint32_t>(ckpt.data.size()));
    for (double v : ckpt.data) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
        }
    }
    return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw ParseError("checkpoint: bad magic");
    }
    std::size_t at = sizeof(kMagic);
    Checkpoint ckpt;
    ckpt.version = read_u32(bytes, at);
    if (ckpt.version != 1) {
        throw ParseError("checkpoint: unsupported version " + std::to_string(ckpt.version));
    }
    ckpt.shared_torso = read_u32(bytes, at);
    const std::uint32_t num_dims = read_u32(bytes, at);
    ckpt.layer_dims.resize(num_dims);
    for (std::uint32_t i = 0; i < num_dims; ++i) {
        ckpt.layer_dims[i] = read_u32(bytes, at);
    }
    const std::uint32_t count = read_u32(bytes, at);
    if (at + static_cast<std::size_t>(count) * 8 != bytes.size()) {
        throw ParseError("checkpoint: wrong payload size");
    }
    ckpt.data.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) {
            bits |= static_cast<std::uint64_t>(
                        static_cast<unsigned char>(bytes[at + static_cast<std::size_t>(k)]))
                    << (8 * k);
        }
        at += 8;
        double v = 0;
        std::memcpy(&v, &bits, sizeof(v));
        ckpt.data[i] = v;
    }
    return ckpt;
}

Checkpoint checkpoint_from_mlp(const nn::MlpParams& params) {
    Checkpoint ckpt;
    ckpt.version = 1;
    ckpt.shared_torso = params.shared_torso ? 1 : 0;
    ckpt.layer_dims = nn::layer_dims(params);
    ckpt.data = nn::to_flat(params);
    return ckpt;
}

nn::MlpParams mlp_from_checkpoint(const Checkpoint& ckpt) {
    nn::MlpParams params;
    params.shared_torso = ckpt.shared_torso != 0;
    // layer_dims layout: per stack (torso, policy, value): count, then
    // (in, out) per layer.
    std::size_t at = 0;
    const auto read = [&]() -> std::uint32_t {
        if (at >= ckpt.layer_dims.size()) {
            throw ParseError("checkpoint: truncated layer dims");
        }
        return ckpt.layer_dims[at++];
    };
    nn::Stack* stacks[3] = {&params.torso, &params.policy, &params.value};
    for (nn::Stack* stack : stacks) {
        const std::uint32_t count = read();
        for (std::uint32_t l = 0; l < count; ++l) {
            nn::Linear layer;
            layer.in = static_cast<int>(read());
            layer.out = static_cast<int>(read());
            layer.w.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
            layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
            stack->push_back(std::move(layer));
        }
    }
    if (params.policy.empty() || params.value.empty()) {
        throw ParseError("checkpoint: missing policy or value stack");
    }
    params.num_logits = params.policy.back().out;
    if (params.shared_torso) {
        if (params.torso.empty()) {
            throw ParseError("checkpoint: shared torso flag without torso layers");
        }
        params.input_dim = params.torso.front().in;
        for (const auto& layer : params.torso) {
            params.hidden.push_back(layer.out);
        }
    } else {
        params.input_dim = params.policy.front().in;
        for (std::size_t l = 0; l + 1 < params.policy.size(); ++l) {
            params.hidden.push_back(params.policy[l].out);
        }
    }
    if (nn::param_count(params) != ckpt.data.size()) {
        throw ParseError("checkpoint: parameter count mismatch");
    }
    nn::from_flat(params, ckpt.data);
    return params;
}

} // namespace envkit::io
