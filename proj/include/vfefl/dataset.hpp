#pragma once

// Dataset handling: IDX-format files (MNIST layout: big-endian magic + dims),
// synthetic Gaussian-blob classification tasks, deterministic subsetting and
// the root/client sharding used by the simulator.

#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfefl/rng.hpp"

namespace vfefl::fl {

struct BadMagic : std::runtime_error {
    explicit BadMagic(const std::string& what) : std::runtime_error(what) {}
};
struct TruncatedFile : std::runtime_error {
    explicit TruncatedFile(const std::string& what) : std::runtime_error(what) {}
};

struct Dataset {
    uint32_t dim = 0;
    uint32_t classes = 0;
    std::vector<float> x;  // row-major, size() = n * dim, values in [0,1]
    std::vector<int32_t> y;

    size_t size() const { return y.size(); }
    const float* row(size_t i) const { return x.data() + i * dim; }
};

namespace detail {

inline uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw TruncatedFile("truncated IDX header: " + path);
    return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

}  // namespace detail

struct IdxImages {
    uint32_t count = 0, rows = 0, cols = 0;
    std::vector<uint8_t> pixels;
};

inline IdxImages load_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TruncatedFile("cannot open " + path);
    uint32_t magic = detail::read_be32(in, path);
    if (magic != 0x00000803u) throw BadMagic("bad image magic in " + path);
    IdxImages out;
    out.count = detail::read_be32(in, path);
    out.rows = detail::read_be32(in, path);
    out.cols = detail::read_be32(in, path);
    size_t total = size_t(out.count) * out.rows * out.cols;
    out.pixels.resize(total);
    in.read(reinterpret_cast<char*>(out.pixels.data()), static_cast<std::streamsize>(total));
    if (static_cast<size_t>(in.gcount()) != total) throw TruncatedFile("truncated image data in " + path);
    return out;
}

inline std::vector<uint8_t> load_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TruncatedFile("cannot open " + path);
    uint32_t magic = detail::read_be32(in, path);
    if (magic != 0x00000801u) throw BadMagic("bad label magic in " + path);
    uint32_t count = detail::read_be32(in, path);
    std::vector<uint8_t> out(count);
    in.read(reinterpret_cast<char*>(out.data()), count);
    if (static_cast<size_t>(in.gcount()) != count) throw TruncatedFile("truncated label data in " + path);
    return out;
}

inline Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    IdxImages img = load_idx_images(images_path);
    std::vector<uint8_t> lbl = load_idx_labels(labels_path);
    if (lbl.size() != img.count) throw TruncatedFile("image/label count mismatch");
    Dataset ds;
    ds.dim = img.rows * img.cols;
    ds.x.resize(size_t(img.count) * ds.dim);
    for (size_t i = 0; i < img.pixels.size(); i++) ds.x[i] = static_cast<float>(img.pixels[i]) / 255.0f;
    ds.y.assign(lbl.begin(), lbl.end());
    uint32_t maxl = 0;
    for (int32_t l : ds.y) maxl = std::max<uint32_t>(maxl, static_cast<uint32_t>(l));
    ds.classes = maxl + 1;
    return ds;
}

inline Dataset take(const Dataset& ds, const std::vector<uint32_t>& idx) {
    Dataset out;
    out.dim = ds.dim;
    out.classes = ds.classes;
    out.x.resize(idx.size() * ds.dim);
    out.y.resize(idx.size());
    for (size_t k = 0; k < idx.size(); k++) {
        const float* r = ds.row(idx[k]);
        std::copy(r, r + ds.dim, out.x.begin() + k * ds.dim);
        out.y[k] = ds.y[idx[k]];
    }
    return out;
}

// deterministic random subset of the given size
inline Dataset subset(const Dataset& ds, size_t count, Rng& rng) {
    std::vector<uint32_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    idx.resize(std::min(count, idx.size()));
    return take(ds, idx);
}

// label flip l -> M - l - 1
inline Dataset flip_labels(const Dataset& ds) {
    Dataset out = ds;
    for (auto& l : out.y) l = static_cast<int32_t>(ds.classes) - l - 1;
    return out;
}

struct Shards {
    Dataset root;                 // D_0, disjoint from the client shards
    std::vector<Dataset> clients;
};

inline Shards shard_dataset(const Dataset& ds, uint32_t n_clients, size_t root_size,
                            size_t per_client, Rng& rng) {
    std::vector<uint32_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    size_t need = root_size + size_t(n_clients) * per_client;
    if (need > idx.size()) throw std::invalid_argument("shard_dataset: dataset too small");
    Shards out;
    out.root = take(ds, std::vector<uint32_t>(idx.begin(), idx.begin() + root_size));
    size_t pos = root_size;
    for (uint32_t c = 0; c < n_clients; c++) {
        out.clients.push_back(take(ds, std::vector<uint32_t>(idx.begin() + pos, idx.begin() + pos + per_client)));
        pos += per_client;
    }
    return out;
}

// Gaussian class blobs; linearly separable enough for fast logistic tasks.
inline Dataset synth_blobs(size_t samples, uint32_t dim, uint32_t classes, double spread, Rng& rng) {
    Dataset ds;
    ds.dim = dim;
    ds.classes = classes;
    std::vector<double> centers(size_t(classes) * dim);
    for (auto& c : centers) c = rng.gaussian(1.0);
    ds.x.resize(samples * dim);
    ds.y.resize(samples);
    for (size_t i = 0; i < samples; i++) {
        uint32_t cls = static_cast<uint32_t>(rng.below(classes));
        ds.y[i] = static_cast<int32_t>(cls);
        for (uint32_t d = 0; d < dim; d++) {
            double v = centers[size_t(cls) * dim + d] + rng.gaussian(spread);
            ds.x[i * dim + d] = static_cast<float>(0.5 + 0.15 * v);
        }
    }
    return ds;
}

}  // namespace vfefl::fl
