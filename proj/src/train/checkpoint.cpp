// Copyright 2026 The marsseg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "marsseg/train/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <unordered_map>

#include "marsseg/common.hpp"

namespace marsseg::train {

namespace {

constexpr char kMagic[8] = {'M', 'S', 'E', 'G', 'C', 'K', 'P', '1'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
  public:
    Reader(const std::vector<char>& data, std::string path)
        : data_(data), path_(std::move(path)) {}

    const char* take(size_t n) {
        if (off_ + n > data_.size()) {
            throw DataError(fmt::format("{}: truncated checkpoint (need {} bytes at offset {}, "
                                        "file has {})",
                                        path_, n, off_, data_.size()));
        }
        const char* p = data_.data() + off_;
        off_ += n;
        return p;
    }

    uint32_t u32() {
        const char* p = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(p[i])) << (8 * i);
        return v;
    }

    uint64_t u64() {
        const char* p = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(p[i])) << (8 * i);
        return v;
    }

    size_t offset() const { return off_; }
    size_t remaining() const { return data_.size() - off_; }
    const std::string& path() const { return path_; }

  private:
    const std::vector<char>& data_;
    std::string path_;
    size_t off_ = 0;
};

}  // namespace

Checkpoint snapshot_model(model::SegModel& m, nlohmann::json provenance) {
    Checkpoint ckpt;
    ckpt.encoder = m.encoder_config();
    ckpt.projection = m.projection_config();
    ckpt.atrous = m.atrous_config();
    ckpt.provenance = std::move(provenance);
    for (const nn::NamedTensor& t : m.state()) {
        ckpt.tensors.emplace_back(t.name, *t.tensor);
    }
    return ckpt;
}

void load_into_model(const Checkpoint& ckpt, model::SegModel& m,
                     const std::vector<std::string>& prefixes) {
    std::unordered_map<std::string, const nn::Tensor*> by_name;
    for (const auto& [name, tensor] : ckpt.tensors) by_name[name] = &tensor;

    auto wanted = [&prefixes](const std::string& name) {
        if (prefixes.empty()) return true;
        for (const std::string& p : prefixes) {
            if (name.rfind(p, 0) == 0) return true;
        }
        return false;
    };

    std::vector<std::string> problems;
    std::vector<std::pair<nn::Tensor*, const nn::Tensor*>> plan;
    for (const nn::NamedTensor& t : m.state()) {
        if (!wanted(t.name)) continue;
        auto it = by_name.find(t.name);
        if (it == by_name.end()) {
            problems.push_back(fmt::format("{} missing from checkpoint", t.name));
        } else if (it->second->shape() != t.tensor->shape()) {
            problems.push_back(fmt::format("{} shape {} vs model {}", t.name,
                                           it->second->shape_str(), t.tensor->shape_str()));
        } else {
            plan.emplace_back(t.tensor, it->second);
        }
    }
    if (!problems.empty()) {
        std::string msg = "checkpoint/model mismatch:";
        for (const std::string& p : problems) msg += "\n  " + p;
        throw DataError(msg);
    }
    // apply only after every tensor checked: no partial state on failure
    for (auto& [dst, src] : plan) *dst = *src;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    nlohmann::json config{{"encoder", ckpt.encoder},
                          {"projection", ckpt.projection},
                          {"atrous", ckpt.atrous},
                          {"provenance", ckpt.provenance}};
    const std::string config_str = config.dump();

    std::string header;
    header.append(kMagic, sizeof(kMagic));
    put_u32(header, kVersion);
    put_u64(header, config_str.size());
    header += config_str;

    std::string payload;
    std::string directory;
    put_u64(directory, ckpt.tensors.size());
    for (const auto& [name, tensor] : ckpt.tensors) {
        put_u32(directory, static_cast<uint32_t>(name.size()));
        directory += name;
        directory.push_back(0);  // dtype 0 = f32
        put_u32(directory, static_cast<uint32_t>(tensor.rank()));
        for (int64_t d : tensor.shape()) put_u64(directory, static_cast<uint64_t>(d));
        put_u64(directory, payload.size());
        const size_t bytes = static_cast<size_t>(tensor.size()) * sizeof(float);
        const size_t old = payload.size();
        payload.resize(old + bytes);
        std::memcpy(payload.data() + old, tensor.data(), bytes);
    }
    header += directory;
    put_u64(header, payload.size());
    put_u64(header, fnv1a64(payload.data(), payload.size()));

    std::ofstream out(path, std::ios::binary);
    MSEG_CHECK(out.good(), "cannot write checkpoint {}", path.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.close();
    if (!out.good()) throw Error(fmt::format("short write to {}", path.string()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in.good()) throw DataError(fmt::format("cannot read checkpoint {}", path.string()));
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<char> data(static_cast<size_t>(size));
    in.read(data.data(), size);
    MSEG_CHECK(in.good(), "i/o error reading {}", path.string());

    Reader r(data, path.string());
    const char* magic = r.take(sizeof(kMagic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw DataError(fmt::format("{}: not a checkpoint (bad magic)", path.string()));
    }
    Checkpoint ckpt;
    ckpt.version = r.u32();
    if (ckpt.version != kVersion) {
        throw DataError(fmt::format("{}: unsupported checkpoint version {} (expected {})",
                                    path.string(), ckpt.version, kVersion));
    }
    const uint64_t config_len = r.u64();
    const char* config_bytes = r.take(config_len);
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(config_bytes, config_bytes + config_len);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("{}: corrupt config blob at offset {}: {}", path.string(),
                                    r.offset() - config_len, e.what()));
    }
    ckpt.encoder = config.at("encoder").get<model::EncoderConfig>();
    ckpt.projection = config.at("projection").get<model::ProjectionConfig>();
    ckpt.atrous = config.at("atrous").get<model::AtrousConfig>();
    ckpt.provenance = config.value("provenance", nlohmann::json::object());

    const uint64_t num_tensors = r.u64();
    struct Entry {
        std::string name;
        std::vector<int64_t> shape;
        uint64_t offset;
    };
    std::vector<Entry> entries;
    entries.reserve(num_tensors);
    for (uint64_t i = 0; i < num_tensors; ++i) {
        Entry e;
        const uint32_t name_len = r.u32();
        e.name.assign(r.take(name_len), name_len);
        const uint8_t dtype = static_cast<uint8_t>(*r.take(1));
        if (dtype != 0) {
            throw DataError(fmt::format("{}: tensor {} has unsupported dtype {}", path.string(),
                                        e.name, dtype));
        }
        const uint32_t rank = r.u32();
        for (uint32_t d = 0; d < rank; ++d) e.shape.push_back(static_cast<int64_t>(r.u64()));
        e.offset = r.u64();
        entries.push_back(std::move(e));
    }

    const uint64_t payload_len = r.u64();
    const uint64_t stored_hash = r.u64();
    if (r.remaining() != payload_len) {
        throw DataError(fmt::format("{}: payload length {} but {} bytes remain at offset {}",
                                    path.string(), payload_len, r.remaining(), r.offset()));
    }
    const char* payload = r.take(payload_len);
    const uint64_t actual_hash = fnv1a64(payload, payload_len);
    if (actual_hash != stored_hash) {
        throw DataError(fmt::format("{}: payload hash mismatch (stored {:016x}, computed {:016x})",
                                    path.string(), stored_hash, actual_hash));
    }

    for (Entry& e : entries) {
        const int64_t count = shape_size(e.shape);
        const uint64_t bytes = static_cast<uint64_t>(count) * sizeof(float);
        if (e.offset + bytes > payload_len) {
            throw DataError(fmt::format("{}: tensor {} spans [{}, {}) beyond payload size {}",
                                        path.string(), e.name, e.offset, e.offset + bytes,
                                        payload_len));
        }
        nn::Tensor t(e.shape);
        std::memcpy(t.data(), payload + e.offset, bytes);
        ckpt.tensors.emplace_back(std::move(e.name), std::move(t));
    }
    return ckpt;
}

std::unique_ptr<model::SegModel> model_from_checkpoint(const Checkpoint& ckpt) {
    auto m = std::make_unique<model::SegModel>(ckpt.encoder, ckpt.projection, ckpt.atrous,
                                               /*seed=*/0);
    load_into_model(ckpt, *m);
    return m;
}

}  // namespace marsseg::train
