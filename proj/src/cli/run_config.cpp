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

#include "marsseg/cli/run_config.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "marsseg/common.hpp"
#include "marsseg/data/taxonomy.hpp"

namespace marsseg::cli {

void validate(const LossSurfaceConfig& cfg) {
    if (!(cfg.pos_min > 0.0) || !(cfg.pos_max > cfg.pos_min))
        throw ConfigError(fmt::format("lossSurface.posRange must satisfy 0 < min < max, got [{},{}]",
                                      cfg.pos_min, cfg.pos_max));
    if (cfg.neg_min < 0.0 || !(cfg.neg_max > cfg.neg_min))
        throw ConfigError(fmt::format("lossSurface.negRange must satisfy 0 <= min < max, got [{},{}]",
                                      cfg.neg_min, cfg.neg_max));
    if (cfg.resolution < 2)
        throw ConfigError(fmt::format("lossSurface.resolution must be >= 2, got {}", cfg.resolution));
}

void to_json(nlohmann::json& j, const LossSurfaceConfig& cfg) {
    j = nlohmann::json{{"posRange", {cfg.pos_min, cfg.pos_max}},
                       {"negRange", {cfg.neg_min, cfg.neg_max}},
                       {"resolution", cfg.resolution}};
}

void from_json(const nlohmann::json& j, LossSurfaceConfig& cfg) {
    if (j.contains("posRange")) {
        const auto& r = j.at("posRange");
        if (!r.is_array() || r.size() != 2)
            throw ConfigError("lossSurface.posRange must be [min, max]");
        cfg.pos_min = r[0].get<double>();
        cfg.pos_max = r[1].get<double>();
    }
    if (j.contains("negRange")) {
        const auto& r = j.at("negRange");
        if (!r.is_array() || r.size() != 2)
            throw ConfigError("lossSurface.negRange must be [min, max]");
        cfg.neg_min = r[0].get<double>();
        cfg.neg_max = r[1].get<double>();
    }
    if (j.contains("resolution")) cfg.resolution = j.at("resolution").get<int>();
}

void RunConfig::apply_image_size(int image_size) {
    if (image_size <= 0) return;
    pretrain.image_size = image_size;
    pretrain.augment.output_size = image_size;
    finetune.image_size = image_size;
    atrous.output_h = image_size;
    atrous.output_w = image_size;
}

nlohmann::json RunConfig::to_json() const {
    return nlohmann::json{{"dataRoot", data_root.string()},
                          {"encoder", encoder},
                          {"projection", projection},
                          {"atrous", atrous},
                          {"pretrain", pretrain},
                          {"finetune", finetune},
                          {"synth", synth},
                          {"sweep", sweep},
                          {"lossSurface", loss_surface}};
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& config_file) {
    RunConfig cfg;
    if (const char* env = std::getenv(kDataRootEnv); env != nullptr && *env != '\0')
        cfg.data_root = env;
    if (!config_file) return cfg;

    std::ifstream f(*config_file);
    if (!f) throw ConfigError(fmt::format("cannot open config file {}", config_file->string()));
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("cannot parse {}: {}", config_file->string(), e.what()));
    }
    try {
        if (j.contains("dataRoot")) cfg.data_root = j.at("dataRoot").get<std::string>();
        if (j.contains("encoder")) j.at("encoder").get_to(cfg.encoder);
        if (j.contains("projection")) j.at("projection").get_to(cfg.projection);
        if (j.contains("atrous")) j.at("atrous").get_to(cfg.atrous);
        if (j.contains("pretrain")) j.at("pretrain").get_to(cfg.pretrain);
        if (j.contains("finetune")) j.at("finetune").get_to(cfg.finetune);
        if (j.contains("synth")) j.at("synth").get_to(cfg.synth);
        if (j.contains("sweep")) j.at("sweep").get_to(cfg.sweep);
        if (j.contains("lossSurface")) j.at("lossSurface").get_to(cfg.loss_surface);
        if (j.contains("imageSize")) cfg.apply_image_size(j.at("imageSize").get<int>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("bad config field in {}: {}", config_file->string(), e.what()));
    }
    return cfg;
}

std::string RunManifest::hash() const {
    const std::string blob = fmt::format("{}\n{}\n{}", command, config.dump(), seed);
    return hash_hex(fnv1a64(blob.data(), blob.size()));
}

nlohmann::json RunManifest::to_json() const {
    return nlohmann::json{{"command", command},
                          {"config", config},
                          {"seed", seed},
                          {"codeVersion", code_version},
                          {"formatVersion", format_version},
                          {"timestamp", timestamp},
                          {"taxonomy", data::taxonomy_json()},
                          {"hash", hash()},
                          {"outputs", outputs}};
}

void RunManifest::save(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot open {} for writing", path.string()));
    f << to_json().dump(2) << '\n';
    if (!f) throw DataError(fmt::format("failed writing {}", path.string()));
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    return fmt::format("{:04}{:02}{:02}T{:02}{:02}{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                       tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
}

std::filesystem::path make_run_dir(const std::filesystem::path& out_override,
                                   const std::string& hash) {
    std::filesystem::path dir = out_override;
    if (dir.empty()) dir = std::filesystem::path("runs") / fmt::format("{}-{}", utc_timestamp(),
                                                                       hash.substr(0, 8));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace marsseg::cli
