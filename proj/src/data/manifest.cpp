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

#include "marsseg/data/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "marsseg/common.hpp"
#include "marsseg/image.hpp"

namespace marsseg::data {

namespace fs = std::filesystem;

std::string_view split_name(Split s) { return s == Split::train ? "train" : "test"; }

Split split_from_string(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw ConfigError(fmt::format("unknown split '{}', expected train|test", s));
}

std::string_view camera_name(CameraKind c) {
    return c == CameraKind::navcam_gray ? "navcam-gray" : "mastcam-color";
}

int64_t DatasetManifest::labeled_count() const {
    return std::count_if(items.begin(), items.end(),
                         [](const RawSample& s) { return s.label_path.has_value(); });
}

namespace {

std::optional<fs::path> mask_path_if_present(const fs::path& dir, const std::string& name) {
    fs::path p = dir / name;
    if (fs::exists(p)) return p;
    return std::nullopt;
}

// Reads a mask header and verifies dimensions; returns false with a message
// on unreadable or mismatched masks.
bool check_mask(const fs::path& p, int width, int height, std::string& problem) {
    try {
        PngHeader h = read_png_header(p);
        if (h.width != width || h.height != height) {
            problem = fmt::format("{}: mask {}x{} vs image {}x{}", p.string(), h.width, h.height,
                                  width, height);
            return false;
        }
    } catch (const std::exception& e) {
        problem = e.what();
        return false;
    }
    return true;
}

}  // namespace

DatasetManifest load_manifest(const fs::path& root, Split split) {
    const fs::path images_dir = root / "images";
    if (!fs::is_directory(images_dir)) {
        throw DataError(fmt::format("dataset root {} has no images/ directory", root.string()));
    }
    const fs::path own_labels = root / "labels" / std::string(split_name(split));
    const fs::path other_labels =
        root / "labels" /
        std::string(split_name(split == Split::train ? Split::test : Split::train));
    const fs::path rover_dir = root / "masks" / "rover";
    const fs::path range_dir = root / "masks" / "range";

    std::vector<fs::path> image_files;
    for (const auto& entry : fs::directory_iterator(images_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            image_files.push_back(entry.path());
        }
    }
    std::sort(image_files.begin(), image_files.end());

    DatasetManifest manifest;
    manifest.split = split;
    for (const fs::path& img : image_files) {
        const std::string name = img.filename().string();
        const bool labeled_here = fs::exists(own_labels / name);
        const bool labeled_other = fs::exists(other_labels / name);
        if (split == Split::test) {
            if (!labeled_here) continue;  // test set is exactly the test-labeled images
        } else if (labeled_other) {
            continue;  // never leak test images into the training corpus
        }

        RawSample item;
        item.image_path = img;
        try {
            PngHeader h = read_png_header(img);
            item.width = h.width;
            item.height = h.height;
            item.camera = h.channels >= 3 ? CameraKind::mastcam_color : CameraKind::navcam_gray;
        } catch (const std::exception& e) {
            manifest.warnings.push_back(fmt::format("excluded {}: {}", img.string(), e.what()));
            continue;
        }
        if (labeled_here) item.label_path = own_labels / name;
        item.rover_mask_path = mask_path_if_present(rover_dir, name);
        item.range_mask_path = mask_path_if_present(range_dir, name);

        std::string problem;
        bool ok = true;
        for (const auto& mask : {item.label_path, item.rover_mask_path, item.range_mask_path}) {
            if (mask && !check_mask(*mask, item.width, item.height, problem)) {
                manifest.warnings.push_back(
                    fmt::format("excluded {}: {}", img.string(), problem));
                ok = false;
                break;
            }
        }
        if (ok) manifest.items.push_back(std::move(item));
    }
    if (manifest.items.empty()) {
        manifest.warnings.push_back(
            fmt::format("no usable {} images under {}", split_name(split), root.string()));
    }
    return manifest;
}

namespace {
constexpr std::string_view kCacheHeader = "marsseg-manifest v1";

std::string field(const std::optional<fs::path>& p) { return p ? p->string() : std::string("-"); }

std::optional<fs::path> parse_field(const std::string& s) {
    if (s == "-") return std::nullopt;
    return fs::path(s);
}
}  // namespace

void save_manifest_cache(const DatasetManifest& manifest, const fs::path& file) {
    std::ofstream out(file);
    MSEG_CHECK(out.good(), "cannot write manifest cache {}", file.string());
    out << kCacheHeader << '\n' << split_name(manifest.split) << '\n';
    for (const RawSample& s : manifest.items) {
        out << s.image_path.string() << '\t' << field(s.label_path) << '\t'
            << field(s.rover_mask_path) << '\t' << field(s.range_mask_path) << '\t'
            << camera_name(s.camera) << '\t' << s.width << '\t' << s.height << '\n';
    }
}

DatasetManifest load_manifest_cache(const fs::path& file) {
    std::ifstream in(file);
    if (!in.good()) throw DataError(fmt::format("cannot read manifest cache {}", file.string()));
    std::string line;
    std::getline(in, line);
    if (line != kCacheHeader) {
        throw DataError(fmt::format("{}: unsupported manifest cache header '{}'", file.string(), line));
    }
    DatasetManifest manifest;
    std::getline(in, line);
    manifest.split = split_from_string(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string img, label, rover, range, camera, width, height;
        if (!(std::getline(row, img, '\t') && std::getline(row, label, '\t') &&
              std::getline(row, rover, '\t') && std::getline(row, range, '\t') &&
              std::getline(row, camera, '\t') && std::getline(row, width, '\t') &&
              std::getline(row, height, '\t'))) {
            throw DataError(fmt::format("{}: malformed manifest cache line '{}'", file.string(), line));
        }
        RawSample s;
        s.image_path = img;
        s.label_path = parse_field(label);
        s.rover_mask_path = parse_field(rover);
        s.range_mask_path = parse_field(range);
        s.camera = camera == "mastcam-color" ? CameraKind::mastcam_color : CameraKind::navcam_gray;
        s.width = std::stoi(width);
        s.height = std::stoi(height);
        manifest.items.push_back(std::move(s));
    }
    return manifest;
}

}  // namespace marsseg::data
