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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace marsseg {

// 8-bit image, row-major HWC, 1 (gray) or 3 (RGB) channels.
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<uint8_t> pixels;

    uint8_t at(int y, int x, int c = 0) const {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t& at(int y, int x, int c = 0) {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

struct PngHeader {
    int width = 0;
    int height = 0;
    int channels = 0;
};

ImageU8 read_png(const std::filesystem::path& path);

// Reads IHDR only; cheap existence/readability/dimension validation.
PngHeader read_png_header(const std::filesystem::path& path);

// 8-bit gray or RGB output. text_chunks become tEXt entries (e.g. the run
// manifest hash every emitted artifact must carry).
void write_png(const std::filesystem::path& path, const ImageU8& img,
               const std::vector<std::pair<std::string, std::string>>& text_chunks = {});

// Nearest-neighbor resize with the fixed tie convention
// src = floor(dst * srcDim / dstDim), i.e. the top-left source pixel of each
// cell. Never invents values absent from the input.
ImageU8 resize_nearest(const ImageU8& img, int out_width, int out_height);

}  // namespace marsseg
