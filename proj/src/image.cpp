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

#include "marsseg/image.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "marsseg/common.hpp"

namespace marsseg {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

void open_reader(PngReader& r, FILE* f, const std::filesystem::path& path) {
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, f) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw DataError(fmt::format("{}: not a PNG file", path.string()));
    }
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    MSEG_CHECK(r.png != nullptr, "png_create_read_struct failed");
    r.info = png_create_info_struct(r.png);
    MSEG_CHECK(r.info != nullptr, "png_create_info_struct failed");
    png_init_io(r.png, f);
    png_set_sig_bytes(r.png, 8);
}

}  // namespace

ImageU8 read_png(const std::filesystem::path& path) {
    FilePtr f(std::fopen(path.string().c_str(), "rb"));
    if (!f) throw DataError(fmt::format("{}: cannot open for reading", path.string()));
    PngReader r;
    open_reader(r, f.get(), path);
    if (setjmp(png_jmpbuf(r.png))) {
        throw DataError(fmt::format("{}: PNG decode error", path.string()));
    }
    png_read_info(r.png, r.info);

    png_uint_32 w = 0, h = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(r.png, r.info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    if (bit_depth == 16) png_set_strip_16(r.png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(r.png);
    png_read_update_info(r.png, r.info);

    int channels = png_get_channels(r.png, r.info);
    MSEG_CHECK(channels == 1 || channels == 3, "{}: unsupported channel count {}", path.string(),
               channels);

    ImageU8 img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.channels = channels;
    img.pixels.resize(static_cast<size_t>(w) * h * channels);

    std::vector<png_bytep> rows(h);
    size_t stride = static_cast<size_t>(w) * channels;
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = img.pixels.data() + y * stride;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return img;
}

PngHeader read_png_header(const std::filesystem::path& path) {
    FilePtr f(std::fopen(path.string().c_str(), "rb"));
    if (!f) throw DataError(fmt::format("{}: cannot open for reading", path.string()));
    PngReader r;
    open_reader(r, f.get(), path);
    if (setjmp(png_jmpbuf(r.png))) {
        throw DataError(fmt::format("{}: PNG header error", path.string()));
    }
    png_read_info(r.png, r.info);
    png_uint_32 w = 0, h = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(r.png, r.info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    int channels = png_get_channels(r.png, r.info);
    if (color_type & PNG_COLOR_MASK_ALPHA) channels -= 1;
    if (color_type == PNG_COLOR_TYPE_PALETTE) channels = 3;
    return PngHeader{static_cast<int>(w), static_cast<int>(h), channels};
}

void write_png(const std::filesystem::path& path, const ImageU8& img,
               const std::vector<std::pair<std::string, std::string>>& text_chunks) {
    MSEG_CHECK(img.channels == 1 || img.channels == 3, "write_png: channels must be 1 or 3, got {}",
               img.channels);
    MSEG_CHECK(img.width > 0 && img.height > 0, "write_png: empty image");
    MSEG_CHECK(img.pixels.size() == static_cast<size_t>(img.width) * img.height * img.channels,
               "write_png: pixel buffer size mismatch");

    FilePtr f(std::fopen(path.string().c_str(), "wb"));
    if (!f) throw DataError(fmt::format("{}: cannot open for writing", path.string()));
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    MSEG_CHECK(w.png != nullptr, "png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    MSEG_CHECK(w.info != nullptr, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) {
        throw DataError(fmt::format("{}: PNG encode error", path.string()));
    }
    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

    std::vector<png_text> texts(text_chunks.size());
    for (size_t i = 0; i < text_chunks.size(); ++i) {
        texts[i] = png_text{};
        texts[i].compression = PNG_TEXT_COMPRESSION_NONE;
        texts[i].key = const_cast<char*>(text_chunks[i].first.c_str());
        texts[i].text = const_cast<char*>(text_chunks[i].second.c_str());
        texts[i].text_length = text_chunks[i].second.size();
    }
    if (!texts.empty()) png_set_text(w.png, w.info, texts.data(), static_cast<int>(texts.size()));

    png_write_info(w.png, w.info);
    size_t stride = static_cast<size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) {
        png_write_row(w.png, const_cast<png_bytep>(img.pixels.data() + y * stride));
    }
    png_write_end(w.png, nullptr);
}

ImageU8 resize_nearest(const ImageU8& img, int out_width, int out_height) {
    MSEG_CHECK(img.width > 0 && img.height > 0, "resize_nearest: empty input");
    MSEG_CHECK(out_width > 0 && out_height > 0, "resize_nearest: bad target {}x{}", out_width,
               out_height);
    ImageU8 out;
    out.width = out_width;
    out.height = out_height;
    out.channels = img.channels;
    out.pixels.resize(static_cast<size_t>(out_width) * out_height * img.channels);
    for (int y = 0; y < out_height; ++y) {
        int sy = static_cast<int>(static_cast<int64_t>(y) * img.height / out_height);
        for (int x = 0; x < out_width; ++x) {
            int sx = static_cast<int>(static_cast<int64_t>(x) * img.width / out_width);
            for (int c = 0; c < img.channels; ++c) {
                out.at(y, x, c) = img.at(sy, sx, c);
            }
        }
    }
    return out;
}

}  // namespace marsseg
