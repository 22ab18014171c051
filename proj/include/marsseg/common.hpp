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
#include <stdexcept>
#include <string>
#include <string_view>

#include <fmt/format.h>

namespace marsseg {

inline constexpr std::string_view kCodeVersion = "0.1.0";

// Failure categories map onto CLI exit codes (config=1, data=2, runtime=3).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};

namespace detail {
[[noreturn]] void check_fail(const char* file, int line, const char* expr, const std::string& msg);
}  // namespace detail

// FNV-1a 64-bit; used for checkpoint payload integrity and run-manifest hashes.
uint64_t fnv1a64(const void* data, size_t bytes, uint64_t seed = 0xcbf29ce484222325ull);
std::string hash_hex(uint64_t h);

}  // namespace marsseg

#define MSEG_CHECK(cond, ...)                                                              \
    do {                                                                                   \
        if (!(cond)) {                                                                     \
            ::marsseg::detail::check_fail(__FILE__, __LINE__, #cond,                       \
                                          fmt::format(__VA_ARGS__));                       \
        }                                                                                  \
    } while (0)
