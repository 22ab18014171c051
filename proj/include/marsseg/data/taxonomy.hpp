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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace marsseg::data {

// Class ids are stable across runs and serialized with every checkpoint and
// report. 255 marks unlabeled pixels and is never trainable.
inline constexpr uint8_t kSoil = 0;
inline constexpr uint8_t kBedrock = 1;
inline constexpr uint8_t kSand = 2;
inline constexpr uint8_t kBigRock = 3;
inline constexpr uint8_t kRover = 4;
inline constexpr uint8_t kBackground = 5;
inline constexpr int kNumClasses = 6;
inline constexpr uint8_t kNullLabel = 255;
inline constexpr int kNumTerrainClasses = 4;  // ids 0..3 appear in terrain masks

const std::array<std::string_view, kNumClasses>& class_names();
std::string_view class_name(int id);

// {"classes": ["soil", ...], "nullLabel": 255}
nlohmann::json taxonomy_json();

}  // namespace marsseg::data
