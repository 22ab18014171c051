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

#include "marsseg/data/taxonomy.hpp"

#include "marsseg/common.hpp"

namespace marsseg::data {

const std::array<std::string_view, kNumClasses>& class_names() {
    static const std::array<std::string_view, kNumClasses> names = {
        "soil", "bedrock", "sand", "bigRock", "rover", "background"};
    return names;
}

std::string_view class_name(int id) {
    MSEG_CHECK(id >= 0 && id < kNumClasses, "class id {} outside [0,{})", id, kNumClasses);
    return class_names()[static_cast<size_t>(id)];
}

nlohmann::json taxonomy_json() {
    nlohmann::json classes = nlohmann::json::array();
    for (auto name : class_names()) classes.push_back(std::string(name));
    return nlohmann::json{{"classes", classes}, {"nullLabel", static_cast<int>(kNullLabel)}};
}

}  // namespace marsseg::data
