// Copyright 2026 The cavqnd Authors
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

#ifndef CAVQND_IO_HPP
#define CAVQND_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cavqnd/params.hpp"

namespace cavqnd {

/// 64-bit FNV-1a, stable across platforms and builds.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Round-trip decimal (17 significant digits).
std::string format_double(double v);

nlohmann::json to_json(const Rates& r);
nlohmann::json to_json(const DerivedParams& p);

/// Hash of every rate, for tagging exported operators.
std::string rates_hash(const Rates& r);

}  // namespace cavqnd

#endif  // CAVQND_IO_HPP
