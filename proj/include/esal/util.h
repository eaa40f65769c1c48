// Copyright 2026 The ESAL Authors.
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

#ifndef ESAL_UTIL_H_
#define ESAL_UTIL_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace esal {

std::string_view Trim(std::string_view s);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
uint64_t Fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);
std::string HexDigest(uint64_t value);

// Lowercase ASCII alphanumerics; every other run of bytes becomes '_'.
std::string Slugify(std::string_view s);

// Portable uniform double in [0, 1) from a 64-bit engine draw.
inline double UnitFromBits(uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace esal

#endif  // ESAL_UTIL_H_
