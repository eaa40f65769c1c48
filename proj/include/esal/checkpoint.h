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

// Checkpoint container:
//
//   "ESAL1\n"                     6 magic bytes
//   u64 little-endian             byte length of the manifest
//   manifest                      UTF-8 JSON
//   blob                          raw little-endian tensor data
//
// The manifest holds {"tensors": [{"name", "dtype", "shape", "offset",
// "length"}], ...} where offset/length address the blob. Tensors are laid
// out in name order. Any other manifest keys are caller metadata and are
// returned untouched.

#ifndef ESAL_CHECKPOINT_H_
#define ESAL_CHECKPOINT_H_

#include <string>

#include "esal/param_store.h"
#include "json.hpp"

namespace esal {

inline constexpr char kCheckpointMagic[] = "ESAL1\n";

template <typename T>
std::string EncodeCheckpoint(const ParamStore<T>& store, const nlohmann::json& metadata);

template <typename T>
void SaveCheckpoint(const std::string& path, const ParamStore<T>& store,
                    const nlohmann::json& metadata);

struct CheckpointHeader {
  nlohmann::json manifest;
  std::string dtype;  // "f32" or "f64"; "" for an empty store
};

CheckpointHeader ReadCheckpointHeader(const std::string& path);

// Converts to T if the stored dtype differs. Returns the manifest (tensor
// table included) through *manifest when non-null.
template <typename T>
ParamStore<T> DecodeCheckpoint(const std::string& bytes, nlohmann::json* manifest = nullptr);

template <typename T>
ParamStore<T> LoadCheckpoint(const std::string& path, nlohmann::json* manifest = nullptr);

}  // namespace esal

#endif  // ESAL_CHECKPOINT_H_
