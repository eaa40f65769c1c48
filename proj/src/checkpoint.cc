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

#include "esal/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "esal/errors.h"
#include "esal/util.h"

namespace esal {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

template <typename T>
constexpr const char* DTypeName() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

void PutU64(std::string& out, uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

// Splits the container into manifest and blob; throws ParseError when
// malformed.
nlohmann::json SplitContainer(const std::string& bytes, size_t* blob_offset) {
  if (bytes.size() < kMagicLen + 8 || bytes.compare(0, kMagicLen, kCheckpointMagic) != 0) {
    throw ParseError("not an ESAL checkpoint (bad magic)");
  }
  uint64_t len = 0;
  std::memcpy(&len, bytes.data() + kMagicLen, 8);
  if (len > bytes.size() - kMagicLen - 8) throw ParseError("checkpoint manifest truncated");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.substr(kMagicLen + 8, len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint manifest: ") + e.what());
  }
  *blob_offset = kMagicLen + 8 + len;
  return manifest;
}

template <typename Src, typename T>
Tensor<T> ReadTensor(const char* p, const std::vector<int>& shape, uint64_t count) {
  std::vector<Src> raw(count);
  std::memcpy(raw.data(), p, count * sizeof(Src));
  std::vector<T> data(raw.begin(), raw.end());
  return Tensor<T>(shape, std::move(data));
}

}  // namespace

template <typename T>
std::string EncodeCheckpoint(const ParamStore<T>& store, const nlohmann::json& metadata) {
  nlohmann::json manifest = metadata.is_null() ? nlohmann::json::object() : metadata;
  nlohmann::json table = nlohmann::json::array();
  std::string blob;
  for (const auto& [name, t] : store.params()) {
    const uint64_t length = static_cast<uint64_t>(t.size()) * sizeof(T);
    table.push_back({{"name", name},
                     {"dtype", DTypeName<T>()},
                     {"shape", t.shape()},
                     {"offset", blob.size()},
                     {"length", length}});
    blob.append(reinterpret_cast<const char*>(t.data()), length);
  }
  manifest["tensors"] = table;
  const std::string text = manifest.dump();
  std::string out(kCheckpointMagic, kMagicLen);
  PutU64(out, text.size());
  out += text;
  out += blob;
  return out;
}

template <typename T>
void SaveCheckpoint(const std::string& path, const ParamStore<T>& store,
                    const nlohmann::json& metadata) {
  WriteFile(path, EncodeCheckpoint(store, metadata));
}

CheckpointHeader ReadCheckpointHeader(const std::string& path) {
  const std::string bytes = ReadFile(path);
  size_t blob_offset = 0;
  CheckpointHeader header;
  header.manifest = SplitContainer(bytes, &blob_offset);
  const auto& table = header.manifest.value("tensors", nlohmann::json::array());
  if (!table.empty()) header.dtype = table.front().value("dtype", "");
  return header;
}

template <typename T>
ParamStore<T> DecodeCheckpoint(const std::string& bytes, nlohmann::json* manifest_out) {
  size_t blob_offset = 0;
  nlohmann::json manifest = SplitContainer(bytes, &blob_offset);
  const size_t blob_size = bytes.size() - blob_offset;
  ParamStore<T> store;
  try {
    for (const auto& entry : manifest.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      const auto dtype = entry.at("dtype").get<std::string>();
      const auto shape = entry.at("shape").get<std::vector<int>>();
      const auto offset = entry.at("offset").get<uint64_t>();
      const auto length = entry.at("length").get<uint64_t>();
      const size_t width = dtype == "f32" ? 4 : dtype == "f64" ? 8 : 0;
      if (width == 0) throw ParseError("tensor '" + name + "' has unsupported dtype " + dtype);
      if (offset > blob_size || length > blob_size - offset) {
        throw ParseError("tensor '" + name + "' extends past the blob");
      }
      uint64_t count = 1;
      for (int d : shape) count *= static_cast<uint64_t>(d);
      if (count * width != length) throw ParseError("tensor '" + name + "' length/shape mismatch");
      const char* p = bytes.data() + blob_offset + offset;
      store.Add(name, width == 4 ? ReadTensor<float, T>(p, shape, count)
                                 : ReadTensor<double, T>(p, shape, count));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint tensor table: ") + e.what());
  }
  if (manifest_out) *manifest_out = std::move(manifest);
  return store;
}

template <typename T>
ParamStore<T> LoadCheckpoint(const std::string& path, nlohmann::json* manifest) {
  return DecodeCheckpoint<T>(ReadFile(path), manifest);
}

#define ESAL_INSTANTIATE_CHECKPOINT(T)                                                   \
  template std::string EncodeCheckpoint<T>(const ParamStore<T>&, const nlohmann::json&); \
  template void SaveCheckpoint<T>(const std::string&, const ParamStore<T>&,              \
                                  const nlohmann::json&);                                \
  template ParamStore<T> DecodeCheckpoint<T>(const std::string&, nlohmann::json*);       \
  template ParamStore<T> LoadCheckpoint<T>(const std::string&, nlohmann::json*);

ESAL_INSTANTIATE_CHECKPOINT(float)
ESAL_INSTANTIATE_CHECKPOINT(double)

}  // namespace esal
