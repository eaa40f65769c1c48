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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "esal/errors.h"
#include "esal/util.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace esal {
namespace {

ParamStore<float> SampleStore() {
  ParamStore<float> s;
  s.Add("b.bias", Tensor<float>({1, 3}, {0.5f, -0.25f, std::numeric_limits<float>::denorm_min()}));
  s.Add("a.weight", testing::RandomMatrix(4, 5, 1).Cast<float>());
  return s;
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  const ParamStore<float> s = SampleStore();
  const nlohmann::json meta = {{"threshold", 0.4}, {"note", "x"}};
  const std::string bytes = EncodeCheckpoint(s, meta);
  EXPECT_EQ(bytes.substr(0, 6), std::string(kCheckpointMagic));
  nlohmann::json manifest;
  const ParamStore<float> back = DecodeCheckpoint<float>(bytes, &manifest);
  EXPECT_EQ(back, s);
  EXPECT_EQ(manifest["threshold"], 0.4);
  EXPECT_EQ(manifest["note"], "x");
  // Name order in the tensor table.
  EXPECT_EQ(manifest["tensors"][0]["name"], "a.weight");
  EXPECT_EQ(manifest["tensors"][0]["dtype"], "f32");
  EXPECT_EQ(EncodeCheckpoint(back, meta), bytes);
}

TEST(CheckpointTest, ConvertsDtypeOnLoad) {
  const ParamStore<float> s = SampleStore();
  const ParamStore<double> d = DecodeCheckpoint<double>(EncodeCheckpoint(s, {}));
  EXPECT_EQ(d, s.Cast<double>());
  ParamStore<double> wide;
  wide.Add("w", testing::RandomMatrix(2, 2, 3));
  EXPECT_EQ(DecodeCheckpoint<double>(EncodeCheckpoint(wide, {})), wide);
}

TEST(CheckpointTest, FileRoundTripAndHeader) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "esal_checkpoint_test.ckpt").string();
  SaveCheckpoint(path, SampleStore(), {{"k", 1}});
  const CheckpointHeader header = ReadCheckpointHeader(path);
  EXPECT_EQ(header.dtype, "f32");
  EXPECT_EQ(header.manifest["k"], 1);
  EXPECT_EQ(LoadCheckpoint<float>(path), SampleStore());
  std::remove(path.c_str());
}

TEST(CheckpointTest, RejectsCorruptInput) {
  const std::string bytes = EncodeCheckpoint(SampleStore(), {});
  EXPECT_THROW(DecodeCheckpoint<float>("NOPE" + bytes.substr(4)), ParseError);
  EXPECT_THROW(DecodeCheckpoint<float>(bytes.substr(0, 10)), ParseError);
  EXPECT_THROW(DecodeCheckpoint<float>(bytes.substr(0, bytes.size() - 4)), ParseError);
  EXPECT_THROW(LoadCheckpoint<float>("/nonexistent/dir/x.ckpt"), std::exception);
}

}  // namespace
}  // namespace esal
