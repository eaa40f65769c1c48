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

// Window- and dialogue-level scoring at three granularities.
//
// Every unit (window or dialogue) contributes TP = |pred ∩ gold|,
// FP = |pred \ gold| and FN = |gold \ pred| over projected label sets; the
// reported precision/recall/F1 come from the sums (micro average). At
// dialogue level both sides are first merged per (category, item) with the
// status resolution rule.

#ifndef ESAL_METRICS_H_
#define ESAL_METRICS_H_

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "esal/corpus.h"
#include "esal/ontology.h"
#include "json.hpp"

namespace esal {

enum class Granularity { kCategory = 0, kItem = 1, kFull = 2 };
inline constexpr int kNumGranularities = 3;

std::string_view GranularityName(Granularity g);

// (category, item, status) with unused trailing fields set to -1.
using LevelTuple = std::tuple<int, int, int>;
using LevelSet = std::set<LevelTuple>;

LevelSet Project(const std::vector<Candidate>& labels, Granularity g);

struct Counts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  // 0 whenever the denominator is 0.
  double Precision() const;
  double Recall() const;
  double F1() const;

  Counts& operator+=(const Counts& o);
  bool operator==(const Counts&) const = default;
};

Counts CountSets(const LevelSet& pred, const LevelSet& gold);

struct ScopeScores {
  std::array<Counts, kNumGranularities> counts;
  const Counts& at(Granularity g) const { return counts[static_cast<int>(g)]; }
  Counts& at(Granularity g) { return counts[static_cast<int>(g)]; }
};

struct EvalReport {
  ScopeScores window;
  ScopeScores dialogue;

  nlohmann::json ToJson() const;
  // Percentages with two decimals:
  //   Level           Category P R F1 | Item P R F1 | Full P R F1
  std::string FormatTable() const;
};

using WindowKey = std::pair<std::string, int>;  // (dialogue id, window index)
using WindowSets = std::map<WindowKey, std::vector<Candidate>>;

// Gold sets of every window in the corpus.
WindowSets GoldSets(const std::vector<Dialogue>& corpus);

// Throws EvalError listing the keys present on only one side.
ScopeScores EvalWindows(const WindowSets& pred, const WindowSets& gold);

// Drops "unknown" when any other status is present, then every "*-neg"
// when any "*-pos" is present. Throws ContractError on empty input.
std::set<int> ResolveStatuses(const std::set<int>& statuses, const Schema& schema);

// Union of the window sets grouped by (category, item), statuses resolved
// per group. Sorted output.
std::vector<Candidate> MergeDialogue(const std::vector<std::vector<Candidate>>& windows,
                                     const Schema& schema);

// Merges both sides per dialogue; throws EvalError when the dialogue ids
// differ.
ScopeScores EvalDialogues(const WindowSets& pred, const WindowSets& gold, const Schema& schema);

EvalReport Evaluate(const WindowSets& pred, const WindowSets& gold, const Schema& schema);

struct ScoredCandidate {
  Candidate candidate;
  double score = 0;
};

struct PredictionRecord {
  std::string dialogue_id;
  int window_index = 0;
  std::vector<ScoredCandidate> predictions;
};

// {"dialogue_id":..., "window_index":..., "predictions":[{"category":...,
//  "item":..., "status":..., "score":0.93}]}
nlohmann::json PredictionToJson(const PredictionRecord& r, const Schema& schema);
PredictionRecord PredictionFromJson(const nlohmann::json& j, const Schema& schema);
std::string FormatPredictions(const std::vector<PredictionRecord>& records, const Schema& schema);
// Throws ParseError with the 1-based line number.
std::vector<PredictionRecord> ParsePredictions(std::string_view jsonl, const Schema& schema);
WindowSets PredictionSets(const std::vector<PredictionRecord>& records);

}  // namespace esal

#endif  // ESAL_METRICS_H_
