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

// Seeded synthetic dialogue corpora whose labels are recoverable from
// surface cues.
//
// Every gold candidate of a window is realized by one utterance holding the
// status phrase of its status immediately followed by the item cue; the
// speaker matches the party of the status (random for "unknown"). Remaining
// utterances are filler. With probability `noise` an item cue is replaced by
// a distractor word while the gold label is kept.

#ifndef ESAL_SYNTHGEN_H_
#define ESAL_SYNTHGEN_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "esal/corpus.h"
#include "esal/metrics.h"
#include "esal/ontology.h"
#include "json.hpp"

namespace esal {

// 3 categories x 4 items and the five party statuses (60 candidates). Item
// names are single pseudo-words that double as their cue tokens.
Schema SynthSchema();

struct GenConfig {
  Schema schema = SynthSchema();
  int train_dialogues = 500;
  int dev_dialogues = 50;
  int test_dialogues = 50;
  int utterances_per_dialogue = 24;
  int window_size = 6;             // utterances per (non-overlapping) window
  double labels_per_window = 2.5;  // Poisson mean, truncated to window_size
  double noise = 0.0;
  uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

struct Lexicon {
  std::map<CandidatePair, std::vector<std::string>> item_cues;  // tokenized item name
  std::vector<std::vector<std::string>> status_cues;            // 2-token phrase per status
  std::vector<std::string> distractors;
  std::vector<std::string> fillers;

  nlohmann::json ToJson(const Schema& schema) const;
  static Lexicon FromJson(const nlohmann::json& j, const Schema& schema);
};

Lexicon BuildLexicon(const Schema& schema);

struct GeneratedCorpus {
  std::vector<Dialogue> train;
  std::vector<Dialogue> dev;
  std::vector<Dialogue> test;
  Lexicon lexicon;
};

GeneratedCorpus Generate(const GenConfig& config);

// Writes train.jsonl, dev.jsonl, test.jsonl, schema.json and lexicon.json.
void WriteGenerated(const GeneratedCorpus& corpus, const Schema& schema,
                    const std::string& out_dir);

// Predicts (pair, status) for a window whenever one of its utterances holds
// the status phrase immediately followed by the item cue.
std::vector<PredictionRecord> RuleOracle(const std::vector<Dialogue>& corpus,
                                         const Lexicon& lexicon);

// Token spans [begin, end) of every occurrence of the status phrase of
// `status` in the encoded window tokens. A status query cannot tell apart
// two utterances sharing a status, so each occurrence counts as generating.
std::vector<std::pair<int, int>> LocateStatusPhrases(const std::vector<std::string>& window_tokens,
                                                     int status, const Lexicon& lexicon);

}  // namespace esal

#endif  // ESAL_SYNTHGEN_H_
