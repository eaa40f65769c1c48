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

#ifndef ESAL_CORPUS_H_
#define ESAL_CORPUS_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "esal/ontology.h"
#include "json.hpp"

namespace esal {

enum class Role { kDoctor, kPatient };

std::string_view RoleName(Role role);
// Role marker token prepended to every utterance when encoding a window.
std::string_view RoleMarker(Role role);

struct Utterance {
  Role role = Role::kPatient;
  std::string text;
  bool operator==(const Utterance&) const = default;
};

// Half-open utterance span [start, end) with its gold candidates (sorted,
// duplicate-free).
struct Window {
  std::string dialogue_id;
  int window_index = 0;
  int start = 0;
  int end = 0;
  std::vector<Candidate> gold;
  bool operator==(const Window&) const = default;
};

struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;
  std::vector<Window> windows;
  bool operator==(const Dialogue&) const = default;
};

// One dialogue per JSONL line:
//   {"id": "...", "utterances": [{"role": "patient", "text": "..."}],
//    "windows": [{"start": 0, "end": 5, "labels": ["Symptom: x (unknown)"]}]}
// Blank lines are skipped. Errors carry the 1-based line number or the
// dialogue id.
std::vector<Dialogue> ParseCorpus(std::string_view jsonl, const Schema& schema);
std::vector<Dialogue> LoadCorpus(const std::string& path, const Schema& schema);

Dialogue DialogueFromJson(const nlohmann::json& j, const Schema& schema);
nlohmann::json DialogueToJson(const Dialogue& d, const Schema& schema);
std::string FormatCorpus(const std::vector<Dialogue>& dialogues, const Schema& schema);
void SaveCorpus(const std::string& path, const std::vector<Dialogue>& dialogues,
                const Schema& schema);

// Spans [k*stride, k*stride + window_size) clipped to the dialogue length.
// Iteration stops once a window reaches the end, so the trailing partial
// window is kept and no window is a suffix of its predecessor.
std::vector<Window> MakeWindows(const Dialogue& dialogue, int window_size, int stride);

// Lowercases ASCII, splits on whitespace, emits punctuation (ASCII and the
// CJK/fullwidth punctuation blocks) and each CJK ideograph as single tokens.
std::vector<std::string> Tokenize(std::string_view text);

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  static constexpr int kNumReserved = 4;

  Vocab();
  // Rebuilds from a saved token list; the reserved prefix must be intact.
  explicit Vocab(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  int Id(std::string_view token) const;  // kUnk when absent
  bool Contains(std::string_view token) const;
  const std::string& Token(int id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  int Add(const std::string& token);
  std::string Hash() const;

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> ids_;
};

// Frequency-ranked vocabulary: tokens with count >= min_freq, most frequent
// first, ties lexicographic, at most max_size non-reserved entries
// (max_size <= 0 means unbounded).
Vocab BuildVocab(const std::vector<std::vector<std::string>>& token_lists, int min_freq,
                 int max_size);
// Counts utterance tokens and role markers of the given (training) dialogues.
Vocab BuildVocab(const std::vector<Dialogue>& corpus, int min_freq, int max_size);

struct TokenSeq {
  std::vector<int> ids;
  std::vector<std::string> tokens;
};

// [CLS] (marker utterance-tokens)* [SEP], truncated from the right to
// max_seq_len with [SEP] kept last.
TokenSeq EncodeWindow(const Window& window, const Dialogue& dialogue, const Vocab& vocab,
                      int max_seq_len);

// Token ids of a free text (no special tokens); used for candidate queries.
TokenSeq EncodeText(std::string_view text, const Vocab& vocab);

}  // namespace esal

#endif  // ESAL_CORPUS_H_
