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

#include "esal/corpus.h"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <utility>

#include "esal/errors.h"
#include "esal/util.h"

namespace esal {

namespace {

// Decodes one UTF-8 codepoint starting at s[i]; advances i. Invalid bytes
// decode as themselves.
char32_t NextCodepoint(std::string_view s, size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  int len = 1;
  char32_t cp = b0;
  if (b0 >= 0xF0 && b0 < 0xF8) {
    len = 4;
    cp = b0 & 0x07;
  } else if (b0 >= 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if (b0 >= 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  }
  if (len > 1) {
    if (i + len > s.size()) {
      ++i;
      return b0;
    }
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ++i;
        return b0;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
  }
  i += len;
  return cp;
}

bool IsCjkIdeograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2FA1F);
}

bool IsWidePunct(char32_t cp) {
  return (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF00 && cp <= 0xFF0F) ||
         (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65) || (cp >= 0x2000 && cp <= 0x206F);
}

Role ParseRole(const std::string& s) {
  std::string lower;
  for (unsigned char c : s) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "doctor") return Role::kDoctor;
  if (lower == "patient") return Role::kPatient;
  throw ParseError("unknown role '" + s + "'");
}

void AppendEncoded(TokenSeq& seq, const std::string& token, const Vocab& vocab) {
  seq.ids.push_back(vocab.Id(token));
  seq.tokens.push_back(token);
}

}  // namespace

std::string_view RoleName(Role role) { return role == Role::kDoctor ? "doctor" : "patient"; }

std::string_view RoleMarker(Role role) { return role == Role::kDoctor ? "[doc]" : "[pat]"; }

Dialogue DialogueFromJson(const nlohmann::json& j, const Schema& schema) {
  Dialogue d;
  try {
    d.id = j.at("id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("dialogue without id: ") + e.what());
  }
  try {
    for (const auto& u : j.at("utterances")) {
      Utterance utt{ParseRole(u.at("role").get<std::string>()), u.at("text").get<std::string>()};
      if (Trim(utt.text).empty()) throw ParseError("empty utterance text");
      d.utterances.push_back(std::move(utt));
    }
    const int n = static_cast<int>(d.utterances.size());
    if (j.contains("windows")) {
      int prev_start = -1;
      for (const auto& w : j.at("windows")) {
        Window win;
        win.dialogue_id = d.id;
        win.window_index = static_cast<int>(d.windows.size());
        win.start = w.at("start").get<int>();
        win.end = w.at("end").get<int>();
        if (win.start < 0 || win.start >= win.end || win.end > n) {
          throw ParseError("window [" + std::to_string(win.start) + "," + std::to_string(win.end) +
                           ") outside " + std::to_string(n) + " utterances");
        }
        if (win.start < prev_start) throw ParseError("windows not ordered by start");
        prev_start = win.start;
        if (w.contains("labels")) {
          for (const auto& label : w.at("labels")) {
            win.gold.push_back(ParseLabel(label.get<std::string>(), schema));
          }
        }
        std::sort(win.gold.begin(), win.gold.end());
        if (std::adjacent_find(win.gold.begin(), win.gold.end()) != win.gold.end()) {
          throw ParseError("duplicate gold label in window " + std::to_string(win.window_index));
        }
        d.windows.push_back(std::move(win));
      }
    }
  } catch (const std::exception& e) {
    throw ParseError("dialogue '" + d.id + "': " + e.what());
  }
  return d;
}

nlohmann::json DialogueToJson(const Dialogue& d, const Schema& schema) {
  nlohmann::json utts = nlohmann::json::array();
  for (const auto& u : d.utterances) utts.push_back({{"role", RoleName(u.role)}, {"text", u.text}});
  nlohmann::json wins = nlohmann::json::array();
  for (const auto& w : d.windows) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& c : w.gold) labels.push_back(FormatLabel(c, schema));
    wins.push_back({{"start", w.start}, {"end", w.end}, {"labels", labels}});
  }
  return {{"id", d.id}, {"utterances", utts}, {"windows", wins}};
}

std::vector<Dialogue> ParseCorpus(std::string_view jsonl, const Schema& schema) {
  std::vector<Dialogue> out;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < jsonl.size()) {
    size_t eol = jsonl.find('\n', pos);
    if (eol == std::string_view::npos) eol = jsonl.size();
    const std::string_view line = Trim(jsonl.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    out.push_back(DialogueFromJson(j, schema));
  }
  return out;
}

std::vector<Dialogue> LoadCorpus(const std::string& path, const Schema& schema) {
  try {
    return ParseCorpus(ReadFile(path), schema);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string FormatCorpus(const std::vector<Dialogue>& dialogues, const Schema& schema) {
  std::string out;
  for (const auto& d : dialogues) {
    out += DialogueToJson(d, schema).dump();
    out += '\n';
  }
  return out;
}

void SaveCorpus(const std::string& path, const std::vector<Dialogue>& dialogues,
                const Schema& schema) {
  WriteFile(path, FormatCorpus(dialogues, schema));
}

std::vector<Window> MakeWindows(const Dialogue& dialogue, int window_size, int stride) {
  if (window_size < 1 || stride < 1) throw ContractError("window_size and stride must be >= 1");
  std::vector<Window> out;
  const int n = static_cast<int>(dialogue.utterances.size());
  for (int start = 0; start < n; start += stride) {
    Window w;
    w.dialogue_id = dialogue.id;
    w.window_index = static_cast<int>(out.size());
    w.start = start;
    w.end = std::min(start + window_size, n);
    out.push_back(std::move(w));
    if (out.back().end == n) break;
  }
  return out;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  size_t i = 0;
  while (i < text.size()) {
    const size_t begin = i;
    const char32_t cp = NextCodepoint(text, i);
    if (cp < 0x80) {
      const auto c = static_cast<unsigned char>(cp);
      if (std::isspace(c)) {
        flush();
      } else if (std::ispunct(c)) {
        flush();
        tokens.emplace_back(1, static_cast<char>(c));
      } else {
        current.push_back(static_cast<char>(std::tolower(c)));
      }
    } else if (IsCjkIdeograph(cp) || IsWidePunct(cp)) {
      flush();
      tokens.emplace_back(text.substr(begin, i - begin));
    } else {
      current.append(text.substr(begin, i - begin));
    }
  }
  flush();
  return tokens;
}

Vocab::Vocab() : Vocab(std::vector<std::string>{"[PAD]", "[UNK]", "[CLS]", "[SEP]"}) {}

Vocab::Vocab(std::vector<std::string> tokens) {
  static const char* kReserved[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  if (tokens.size() < kNumReserved) throw ContractError("vocab lacks reserved tokens");
  for (int i = 0; i < kNumReserved; ++i) {
    if (tokens[i] != kReserved[i]) throw ContractError("vocab reserved prefix corrupted");
  }
  for (auto& t : tokens) Add(t);
}

int Vocab::Id(std::string_view token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocab::Contains(std::string_view token) const { return ids_.find(token) != ids_.end(); }

int Vocab::Add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const int id = size();
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

std::string Vocab::Hash() const {
  uint64_t h = Fnv1a64("");
  for (const auto& t : tokens_) {
    h = Fnv1a64(t, h);
    h = Fnv1a64("\n", h);
  }
  return HexDigest(h);
}

Vocab BuildVocab(const std::vector<std::vector<std::string>>& token_lists, int min_freq,
                 int max_size) {
  std::map<std::string, int> counts;
  for (const auto& list : token_lists) {
    for (const auto& t : list) ++counts[t];
  }
  std::vector<std::pair<std::string, int>> ranked;
  for (const auto& [tok, n] : counts) {
    if (n >= min_freq) ranked.emplace_back(tok, n);
  }
  // counts is ordered by token, so a stable sort on frequency keeps ties
  // lexicographic.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (max_size > 0 && static_cast<int>(ranked.size()) > max_size) ranked.resize(max_size);
  Vocab vocab;
  for (const auto& [tok, n] : ranked) vocab.Add(tok);
  return vocab;
}

Vocab BuildVocab(const std::vector<Dialogue>& corpus, int min_freq, int max_size) {
  std::vector<std::vector<std::string>> lists;
  for (const auto& d : corpus) {
    for (const auto& u : d.utterances) {
      auto tokens = Tokenize(u.text);
      tokens.emplace(tokens.begin(), RoleMarker(u.role));
      lists.push_back(std::move(tokens));
    }
  }
  return BuildVocab(lists, min_freq, max_size);
}

TokenSeq EncodeWindow(const Window& window, const Dialogue& dialogue, const Vocab& vocab,
                      int max_seq_len) {
  if (max_seq_len < 2) throw ContractError("max_seq_len must be >= 2");
  if (window.start < 0 || window.end > static_cast<int>(dialogue.utterances.size()) ||
      window.start >= window.end) {
    throw ContractError("window span outside dialogue '" + dialogue.id + "'");
  }
  TokenSeq seq;
  AppendEncoded(seq, "[CLS]", vocab);
  for (int u = window.start; u < window.end; ++u) {
    const auto& utt = dialogue.utterances[u];
    AppendEncoded(seq, std::string(RoleMarker(utt.role)), vocab);
    for (const auto& t : Tokenize(utt.text)) AppendEncoded(seq, t, vocab);
  }
  if (static_cast<int>(seq.ids.size()) + 1 > max_seq_len) {
    seq.ids.resize(max_seq_len - 1);
    seq.tokens.resize(max_seq_len - 1);
  }
  AppendEncoded(seq, "[SEP]", vocab);
  return seq;
}

TokenSeq EncodeText(std::string_view text, const Vocab& vocab) {
  TokenSeq seq;
  for (const auto& t : Tokenize(text)) AppendEncoded(seq, t, vocab);
  return seq;
}

}  // namespace esal
