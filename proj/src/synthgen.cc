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

#include "esal/synthgen.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "esal/errors.h"
#include "esal/util.h"

namespace esal {

namespace {

constexpr int kNumDistractors = 8;
constexpr int kNumFillers = 40;

// Pronounceable CVCVC words; the multiplier spreads consecutive indices
// over the whole space so neighbouring words share few letters.
std::string PseudoWord(int index) {
  static constexpr char kCons[] = "bdfgklmnprstvz";
  static constexpr char kVow[] = "aeiou";
  constexpr int kC = sizeof(kCons) - 1;
  constexpr int kV = sizeof(kVow) - 1;
  constexpr int kSpace = kC * kV * kC * kV * kC;
  int code = static_cast<int>((static_cast<int64_t>(index) * 7919 + 101) % kSpace);
  std::string w(5, ' ');
  for (int pos = 4; pos >= 0; --pos) {
    const bool consonant = pos % 2 == 0;
    const int base = consonant ? kC : kV;
    w[pos] = consonant ? kCons[code % base] : kVow[code % base];
    code /= base;
  }
  return w;
}

class WordSource {
 public:
  explicit WordSource(std::set<std::string> taken) : taken_(std::move(taken)) {}
  std::string Next() {
    for (;;) {
      std::string w = PseudoWord(next_++);
      if (taken_.insert(w).second) return w;
    }
  }

 private:
  std::set<std::string> taken_;
  int next_ = 0;
};

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  double Unit() { return UnitFromBits(engine_()); }
  int Below(int n) { return std::min(n - 1, static_cast<int>(Unit() * n)); }
  bool Bernoulli(double p) { return Unit() < p; }
  // Knuth's multiplication method; fine for the small means used here.
  int Poisson(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = Unit();
    while (prod > limit) {
      ++k;
      prod *= Unit();
    }
    return k;
  }
  template <typename V>
  void Shuffle(V& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[Below(i + 1)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::string Join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

Role RoleOfStatus(const std::string& status, Rng& rng) {
  if (status.rfind("doctor", 0) == 0) return Role::kDoctor;
  if (status.rfind("patient", 0) == 0) return Role::kPatient;
  return rng.Bernoulli(0.5) ? Role::kDoctor : Role::kPatient;
}

class DialogueBuilder {
 public:
  DialogueBuilder(const GenConfig& config, const CandidateSpace& space, const Lexicon& lexicon,
                  Rng& rng)
      : config_(config), space_(space), lexicon_(lexicon), rng_(rng) {}

  Dialogue Build(const std::string& id) {
    Dialogue d;
    d.id = id;
    const int n = config_.utterances_per_dialogue;
    for (int start = 0, index = 0; start < n; start += config_.window_size, ++index) {
      const int end = std::min(n, start + config_.window_size);
      Window w;
      w.dialogue_id = id;
      w.window_index = index;
      w.start = start;
      w.end = end;
      const int len = end - start;
      const int k = std::min({rng_.Poisson(config_.labels_per_window), len, space_.num_pairs()});

      std::vector<int> pairs(space_.num_pairs());
      for (int i = 0; i < space_.num_pairs(); ++i) pairs[i] = i;
      rng_.Shuffle(pairs);
      std::vector<int> slots(len);
      for (int i = 0; i < len; ++i) slots[i] = i;
      rng_.Shuffle(slots);

      std::vector<Utterance> utts(len);
      std::vector<bool> used(len, false);
      for (int j = 0; j < k; ++j) {
        Candidate c{space_.PairAt(pairs[j]), rng_.Below(space_.num_statuses())};
        w.gold.push_back(c);
        utts[slots[j]] = LabelUtterance(c);
        used[slots[j]] = true;
      }
      for (int i = 0; i < len; ++i) {
        if (!used[i]) utts[i] = FillerUtterance();
      }
      std::sort(w.gold.begin(), w.gold.end());
      d.utterances.insert(d.utterances.end(), utts.begin(), utts.end());
      d.windows.push_back(std::move(w));
    }
    return d;
  }

 private:
  std::vector<std::string> Fillers(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(lexicon_.fillers[rng_.Below(kNumFillers)]);
    return out;
  }

  Utterance FillerUtterance() {
    const Role role = rng_.Bernoulli(0.5) ? Role::kDoctor : Role::kPatient;
    return {role, Join(Fillers(3 + rng_.Below(4)))};
  }

  Utterance LabelUtterance(const Candidate& c) {
    const std::string& status = space_.schema().statuses()[c.status];
    const Role role = RoleOfStatus(status, rng_);
    std::vector<std::string> words = Fillers(1 + rng_.Below(2));
    const auto& phrase = lexicon_.status_cues[c.status];
    words.insert(words.end(), phrase.begin(), phrase.end());
    if (rng_.Bernoulli(config_.noise)) {
      words.push_back(lexicon_.distractors[rng_.Below(kNumDistractors)]);
    } else {
      const auto& cue = lexicon_.item_cues.at(c.pair);
      words.insert(words.end(), cue.begin(), cue.end());
    }
    const auto tail = Fillers(rng_.Below(3));
    words.insert(words.end(), tail.begin(), tail.end());
    return {role, Join(words)};
  }

  const GenConfig& config_;
  const CandidateSpace& space_;
  const Lexicon& lexicon_;
  Rng& rng_;
};

bool MatchAt(const std::vector<std::string>& tokens, size_t pos,
             const std::vector<std::string>& pattern) {
  if (pos + pattern.size() > tokens.size()) return false;
  return std::equal(pattern.begin(), pattern.end(), tokens.begin() + pos);
}

}  // namespace

Schema SynthSchema() {
  WordSource words({});
  std::vector<CategoryDef> categories;
  for (const char* name : {"Symptom", "Test", "Surgery"}) {
    CategoryDef c{name, {}};
    for (int i = 0; i < 4; ++i) c.items.push_back(words.Next());
    categories.push_back(std::move(c));
  }
  return Schema(std::move(categories),
                {"doctor-pos", "doctor-neg", "patient-pos", "patient-neg", "unknown"},
                {{"pos", "doctor-pos"}, {"neg", "doctor-neg"}});
}

void GenConfig::Validate() const {
  if (train_dialogues < 0 || dev_dialogues < 0 || test_dialogues < 0) {
    throw ConfigError("dialogue counts must be >= 0");
  }
  if (utterances_per_dialogue < 1) throw ConfigError("utterances_per_dialogue must be >= 1");
  if (window_size < 1) throw ConfigError("window_size must be >= 1");
  if (!(labels_per_window > 0)) throw ConfigError("labels_per_window must be > 0");
  if (!(noise >= 0 && noise < 1)) throw ConfigError("noise must lie in [0,1)");
}

Lexicon BuildLexicon(const Schema& schema) {
  Lexicon lex;
  std::set<std::string> taken;
  for (int c = 0; c < schema.num_categories(); ++c) {
    const auto& items = schema.categories()[c].items;
    for (int i = 0; i < static_cast<int>(items.size()); ++i) {
      auto cue = Tokenize(items[i]);
      if (cue.empty()) throw SchemaError("item '" + items[i] + "' has no tokens");
      taken.insert(cue.begin(), cue.end());
      lex.item_cues[{c, i}] = std::move(cue);
    }
  }
  for (const auto& s : schema.statuses()) {
    for (const auto& t : Tokenize(s)) taken.insert(t);
  }
  WordSource words(std::move(taken));
  for (int s = 0; s < schema.num_statuses(); ++s) {
    lex.status_cues.push_back({words.Next(), words.Next()});
  }
  for (int i = 0; i < kNumDistractors; ++i) lex.distractors.push_back(words.Next());
  for (int i = 0; i < kNumFillers; ++i) lex.fillers.push_back(words.Next());
  return lex;
}

nlohmann::json Lexicon::ToJson(const Schema& schema) const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& [pair, cue] : item_cues) {
    const CategoryDef& cat = schema.categories().at(pair.category);
    items.push_back(
        {{"category", cat.name}, {"item", cat.items.at(pair.item)}, {"cue", Join(cue)}});
  }
  nlohmann::json statuses = nlohmann::json::array();
  for (size_t s = 0; s < status_cues.size(); ++s) {
    statuses.push_back({{"status", schema.statuses().at(s)}, {"phrase", Join(status_cues[s])}});
  }
  return {{"item_cues", items},
          {"status_cues", statuses},
          {"distractors", distractors},
          {"fillers", fillers}};
}

Lexicon Lexicon::FromJson(const nlohmann::json& j, const Schema& schema) {
  Lexicon lex;
  try {
    for (const auto& e : j.at("item_cues")) {
      const int c = schema.FindCategory(e.at("category").get<std::string>());
      const int i = c < 0 ? -1 : schema.FindItem(c, e.at("item").get<std::string>());
      if (i < 0) throw ParseError("lexicon names an item outside the schema");
      lex.item_cues[{c, i}] = Tokenize(e.at("cue").get<std::string>());
    }
    lex.status_cues.resize(schema.num_statuses());
    for (const auto& e : j.at("status_cues")) {
      const int s = schema.FindStatus(e.at("status").get<std::string>());
      if (s < 0) throw ParseError("lexicon names a status outside the schema");
      lex.status_cues[s] = Tokenize(e.at("phrase").get<std::string>());
    }
    lex.distractors = j.at("distractors").get<std::vector<std::string>>();
    lex.fillers = j.at("fillers").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed lexicon: ") + e.what());
  }
  for (const auto& phrase : lex.status_cues) {
    if (phrase.empty()) throw ParseError("lexicon lacks a status phrase");
  }
  return lex;
}

GeneratedCorpus Generate(const GenConfig& config) {
  config.Validate();
  const CandidateSpace space = BuildSpace(config.schema);
  GeneratedCorpus out;
  out.lexicon = BuildLexicon(config.schema);
  Rng rng(config.seed);
  DialogueBuilder builder(config, space, out.lexicon, rng);
  auto split = [&](const char* name, int count, std::vector<Dialogue>& dst) {
    char id[64];
    for (int i = 0; i < count; ++i) {
      std::snprintf(id, sizeof(id), "%s-%05d", name, i);
      dst.push_back(builder.Build(id));
    }
  };
  split("train", config.train_dialogues, out.train);
  split("dev", config.dev_dialogues, out.dev);
  split("test", config.test_dialogues, out.test);
  return out;
}

void WriteGenerated(const GeneratedCorpus& corpus, const Schema& schema,
                    const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
  const std::filesystem::path dir(out_dir);
  SaveCorpus((dir / "train.jsonl").string(), corpus.train, schema);
  SaveCorpus((dir / "dev.jsonl").string(), corpus.dev, schema);
  SaveCorpus((dir / "test.jsonl").string(), corpus.test, schema);
  WriteFile((dir / "schema.json").string(), schema.ToJson().dump(2) + "\n");
  WriteFile((dir / "lexicon.json").string(), corpus.lexicon.ToJson(schema).dump(2) + "\n");
}

std::vector<PredictionRecord> RuleOracle(const std::vector<Dialogue>& corpus,
                                         const Lexicon& lexicon) {
  std::vector<PredictionRecord> out;
  for (const Dialogue& d : corpus) {
    for (const Window& w : d.windows) {
      std::set<Candidate> found;
      for (int u = w.start; u < w.end; ++u) {
        const auto tokens = Tokenize(d.utterances[u].text);
        for (size_t pos = 0; pos < tokens.size(); ++pos) {
          for (size_t s = 0; s < lexicon.status_cues.size(); ++s) {
            const auto& phrase = lexicon.status_cues[s];
            if (!MatchAt(tokens, pos, phrase)) continue;
            for (const auto& [pair, cue] : lexicon.item_cues) {
              if (MatchAt(tokens, pos + phrase.size(), cue)) {
                found.insert({pair, static_cast<int>(s)});
              }
            }
          }
        }
      }
      PredictionRecord r{d.id, w.window_index, {}};
      for (const Candidate& c : found) r.predictions.push_back({c, 1.0});
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<std::pair<int, int>> LocateStatusPhrases(const std::vector<std::string>& window_tokens,
                                                     int status, const Lexicon& lexicon) {
  std::vector<std::pair<int, int>> spans;
  const auto& phrase = lexicon.status_cues.at(status);
  for (size_t pos = 0; pos < window_tokens.size(); ++pos) {
    if (MatchAt(window_tokens, pos, phrase)) {
      spans.emplace_back(static_cast<int>(pos), static_cast<int>(pos + phrase.size()));
    }
  }
  return spans;
}

}  // namespace esal
