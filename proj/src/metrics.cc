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

#include "esal/metrics.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "esal/errors.h"

namespace esal {

namespace {

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

double Ratio(int64_t num, int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

nlohmann::json ScopeJson(const ScopeScores& s) {
  nlohmann::json out = nlohmann::json::object();
  for (int g = 0; g < kNumGranularities; ++g) {
    const Counts& c = s.counts[g];
    out[std::string(GranularityName(static_cast<Granularity>(g)))] = {
        {"tp", c.tp},           {"fp", c.fp},  {"fn", c.fn}, {"precision", c.Precision()},
        {"recall", c.Recall()}, {"f1", c.F1()}};
  }
  return out;
}

std::map<std::string, std::vector<std::vector<Candidate>>> GroupByDialogue(const WindowSets& sets) {
  std::map<std::string, std::vector<std::vector<Candidate>>> out;
  for (const auto& [key, labels] : sets) out[key.first].push_back(labels);
  return out;
}

}  // namespace

std::string_view GranularityName(Granularity g) {
  switch (g) {
    case Granularity::kCategory:
      return "category";
    case Granularity::kItem:
      return "item";
    case Granularity::kFull:
      return "full";
  }
  return "";
}

LevelSet Project(const std::vector<Candidate>& labels, Granularity g) {
  LevelSet out;
  for (const Candidate& c : labels) {
    switch (g) {
      case Granularity::kCategory:
        out.emplace(c.pair.category, -1, -1);
        break;
      case Granularity::kItem:
        out.emplace(c.pair.category, c.pair.item, -1);
        break;
      case Granularity::kFull:
        out.emplace(c.pair.category, c.pair.item, c.status);
        break;
    }
  }
  return out;
}

double Counts::Precision() const { return Ratio(tp, tp + fp); }
double Counts::Recall() const { return Ratio(tp, tp + fn); }

double Counts::F1() const {
  const double p = Precision();
  const double r = Recall();
  return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
}

Counts& Counts::operator+=(const Counts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

Counts CountSets(const LevelSet& pred, const LevelSet& gold) {
  Counts c;
  for (const auto& t : pred) {
    if (gold.count(t)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = static_cast<int64_t>(gold.size()) - c.tp;
  return c;
}

nlohmann::json EvalReport::ToJson() const {
  return {{"window", ScopeJson(window)}, {"dialogue", ScopeJson(dialogue)}};
}

std::string EvalReport::FormatTable() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %-22s %-22s %-22s\n", "Level", "Category", "Item",
                "Full");
  os << line;
  std::snprintf(line, sizeof(line), "%-16s", "");
  os << line;
  for (int g = 0; g < kNumGranularities; ++g) {
    std::snprintf(line, sizeof(line), " %-7s%-7s%-8s", "P", "R", "F1");
    os << line;
  }
  os << "\n";
  auto row = [&](const char* name, const ScopeScores& s) {
    std::snprintf(line, sizeof(line), "%-16s", name);
    os << line;
    for (const Counts& c : s.counts) {
      std::snprintf(line, sizeof(line), " %-7s%-7s%-8s", Percent(c.Precision()).c_str(),
                    Percent(c.Recall()).c_str(), Percent(c.F1()).c_str());
      os << line;
    }
    os << "\n";
  };
  row("Window-Level", window);
  row("Dialogue-Level", dialogue);
  // Drop the column padding at line ends.
  std::string table;
  std::istringstream lines(os.str());
  for (std::string l; std::getline(lines, l);) {
    l.erase(l.find_last_not_of(' ') + 1);
    table += l + "\n";
  }
  return table;
}

WindowSets GoldSets(const std::vector<Dialogue>& corpus) {
  WindowSets out;
  for (const Dialogue& d : corpus) {
    for (const Window& w : d.windows) out[{d.id, w.window_index}] = w.gold;
  }
  return out;
}

ScopeScores EvalWindows(const WindowSets& pred, const WindowSets& gold) {
  std::vector<std::string> missing;
  for (const auto& [key, _] : gold) {
    if (!pred.count(key))
      missing.push_back("prediction missing " + key.first + "#" + std::to_string(key.second));
  }
  for (const auto& [key, _] : pred) {
    if (!gold.count(key))
      missing.push_back("gold missing " + key.first + "#" + std::to_string(key.second));
  }
  if (!missing.empty()) {
    std::string msg = "window keys differ:";
    for (const auto& m : missing) msg += " [" + m + "]";
    throw EvalError(msg);
  }
  ScopeScores s;
  for (const auto& [key, gold_labels] : gold) {
    const auto& pred_labels = pred.at(key);
    for (int g = 0; g < kNumGranularities; ++g) {
      const auto gran = static_cast<Granularity>(g);
      s.counts[g] += CountSets(Project(pred_labels, gran), Project(gold_labels, gran));
    }
  }
  return s;
}

std::set<int> ResolveStatuses(const std::set<int>& statuses, const Schema& schema) {
  if (statuses.empty()) throw ContractError("resolve_statuses needs at least one status");
  auto name = [&](int s) -> const std::string& { return schema.statuses().at(s); };
  std::set<int> out = statuses;
  const bool informative =
      std::any_of(out.begin(), out.end(), [&](int s) { return name(s) != "unknown"; });
  if (informative) std::erase_if(out, [&](int s) { return name(s) == "unknown"; });
  const bool positive =
      std::any_of(out.begin(), out.end(), [&](int s) { return EndsWith(name(s), "-pos"); });
  if (positive) std::erase_if(out, [&](int s) { return EndsWith(name(s), "-neg"); });
  return out;
}

std::vector<Candidate> MergeDialogue(const std::vector<std::vector<Candidate>>& windows,
                                     const Schema& schema) {
  std::map<CandidatePair, std::set<int>> groups;
  for (const auto& w : windows) {
    for (const Candidate& c : w) groups[c.pair].insert(c.status);
  }
  std::vector<Candidate> out;
  for (const auto& [pair, statuses] : groups) {
    for (int s : ResolveStatuses(statuses, schema)) out.push_back({pair, s});
  }
  return out;
}

ScopeScores EvalDialogues(const WindowSets& pred, const WindowSets& gold, const Schema& schema) {
  const auto pred_groups = GroupByDialogue(pred);
  const auto gold_groups = GroupByDialogue(gold);
  std::vector<std::string> offenders;
  for (const auto& [id, _] : gold_groups) {
    if (!pred_groups.count(id)) offenders.push_back(id);
  }
  for (const auto& [id, _] : pred_groups) {
    if (!gold_groups.count(id)) offenders.push_back(id);
  }
  if (!offenders.empty()) {
    std::string msg = "dialogue ids differ:";
    for (const auto& id : offenders) msg += " " + id;
    throw EvalError(msg);
  }
  ScopeScores s;
  for (const auto& [id, gold_windows] : gold_groups) {
    const auto merged_gold = MergeDialogue(gold_windows, schema);
    const auto merged_pred = MergeDialogue(pred_groups.at(id), schema);
    for (int g = 0; g < kNumGranularities; ++g) {
      const auto gran = static_cast<Granularity>(g);
      s.counts[g] += CountSets(Project(merged_pred, gran), Project(merged_gold, gran));
    }
  }
  return s;
}

EvalReport Evaluate(const WindowSets& pred, const WindowSets& gold, const Schema& schema) {
  return {EvalWindows(pred, gold), EvalDialogues(pred, gold, schema)};
}

nlohmann::json PredictionToJson(const PredictionRecord& r, const Schema& schema) {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : r.predictions) {
    const CategoryDef& cat = schema.categories().at(p.candidate.pair.category);
    preds.push_back({{"category", cat.name},
                     {"item", cat.items.at(p.candidate.pair.item)},
                     {"status", schema.statuses().at(p.candidate.status)},
                     {"score", p.score}});
  }
  return {{"dialogue_id", r.dialogue_id},
          {"window_index", r.window_index},
          {"predictions", std::move(preds)}};
}

PredictionRecord PredictionFromJson(const nlohmann::json& j, const Schema& schema) {
  PredictionRecord r;
  try {
    r.dialogue_id = j.at("dialogue_id").get<std::string>();
    r.window_index = j.at("window_index").get<int>();
    for (const auto& p : j.at("predictions")) {
      const std::string category = p.at("category").get<std::string>();
      const std::string item = p.at("item").get<std::string>();
      const std::string status = p.at("status").get<std::string>();
      const int c = schema.FindCategory(category);
      if (c < 0) throw ParseError("unknown category '" + category + "'");
      const int i = schema.FindItem(c, item);
      if (i < 0) throw ParseError("unknown item '" + item + "' in category '" + category + "'");
      const int s = schema.ResolveStatus(status);
      if (s < 0) throw ParseError("unknown status '" + status + "'");
      r.predictions.push_back({{{c, i}, s}, p.value("score", 1.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed prediction record: ") + e.what());
  }
  return r;
}

std::string FormatPredictions(const std::vector<PredictionRecord>& records, const Schema& schema) {
  std::string out;
  for (const auto& r : records) out += PredictionToJson(r, schema).dump() + "\n";
  return out;
}

std::vector<PredictionRecord> ParsePredictions(std::string_view jsonl, const Schema& schema) {
  std::vector<PredictionRecord> out;
  size_t pos = 0;
  int line_no = 0;
  while (pos < jsonl.size()) {
    size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(PredictionFromJson(nlohmann::json::parse(line), schema));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

WindowSets PredictionSets(const std::vector<PredictionRecord>& records) {
  WindowSets out;
  for (const auto& r : records) {
    const WindowKey key{r.dialogue_id, r.window_index};
    if (out.count(key)) {
      throw EvalError("duplicate prediction record " + r.dialogue_id + "#" +
                      std::to_string(r.window_index));
    }
    auto& labels = out[key];
    for (const auto& p : r.predictions) labels.push_back(p.candidate);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  }
  return out;
}

}  // namespace esal
