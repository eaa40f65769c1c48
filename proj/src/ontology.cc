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

#include "esal/ontology.h"

#include <cstdio>
#include <set>
#include <utility>

#include "esal/errors.h"
#include "esal/util.h"

namespace esal {

namespace {

void RequireUnique(const std::vector<std::string>& names, const std::string& what) {
  if (names.empty()) throw SchemaError(what + " list is empty");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (Trim(n).empty()) throw SchemaError("empty name in " + what + " list");
    if (!seen.insert(n).second) throw SchemaError("duplicate " + what + " name '" + n + "'");
  }
}

std::vector<std::string> Placeholders(const std::string& stem, int from, int to) {
  std::vector<std::string> out;
  for (int i = from; i <= to; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s %02d", stem.c_str(), i);
    out.emplace_back(buf);
  }
  return out;
}

}  // namespace

Schema::Schema(std::vector<CategoryDef> categories, std::vector<std::string> statuses,
               std::map<std::string, std::string> status_aliases)
    : categories_(std::move(categories)),
      statuses_(std::move(statuses)),
      aliases_(std::move(status_aliases)) {
  if (categories_.empty()) throw SchemaError("category list is empty");
  std::vector<std::string> cat_names;
  for (const auto& c : categories_) {
    cat_names.push_back(c.name);
    RequireUnique(c.items, "item (category '" + c.name + "')");
  }
  RequireUnique(cat_names, "category");
  RequireUnique(statuses_, "status");
  for (const auto& [alias, target] : aliases_) {
    if (FindStatus(alias) >= 0) {
      throw SchemaError("status alias '" + alias + "' shadows a status name");
    }
    if (FindStatus(target) < 0) {
      throw SchemaError("status alias '" + alias + "' targets unknown status '" + target + "'");
    }
  }
}

Schema Schema::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("schema must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "categories" && key != "statuses" && key != "status_aliases") {
      throw SchemaError("unknown schema key '" + key + "'");
    }
  }
  try {
    std::vector<CategoryDef> cats;
    for (const auto& c : j.at("categories")) {
      cats.push_back(
          {c.at("name").get<std::string>(), c.at("items").get<std::vector<std::string>>()});
    }
    auto statuses = j.at("statuses").get<std::vector<std::string>>();
    std::map<std::string, std::string> aliases;
    if (j.contains("status_aliases")) {
      aliases = j.at("status_aliases").get<std::map<std::string, std::string>>();
    }
    return Schema(std::move(cats), std::move(statuses), std::move(aliases));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
}

Schema Schema::Load(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("schema " + path + ": " + e.what());
  }
  return FromJson(j);
}

nlohmann::json Schema::ToJson() const {
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : categories_) cats.push_back({{"name", c.name}, {"items", c.items}});
  nlohmann::json aliases = nlohmann::json::object();
  for (const auto& [k, v] : aliases_) aliases[k] = v;
  return {{"categories", cats}, {"statuses", statuses_}, {"status_aliases", aliases}};
}

int Schema::FindCategory(std::string_view name) const {
  for (size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Schema::FindItem(int category, std::string_view name) const {
  if (category < 0 || category >= num_categories()) return -1;
  const auto& items = categories_[category].items;
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int Schema::FindStatus(std::string_view name) const {
  for (size_t i = 0; i < statuses_.size(); ++i) {
    if (statuses_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int Schema::ResolveStatus(std::string_view name_or_alias) const {
  int s = FindStatus(name_or_alias);
  if (s >= 0) return s;
  auto it = aliases_.find(std::string(name_or_alias));
  return it == aliases_.end() ? -1 : FindStatus(it->second);
}

std::string Schema::Hash() const { return HexDigest(Fnv1a64(ToJson().dump())); }

Schema MieSchema() {
  std::vector<std::string> symptom = {"premature beat", "high blood pressure", "heart disease",
                                      "short breath",   "chest discomfort",    "pain"};
  for (auto& s : Placeholders("symptom", 7, 45)) symptom.push_back(std::move(s));
  std::vector<std::string> surgery = {"radio frequency ablation"};
  for (auto& s : Placeholders("surgery", 2, 4)) surgery.push_back(std::move(s));
  std::vector<std::string> test = {"electrocardiogram"};
  for (auto& s : Placeholders("test", 2, 16)) test.push_back(std::move(s));
  std::vector<std::string> other = Placeholders("other info", 1, 6);
  return Schema({{"Symptom", symptom}, {"Surgery", surgery}, {"Test", test}, {"Other Info", other}},
                {"doctor-pos", "doctor-neg", "patient-pos", "patient-neg", "unknown"},
                {{"pos", "doctor-pos"}, {"neg", "doctor-neg"}});
}

CandidateSpace::CandidateSpace(Schema schema) : schema_(std::move(schema)) {
  const int num_status = schema_.num_statuses();
  for (int c = 0; c < schema_.num_categories(); ++c) {
    pair_offsets_.push_back(static_cast<int>(pairs_.size()));
    const int n_items = static_cast<int>(schema_.categories()[c].items.size());
    for (int i = 0; i < n_items; ++i) {
      pairs_.push_back({c, i});
      for (int s = 0; s < num_status; ++s) triples_.push_back({{c, i}, s});
    }
  }
}

int CandidateSpace::PairIndex(const CandidatePair& p) const {
  if (p.category < 0 || p.category >= schema_.num_categories()) {
    throw ContractError("category index out of range");
  }
  const int n_items = static_cast<int>(schema_.categories()[p.category].items.size());
  if (p.item < 0 || p.item >= n_items) throw ContractError("item index out of range");
  return pair_offsets_[p.category] + p.item;
}

int CandidateSpace::IndexOf(const Candidate& c) const {
  if (c.status < 0 || c.status >= num_statuses()) throw ContractError("status index out of range");
  return PairIndex(c.pair) * num_statuses() + c.status;
}

const Candidate& CandidateSpace::TripleOf(int index) const {
  if (index < 0 || index >= size()) throw ContractError("candidate index out of range");
  return triples_[index];
}

CandidateSpace BuildSpace(const Schema& schema) { return CandidateSpace(schema); }

Candidate ParseLabel(std::string_view text, const Schema& schema) {
  const std::string_view label = Trim(text);
  const size_t colon = label.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("label '" + std::string(label) + "' has no ':' separator");
  }
  const std::string category_name(Trim(label.substr(0, colon)));
  const int category = schema.FindCategory(category_name);
  if (category < 0) throw ParseError("unknown category '" + category_name + "'");
  const std::string_view rest = Trim(label.substr(colon + 1));

  // "Item (status)"
  if (!rest.empty() && rest.back() == ')') {
    const size_t open = rest.rfind('(');
    if (open == std::string_view::npos) {
      throw ParseError("label '" + std::string(label) + "' has unbalanced parentheses");
    }
    const std::string item_name(Trim(rest.substr(0, open)));
    const std::string status_name(Trim(rest.substr(open + 1, rest.size() - open - 2)));
    const int item = schema.FindItem(category, item_name);
    if (item < 0) {
      throw ParseError("unknown item '" + item_name + "' in category '" + category_name + "'");
    }
    const int status = schema.ResolveStatus(status_name);
    if (status < 0) throw ParseError("unknown status '" + status_name + "'");
    return {{category, item}, status};
  }

  // "Item-Status": items and statuses may themselves contain '-', so take
  // the leftmost split where both halves resolve.
  std::string bad_status;
  for (size_t pos = rest.find('-'); pos != std::string_view::npos; pos = rest.find('-', pos + 1)) {
    const std::string item_name(Trim(rest.substr(0, pos)));
    const std::string status_name(Trim(rest.substr(pos + 1)));
    const int item = schema.FindItem(category, item_name);
    if (item < 0) continue;
    const int status = schema.ResolveStatus(status_name);
    if (status >= 0) return {{category, item}, status};
    if (bad_status.empty()) bad_status = status_name;
  }
  if (!bad_status.empty()) throw ParseError("unknown status '" + bad_status + "'");
  throw ParseError("unknown item '" + std::string(rest) + "' in category '" + category_name + "'");
}

std::string FormatLabel(const Candidate& c, const Schema& schema) {
  const auto& cat = schema.categories().at(c.pair.category);
  return cat.name + ": " + cat.items.at(c.pair.item) + " (" + schema.statuses().at(c.status) + ")";
}

}  // namespace esal
