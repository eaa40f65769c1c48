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

// Label schema for medical dialogue extraction.
//
// A schema lists categories (each with its items) and a status vocabulary
// shared by every category. The candidate space is the flattened product
//   (category, item) x status
// enumerated lexicographically in schema order, so candidate index
//   index = pair_index * num_statuses + status
// where pair_index counts (category, item) pairs in schema order.
//
// Labels are written "Category: Item (status)" (canonical) or
// "Category:Item-Status". Status aliases ("pos" -> "doctor-pos") are only
// consulted while parsing; formatting always uses the full status name.

#ifndef ESAL_ONTOLOGY_H_
#define ESAL_ONTOLOGY_H_

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace esal {

struct CategoryDef {
  std::string name;
  std::vector<std::string> items;
};

class Schema {
 public:
  // Throws SchemaError on empty lists, duplicate names, or aliases that
  // shadow a status / point to an unknown status.
  Schema(std::vector<CategoryDef> categories, std::vector<std::string> statuses,
         std::map<std::string, std::string> status_aliases = {});

  static Schema FromJson(const nlohmann::json& j);
  static Schema Load(const std::string& path);
  nlohmann::json ToJson() const;

  const std::vector<CategoryDef>& categories() const { return categories_; }
  const std::vector<std::string>& statuses() const { return statuses_; }
  const std::map<std::string, std::string>& status_aliases() const { return aliases_; }

  int num_categories() const { return static_cast<int>(categories_.size()); }
  int num_statuses() const { return static_cast<int>(statuses_.size()); }

  // -1 when absent. FindStatus does not consult aliases; ResolveStatus does.
  int FindCategory(std::string_view name) const;
  int FindItem(int category, std::string_view name) const;
  int FindStatus(std::string_view name) const;
  int ResolveStatus(std::string_view name_or_alias) const;

  // Stable hash of the canonical JSON form.
  std::string Hash() const;

 private:
  std::vector<CategoryDef> categories_;
  std::vector<std::string> statuses_;
  std::map<std::string, std::string> aliases_;
};

// The bundled 4-category schema: Symptom/Surgery/Test/Other Info with
// 45/4/16/6 items and the five party-specific statuses. Item names that the
// source annotation does not list are placeholders.
Schema MieSchema();

struct CandidatePair {
  int category = 0;
  int item = 0;
  auto operator<=>(const CandidatePair&) const = default;
};

struct Candidate {
  CandidatePair pair;
  int status = 0;
  auto operator<=>(const Candidate&) const = default;
};

class CandidateSpace {
 public:
  explicit CandidateSpace(Schema schema);

  const Schema& schema() const { return schema_; }
  int size() const { return static_cast<int>(triples_.size()); }
  int num_pairs() const { return static_cast<int>(pairs_.size()); }
  int num_statuses() const { return schema_.num_statuses(); }

  // Throws ContractError when out of range.
  int IndexOf(const Candidate& c) const;
  const Candidate& TripleOf(int index) const;

  int PairIndex(const CandidatePair& p) const;
  const CandidatePair& PairAt(int pair_index) const { return pairs_.at(pair_index); }
  int PairOfCandidate(int index) const { return index / num_statuses(); }
  int StatusOfCandidate(int index) const { return index % num_statuses(); }
  // First pair index of a category; pairs of category c are contiguous.
  int PairOffset(int category) const { return pair_offsets_.at(category); }

 private:
  Schema schema_;
  std::vector<int> pair_offsets_;
  std::vector<CandidatePair> pairs_;
  std::vector<Candidate> triples_;
};

CandidateSpace BuildSpace(const Schema& schema);

// Throws ParseError naming the offending token.
Candidate ParseLabel(std::string_view text, const Schema& schema);
std::string FormatLabel(const Candidate& c, const Schema& schema);

}  // namespace esal

#endif  // ESAL_ONTOLOGY_H_
