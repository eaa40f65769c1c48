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

#include <fstream>
#include <set>
#include <sstream>

#include "esal/errors.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace esal {
namespace {

Schema TinySchema() {
  return Schema({{"Symptom", {"cough", "chest-pain"}}, {"Test", {"ecg"}}},
                {"doctor-pos", "doctor-neg", "unknown"},
                {{"pos", "doctor-pos"}, {"neg", "doctor-neg"}});
}

TEST(OntologyTest, MieSpaceHas355Candidates) {
  const CandidateSpace space = BuildSpace(MieSchema());
  EXPECT_EQ(space.num_pairs(), 71);
  EXPECT_EQ(space.num_statuses(), 5);
  EXPECT_EQ(space.size(), 355);
}

TEST(OntologyTest, IndexIsABijection) {
  const CandidateSpace space = BuildSpace(MieSchema());
  std::set<Candidate> seen;
  for (int i = 0; i < space.size(); ++i) {
    const Candidate& c = space.TripleOf(i);
    EXPECT_EQ(space.IndexOf(c), i);
    EXPECT_EQ(space.PairOfCandidate(i), space.PairIndex(c.pair));
    EXPECT_EQ(space.StatusOfCandidate(i), c.status);
    seen.insert(c);
  }
  EXPECT_EQ(static_cast<int>(seen.size()), space.size());
  // Lexicographic order of (category, item, status).
  for (int i = 1; i < space.size(); ++i) EXPECT_LT(space.TripleOf(i - 1), space.TripleOf(i));
}

TEST(OntologyTest, EnumerationMatchesGoldenFile) {
  const Schema schema = MieSchema();
  const CandidateSpace space = BuildSpace(schema);
  std::ifstream in(testing::SourcePath("tests/golden/mie_candidates.txt"));
  ASSERT_TRUE(in.good());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    std::ostringstream want;
    want << n << "\t" << FormatLabel(space.TripleOf(n), schema);
    EXPECT_EQ(line, want.str());
    ++n;
  }
  EXPECT_EQ(n, space.size());
}

TEST(OntologyTest, BundledSchemaFileMatchesBuiltin) {
  const Schema file = Schema::Load(testing::SourcePath("data/schemas/mie.json"));
  EXPECT_EQ(file.ToJson(), MieSchema().ToJson());
  EXPECT_EQ(file.Hash(), MieSchema().Hash());
}

TEST(OntologyTest, JsonRoundTrip) {
  const Schema s = TinySchema();
  const Schema back = Schema::FromJson(s.ToJson());
  EXPECT_EQ(back.ToJson(), s.ToJson());
  EXPECT_EQ(back.Hash(), s.Hash());
  EXPECT_NE(s.Hash(), MieSchema().Hash());
}

TEST(OntologyTest, ParsesBothLabelForms) {
  const Schema s = TinySchema();
  const Candidate want{{0, 1}, 1};
  EXPECT_EQ(ParseLabel("Symptom: chest-pain (doctor-neg)", s), want);
  EXPECT_EQ(ParseLabel("Symptom:chest-pain-doctor-neg", s), want);
  EXPECT_EQ(ParseLabel("  Symptom : chest-pain ( neg ) ", s), want);
  EXPECT_EQ(ParseLabel("Symptom:chest-pain-neg", s), want);
  EXPECT_EQ(ParseLabel("Test: ecg (unknown)", s), (Candidate{{1, 0}, 2}));
}

TEST(OntologyTest, FormatIsCanonicalAndRoundTrips) {
  const Schema s = TinySchema();
  const CandidateSpace space = BuildSpace(s);
  EXPECT_EQ(FormatLabel({{0, 0}, 0}, s), "Symptom: cough (doctor-pos)");
  for (int i = 0; i < space.size(); ++i) {
    EXPECT_EQ(ParseLabel(FormatLabel(space.TripleOf(i), s), s), space.TripleOf(i));
  }
}

TEST(OntologyTest, ParseErrorsNameTheBadToken) {
  const Schema s = TinySchema();
  auto message = [&](const std::string& label) {
    try {
      ParseLabel(label, s);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("Symptom cough (unknown)").find("':'"), std::string::npos);
  EXPECT_NE(message("Sign: cough (unknown)").find("'Sign'"), std::string::npos);
  EXPECT_NE(message("Symptom: sneeze (unknown)").find("'sneeze'"), std::string::npos);
  EXPECT_NE(message("Symptom: cough (maybe)").find("'maybe'"), std::string::npos);
  EXPECT_NE(message("Symptom: cough-maybe").find("'maybe'"), std::string::npos);
  EXPECT_NE(message("Test: ecg unknown)").find("ecg"), std::string::npos);
}

TEST(OntologyTest, SchemaValidation) {
  EXPECT_THROW(Schema({}, {"a"}), SchemaError);
  EXPECT_THROW(Schema({{"C", {}}}, {"a"}), SchemaError);
  EXPECT_THROW(Schema({{"C", {"x"}}}, {}), SchemaError);
  EXPECT_THROW(Schema({{"C", {"x", "x"}}}, {"a"}), SchemaError);
  EXPECT_THROW(Schema({{"C", {"x"}}, {"C", {"y"}}}, {"a"}), SchemaError);
  EXPECT_THROW(Schema({{"C", {"x"}}}, {"a", "a"}), SchemaError);
  EXPECT_THROW(Schema({{"C", {"x"}}}, {"a"}, {{"b", "zzz"}}), SchemaError);
  EXPECT_THROW(Schema({{"C", {"x"}}}, {"a", "b"}, {{"b", "a"}}), SchemaError);
  EXPECT_THROW(Schema::FromJson(nlohmann::json::parse(R"({"categories": 3})")), SchemaError);
}

TEST(OntologyTest, IndexOfRejectsOutOfRange) {
  const CandidateSpace space = BuildSpace(TinySchema());
  EXPECT_THROW(space.IndexOf({{0, 5}, 0}), ContractError);
  EXPECT_THROW(space.IndexOf({{0, 0}, 3}), ContractError);
  EXPECT_THROW(space.TripleOf(space.size()), ContractError);
}

}  // namespace
}  // namespace esal
