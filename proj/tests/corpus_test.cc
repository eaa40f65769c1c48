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

#include "esal/errors.h"
#include "gtest/gtest.h"

namespace esal {
namespace {

Schema TinySchema() { return Schema({{"Symptom", {"cough", "fever"}}}, {"pos", "neg"}); }

constexpr char kCorpus[] =
    R"j({"id":"d1","utterances":[{"role":"doctor","text":"Any cough?"},{"role":"Patient","text":"Yes, a cough."},{"role":"doctor","text":"Fever?"}],"windows":[{"start":0,"end":2,"labels":["Symptom: cough (pos)"]},{"start":1,"end":3,"labels":["Symptom:fever-neg","Symptom: cough (pos)"]}]}

{"id":"d2","utterances":[{"role":"patient","text":"hello"}]}
)j";

TEST(CorpusTest, ParsesDialoguesAndSortsGold) {
  const auto corpus = ParseCorpus(kCorpus, TinySchema());
  ASSERT_EQ(corpus.size(), 2u);
  const Dialogue& d = corpus[0];
  EXPECT_EQ(d.id, "d1");
  ASSERT_EQ(d.utterances.size(), 3u);
  EXPECT_EQ(d.utterances[1].role, Role::kPatient);
  ASSERT_EQ(d.windows.size(), 2u);
  EXPECT_EQ(d.windows[1].window_index, 1);
  EXPECT_EQ(d.windows[1].dialogue_id, "d1");
  EXPECT_EQ(d.windows[1].gold, (std::vector<Candidate>{{{0, 0}, 0}, {{0, 1}, 1}}));
  EXPECT_TRUE(corpus[1].windows.empty());
}

TEST(CorpusTest, FormatRoundTrips) {
  const Schema s = TinySchema();
  const auto corpus = ParseCorpus(kCorpus, s);
  EXPECT_EQ(ParseCorpus(FormatCorpus(corpus, s), s), corpus);
}

TEST(CorpusTest, ErrorsCarryLineNumberOrDialogueId) {
  const Schema s = TinySchema();
  auto message = [&](const std::string& text) {
    try {
      ParseCorpus(text, s);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("{\"id\":\"a\",\"utterances\":[]}\n{oops\n").find("line 2"), std::string::npos);
  const std::string bad_label =
      R"j({"id":"dx","utterances":[{"role":"doctor","text":"hi"}],)j"
      R"j("windows":[{"start":0,"end":1,"labels":["Symptom: rash (pos)"]}]})j";
  const std::string m = message(bad_label);
  EXPECT_NE(m.find("dx"), std::string::npos);
  EXPECT_NE(m.find("rash"), std::string::npos);
  EXPECT_NE(message(R"j({"id":"d","utterances":[{"role":"nurse","text":"x"}]})j").find("nurse"),
            std::string::npos);
  EXPECT_NE(message(R"j({"id":"d","utterances":[{"role":"doctor","text":"x"}],)j"
                    R"j("windows":[{"start":0,"end":2}]})j")
                .find("outside"),
            std::string::npos);
  EXPECT_NE(message(R"j({"id":"d","utterances":[{"role":"doctor","text":"x"}],)j"
                    R"j("windows":[{"start":0,"end":1,"labels":["Symptom: cough (pos)",)j"
                    R"j("Symptom:cough-pos"]}]})j")
                .find("duplicate"),
            std::string::npos);
}

Dialogue WithUtterances(int n) {
  Dialogue d;
  d.id = "d";
  for (int i = 0; i < n; ++i) d.utterances.push_back({Role::kDoctor, "u" + std::to_string(i)});
  return d;
}

TEST(CorpusTest, WindowsCoverTheDialogue) {
  const auto w = MakeWindows(WithUtterances(10), 4, 3);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0].start, 0);
  EXPECT_EQ(w[0].end, 4);
  EXPECT_EQ(w[1].start, 3);
  EXPECT_EQ(w[2].start, 6);
  EXPECT_EQ(w[2].end, 10);
  const auto single = MakeWindows(WithUtterances(3), 5, 5);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].end, 3);
  EXPECT_THROW(MakeWindows(WithUtterances(3), 0, 1), ContractError);
}

TEST(CorpusTest, WindowProperties) {
  for (int n = 1; n <= 20; ++n) {
    for (int size = 1; size <= 7; ++size) {
      for (int stride = 1; stride <= size; ++stride) {
        const auto ws = MakeWindows(WithUtterances(n), size, stride);
        std::vector<bool> covered(n, false);
        for (size_t i = 0; i < ws.size(); ++i) {
          EXPECT_EQ(ws[i].window_index, static_cast<int>(i));
          EXPECT_LT(ws[i].start, ws[i].end);
          EXPECT_LE(ws[i].end - ws[i].start, size);
          for (int u = ws[i].start; u < ws[i].end; ++u) covered[u] = true;
        }
        EXPECT_EQ(ws.back().end, n);
        for (bool c : covered) EXPECT_TRUE(c);
      }
    }
  }
}

TEST(CorpusTest, TokenizerSplitsPunctuationAndIdeographs) {
  EXPECT_EQ(Tokenize("Any  COUGH? yes,ok"),
            (std::vector<std::string>{"any", "cough", "?", "yes", ",", "ok"}));
  EXPECT_EQ(Tokenize("咳嗽吗？有"), (std::vector<std::string>{"咳", "嗽", "吗", "？", "有"}));
  EXPECT_EQ(Tokenize("ecg心电图"), (std::vector<std::string>{"ecg", "心", "电", "图"}));
  EXPECT_TRUE(Tokenize(" \t\n").empty());
}

TEST(CorpusTest, VocabRanksByFrequencyThenLexically) {
  const Vocab v = BuildVocab({{"b", "a", "c", "b"}, {"c", "d"}}, 1, 0);
  EXPECT_EQ(v.tokens(),
            (std::vector<std::string>{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "b", "c", "a", "d"}));
  EXPECT_EQ(BuildVocab({{"b", "a", "c", "b"}, {"c", "d"}}, 2, 0).size(), 6);
  EXPECT_EQ(BuildVocab({{"b", "a", "c", "b"}, {"c", "d"}}, 1, 1).size(), 5);
  EXPECT_EQ(v.Id("zzz"), Vocab::kUnk);
  EXPECT_EQ(Vocab(v.tokens()), v);
  EXPECT_EQ(Vocab(v.tokens()).Hash(), v.Hash());
  EXPECT_NE(Vocab().Hash(), v.Hash());
  EXPECT_THROW(Vocab({"a", "b"}), ContractError);
}

TEST(CorpusTest, EncodeWindowAddsMarkersAndTruncates) {
  const auto corpus = ParseCorpus(kCorpus, TinySchema());
  const Vocab vocab = BuildVocab(corpus, 1, 0);
  const Dialogue& d = corpus[0];
  const TokenSeq seq = EncodeWindow(d.windows[0], d, vocab, 256);
  EXPECT_EQ(seq.tokens, (std::vector<std::string>{"[CLS]", "[doc]", "any", "cough", "?", "[pat]",
                                                  "yes", ",", "a", "cough", ".", "[SEP]"}));
  for (size_t i = 0; i < seq.ids.size(); ++i) EXPECT_EQ(vocab.Token(seq.ids[i]), seq.tokens[i]);
  const TokenSeq cut = EncodeWindow(d.windows[0], d, vocab, 4);
  EXPECT_EQ(cut.tokens, (std::vector<std::string>{"[CLS]", "[doc]", "any", "[SEP]"}));
  EXPECT_THROW(EncodeWindow(d.windows[0], d, vocab, 1), ContractError);
  EXPECT_EQ(EncodeText("unseen cough", vocab).ids,
            (std::vector<int>{Vocab::kUnk, vocab.Id("cough")}));
}

}  // namespace
}  // namespace esal
