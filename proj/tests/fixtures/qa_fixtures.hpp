// Copyright 2026 The cgg Authors.
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


// Hand-labelled QA corpora for the rewrite pipeline.
//
// Every row lists the expected pipeline outcome: "keep", "unmatched", or the
// name of the drop reason. Labels map each link id to the person index of the
// same number.

#pragma once

#include <string>
#include <vector>

#include "cgg/rulekit/pipeline.hpp"
#include "test_util.hpp"

namespace cgg::testing {

struct QARow {
  const char* id;
  const char* question;
  const char* answer;
  std::size_t n_persons;
  const char* expect;
  /// Expected statement for kept rows, empty when not checked.
  const char* statement = "";
};

inline rulekit::QAPair make_qa(const QARow& row, std::size_t d_vis = 4) {
  rulekit::QAPair qa;
  qa.sample_id = row.id;
  qa.question = toks(row.question);
  qa.image = row_of_persons(std::string("img_") + row.id, row.n_persons, d_vis);
  qa.correct_index = std::hash<std::string>{}(row.id) % 4;
  for (std::size_t i = 0; i < 4; ++i) {
    qa.answers[i] = i == qa.correct_index ? toks(row.answer) : toks("i do not know");
  }
  for (const auto* tl : {&qa.question, &qa.answers[qa.correct_index]}) {
    for (const auto& t : *tl) {
      if (const auto* p = std::get_if<PersonLink>(&t)) {
        qa.labels.pairs[p->link_id] = static_cast<std::size_t>(p->link_id);
      }
    }
  }
  return qa;
}

inline std::vector<rulekit::QAPair> make_corpus(const std::vector<QARow>& rows) {
  std::vector<rulekit::QAPair> out;
  for (const auto& r : rows) out.push_back(make_qa(r));
  return out;
}

// 50 pairs: 38 match the default rules, 12 do not; 13 of the matched pairs
// are dropped by the filters.
inline const std::vector<QARow>& pipeline_rows_50() {
  static const std::vector<QARow> rows = {
      {"p00", "why is PERSON0 smiling ?", "PERSON0 just won", 3, "keep",
       "PERSON0 is smiling because PERSON0 just won"},
      {"p01", "what is PERSON1 doing ?", "PERSON1 is reading", 2, "keep", "PERSON1 is reading"},
      {"p02", "where will PERSON1 go ?", "to the kitchen", 2, "keep",
       "PERSON1 will go to the kitchen"},
      {"p03", "why is PERSON0 running ?", "PERSON0 is late", 11, "TooManyPersons"},
      {"p04", "what are PERSON1 and PERSON2 doing ?", "PERSON1 and PERSON2 are dancing", 4,
       "TiedLinks"},
      {"p05", "how is PERSON2 feeling ?", "happy about the [cake#7]", 3, "keep",
       "PERSON2 is feeling happy about the cake"},
      {"p06", "hmm ok ?", "yes", 3, "unmatched"},
      {"p07", "what is PERSON0 doing ?", "PERSON0 is sitting", 1, "SingleCandidate"},
      {"p08", "what is the [dog#3] doing ?", "the dog is sleeping", 3, "NoPersonLink"},
      {"p09", "why is PERSON0 here ?", "PERSON0 lives here", 0, "NoCandidate"},
      {"p10", "what will PERSON2 do next ?", "PERSON2 will open the [door#4]", 5, "keep",
       "PERSON2 will open the door"},
      {"p11", "what is PERSON1 thinking about ?", "about the [dog#2]", 2, "keep",
       "PERSON1 is thinking about the dog"},
      {"p12", "what does PERSON0 want ?", "to leave", 3, "keep", "PERSON0 wants to leave"},
      {"p13", "is PERSON0 happy ?", "yes he is", 2, "unmatched"},
      {"p14", "who is holding the [cup#5] ?", "PERSON2 or PERSON0", 4, "TiedLinks"},
      {"p15", "whose [bag#6] is this ?", "it belongs to PERSON1", 2, "keep",
       "it belongs to PERSON1"},
      {"p16", "which person is the oldest ?", "PERSON3 is the oldest", 6, "keep"},
      {"p17", "where is PERSON0 standing ?", "next to the [car#8]", 3, "keep",
       "PERSON0 is standing next to the car"},
      {"p18", "how did PERSON1 get here ?", "taking the bus", 4, "keep",
       "PERSON1 did get here by taking the bus"},
      {"p19", "what was PERSON0 doing before PERSON1 arrived ?", "PERSON0 was cooking", 2, "keep",
       "PERSON0 was cooking before PERSON1 arrived"},
      {"p20", "PERSON0 looks tired .", "yes", 2, "unmatched"},
      {"p21", "does PERSON1 like the [cake#2] ?", "no", 3, "unmatched"},
      {"p22", "why are PERSON0 and PERSON1 laughing ?", "PERSON1 told a joke", 12,
       "TooManyPersons"},
      {"p23", "why did PERSON2 leave ?", "PERSON2 was bored", 3, "keep",
       "PERSON2 did leave because PERSON2 was bored"},
      {"p24", "what is happening ?", "a party", 5, "NoPersonLink"},
      {"p25", "can PERSON0 swim ?", "probably", 2, "unmatched"},
      {"p26", "why ?", "PERSON0 is sad", 2, "keep", "because PERSON0 is sad"},
      {"p27", "who is the host ?", "PERSON4 is the host", 5, "keep"},
      {"p28", "what is PERSON3 doing ?", "PERSON3 is pouring wine", 10, "keep"},
      {"p29", "what is PERSON0 doing ?", "PERSON0 and PERSON1 are talking", 11, "TooManyPersons"},
      {"p30", "the weather is nice", "sure", 2, "unmatched"},
      {"p31", "where are PERSON0 and PERSON2 going ?", "to a wedding", 3, "keep"},
      {"p32", "how does PERSON1 feel ?", "PERSON1 feels proud", 2, "keep"},
      {"p33", "what is PERSON1 holding ?", "PERSON1 is holding a [knife#9]", 2, "keep",
       "PERSON1 is holding a knife"},
      {"p34", "okay then", "fine", 4, "unmatched"},
      {"p35", "why would PERSON1 cry ?", "PERSON1 lost the [ring#3]", 1, "SingleCandidate"},
      {"p36", "who is talking ?", "nobody", 3, "NoPersonLink"},
      {"p37", "will PERSON0 win ?", "maybe", 2, "unmatched"},
      {"p38", "what is PERSON0 doing ?", "PERSON0 is waving at PERSON1", 2, "keep"},
      {"p39", "which way is PERSON2 facing ?", "PERSON2 faces the window", 3, "keep"},
      {"p40", "why was PERSON1 upset ?", "PERSON0 and PERSON1 argued", 3, "TiedLinks"},
      {"p41", "do they know each other ?", "yes", 3, "unmatched"},
      {"p42", "whose turn is it ?", "it is the turn of PERSON0", 2, "keep"},
      {"p43", "what will PERSON0 do after lunch ?", "PERSON0 will take a nap", 4, "keep"},
      {"p44", "are PERSON0 and PERSON1 friends ?", "yes", 2, "unmatched"},
      {"p45", "how is PERSON0 feeling ?", "nervous", 0, "NoCandidate"},
      {"p46", "PERSON1 ?", "what", 2, "unmatched"},
      {"p47", "where is PERSON1 sitting ?", "on the [bench#1]", 2, "keep",
       "PERSON1 is sitting on the bench"},
      {"p48", "explain the scene", "PERSON0 is cooking", 2, "unmatched"},
      {"p49", "what is PERSON0 thinking ?", "that PERSON1 is rude", 2, "keep",
       "PERSON0 is thinking that PERSON1 is rude"},
  };
  return rows;
}

// 20 pairs: 14 match the default rules, 2 of those fail the filters.
inline const std::vector<QARow>& pipeline_rows_20() {
  static const std::vector<QARow> rows = {
      {"t00", "why is PERSON0 smiling ?", "PERSON0 just won", 3, "keep"},
      {"t01", "what is PERSON1 doing ?", "PERSON1 is reading", 2, "keep"},
      {"t02", "where will PERSON1 go ?", "to the kitchen", 2, "keep"},
      {"t03", "how is PERSON0 feeling ?", "calm", 4, "keep"},
      {"t04", "what does PERSON2 want ?", "more coffee", 3, "keep"},
      {"t05", "who is sitting ?", "PERSON1 is sitting", 2, "keep"},
      {"t06", "whose [hat#3] is this ?", "the hat of PERSON0", 2, "keep"},
      {"t07", "which one is PERSON0 ?", "PERSON0 is in red", 5, "keep"},
      {"t08", "why did PERSON1 stop ?", "PERSON1 saw the [sign#2]", 2, "keep"},
      {"t09", "what will PERSON0 do next ?", "PERSON0 will leave", 3, "keep"},
      {"t10", "where is PERSON2 going ?", "home", 3, "keep"},
      {"t11", "what is PERSON0 thinking ?", "of the past", 2, "keep"},
      {"t12", "why is PERSON0 waving ?", "PERSON0 sees PERSON1", 11, "TooManyPersons"},
      {"t13", "what are they doing ?", "PERSON0 and PERSON1 are singing", 2, "TiedLinks"},
      {"t14", "hmm ok ?", "yes", 2, "unmatched"},
      {"t15", "is PERSON0 happy ?", "yes", 2, "unmatched"},
      {"t16", "PERSON1 looks cold .", "true", 2, "unmatched"},
      {"t17", "does PERSON0 work here ?", "no", 2, "unmatched"},
      {"t18", "can PERSON1 see ?", "yes", 2, "unmatched"},
      {"t19", "nice hat", "thanks", 2, "unmatched"},
  };
  return rows;
}

// 10 pairs, 9 match the default rules.
inline const std::vector<QARow>& coverage_rows_10() {
  static const std::vector<QARow> rows = {
      {"c0", "why is PERSON0 smiling ?", "PERSON0 just won", 2, "keep"},
      {"c1", "what is PERSON1 doing ?", "PERSON1 is reading", 2, "keep"},
      {"c2", "where will PERSON1 go ?", "to the kitchen", 2, "keep"},
      {"c3", "how is PERSON0 feeling ?", "calm", 2, "keep"},
      {"c4", "who is there ?", "PERSON1 is there", 2, "keep"},
      {"c5", "whose [cup#1] is it ?", "it is for PERSON0", 2, "keep"},
      {"c6", "which is PERSON1 ?", "PERSON1 is tall", 2, "keep"},
      {"c7", "what does PERSON0 want ?", "food", 2, "keep"},
      {"c8", "why ?", "PERSON1 said so", 2, "keep"},
      {"c9", "hmm ok ?", "yes", 2, "unmatched"},
  };
  return rows;
}

}  // namespace cgg::testing
