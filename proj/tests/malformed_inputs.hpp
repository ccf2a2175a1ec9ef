/*
 * Copyright 2026 The crowdiq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Malformed files for each input format, with the location and message the
// tool must report.

#ifndef CROWDIQ_TESTS_MALFORMED_INPUTS_HPP_
#define CROWDIQ_TESTS_MALFORMED_INPUTS_HPP_

#include <string>
#include <vector>

namespace malformed {

enum class Format { kResponses, kAnswerKey, kScoreTable };

struct Case {
  const char* name;
  Format format;
  std::string text;
  std::string location;  // printed before the message
  std::string message;
};

inline const std::vector<Case>& cases() {
  static const std::vector<Case> all = {
      {"responses: missing #k directive", Format::kResponses,
       "participant_id,q1,q2\np1,1,2\n", "line 1", "missing #k directive"},
      {"responses: invalid #k directive", Format::kResponses,
       "#k=one\nparticipant_id,q1,q2\np1,1,2\n", "line 1", "invalid #k directive"},
      {"responses: code above k", Format::kResponses,
       "#k=8\nparticipant_id,q1,q2\np1,1,9\n", "line 3, column q2", "code out of range"},
      {"responses: code zero", Format::kResponses,
       "#k=8\nparticipant_id,q1,q2\np1,0,2\n", "line 3, column q1", "code out of range"},
      {"responses: ragged row", Format::kResponses,
       "#k=8\nparticipant_id,q1,q2\np1,1,2\np2,1\n", "line 4", "ragged row"},
      {"responses: duplicate participant id", Format::kResponses,
       "#k=8\nparticipant_id,q1,q2\np1,1,2\np1,2,1\n", "line 4, column participant_id",
       "duplicate participant id"},
      {"responses: empty body", Format::kResponses,
       "#k=8\nparticipant_id,q1,q2\n", "line 2", "empty body"},
      {"answer key: non-contiguous items", Format::kAnswerKey,
       "#k=8\n1,3\n3,5\n", "item 2", "non-contiguous items"},
      {"answer key: duplicate item", Format::kAnswerKey,
       "#k=8\n1,3\n1,5\n", "line 3", "duplicate item index"},
      {"answer key: code out of range", Format::kAnswerKey,
       "#k=8\n1,0\n2,5\n", "line 2, column 2", "code out of range"},
      {"score table: missing raw value", Format::kScoreTable,
       "0,40\n2,160\n", "raw 1", "missing raw score 1"},
      {"score table: non-monotone", Format::kScoreTable,
       "0,100\n1,90\n2,160\n", "raw 1", "non-monotone"},
  };
  return all;
}

// A well-formed two-item answer key and matching questionnaire and table.
inline const char* kGoodKey = "#k=8\n1,3\n2,5\n";
inline const char* kGoodTable = "0,40\n1,100\n2,160\n";

// Command line that feeds the malformed file at `bad` to the tool. `good_key`
// and `good_table` hold kGoodKey and kGoodTable.
inline std::string command_for(Format format, const std::string& bad,
                               const std::string& good_key,
                               const std::string& good_table) {
  switch (format) {
    case Format::kResponses:
      return "aggregate --method maj --responses '" + bad + "'";
    case Format::kAnswerKey:
      return "score --answers '" + good_key + "' --key '" + bad + "' --table '" + good_table + "'";
    case Format::kScoreTable:
      return "score --answers '" + good_key + "' --key '" + good_key + "' --table '" + bad + "'";
  }
  return {};
}

}  // namespace malformed

#endif  // CROWDIQ_TESTS_MALFORMED_INPUTS_HPP_
