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

// Domain types for questionnaire data and the three text formats:
//
//   responses     #k=<int>
//                 participant_id,q1,...,qm
//                 p1,3,5,...
//   answer key    [#k=<int>]
//                 1,3
//                 2,5
//   score table   0,40
//                 1,41
//                 ...
//
// Response codes are 1-based everywhere in the public interface. All types are
// immutable after construction; a constructed value always satisfies its
// invariants.

#ifndef CROWDIQ_CORE_HPP_
#define CROWDIQ_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crowdiq {

inline constexpr int kDefaultItems = 60;
inline constexpr int kDefaultChoices = 8;
inline constexpr int kMaxChoices = 255;

// A single 1-based response code.
class ResponseCode {
 public:
  constexpr explicit ResponseCode(int value) : value_(value) {}
  constexpr int value() const { return value_; }
  constexpr bool valid_for(int k) const { return value_ >= 1 && value_ <= k; }
  friend constexpr bool operator==(ResponseCode, ResponseCode) = default;

 private:
  int value_;
};

// n participants x m items, codes in 1..k.
class ResponseMatrix {
 public:
  // Throws ValidationError (location = "row r, column c") or InvalidArgument.
  // `codes` is row-major, n*m entries.
  static ResponseMatrix create(std::vector<std::string> participant_ids, int m,
                               int k, std::span<const int> codes);

  std::size_t n() const { return ids_.size(); }
  int m() const { return m_; }
  int k() const { return k_; }

  int at(std::size_t participant, int item) const {
    return codes_[participant * static_cast<std::size_t>(m_) +
                  static_cast<std::size_t>(item)];
  }
  ResponseCode code(std::size_t participant, int item) const {
    return ResponseCode(at(participant, item));
  }
  std::span<const std::uint8_t> row(std::size_t participant) const {
    return {codes_.data() + participant * static_cast<std::size_t>(m_),
            static_cast<std::size_t>(m_)};
  }
  const std::string& participant_id(std::size_t participant) const {
    return ids_[participant];
  }
  const std::vector<std::string>& participant_ids() const { return ids_; }

  // Rows in the given order. Throws InvalidArgument on out-of-range or empty.
  ResponseMatrix select(std::span<const std::size_t> rows) const;

  friend bool operator==(const ResponseMatrix&, const ResponseMatrix&) = default;

 private:
  ResponseMatrix() = default;

  std::vector<std::string> ids_;
  int m_ = 0;
  int k_ = 0;
  std::vector<std::uint8_t> codes_;
};

// A sequence of m codes in 1..k. Base for answer keys and filled
// questionnaires, which share representation but not meaning.
class CodeSequence {
 public:
  int m() const { return static_cast<int>(codes_.size()); }
  int k() const { return k_; }
  int operator[](int item) const { return codes_[static_cast<std::size_t>(item)]; }
  std::span<const std::uint8_t> codes() const { return codes_; }

  friend bool operator==(const CodeSequence&, const CodeSequence&) = default;

 protected:
  CodeSequence(int k, std::span<const int> codes, const char* what);
  CodeSequence(int k, std::vector<std::uint8_t> codes)
      : k_(k), codes_(std::move(codes)) {}

 private:
  int k_ = 0;
  std::vector<std::uint8_t> codes_;
};

// The correct response per item.
class AnswerKey : public CodeSequence {
 public:
  AnswerKey(int k, std::span<const int> codes)
      : CodeSequence(k, codes, "answer key") {}
  friend bool operator==(const AnswerKey&, const AnswerKey&) = default;

 private:
  friend class FilledQuestionnaire;
  AnswerKey(int k, std::vector<std::uint8_t> codes)
      : CodeSequence(k, std::move(codes)) {}
};

// One questionnaire: a participant's row or an aggregator's output.
class FilledQuestionnaire : public CodeSequence {
 public:
  FilledQuestionnaire(int k, std::span<const int> codes)
      : CodeSequence(k, codes, "questionnaire") {}
  static FilledQuestionnaire from_row(const ResponseMatrix& matrix,
                                      std::size_t participant);
  friend bool operator==(const FilledQuestionnaire&,
                         const FilledQuestionnaire&) = default;

 private:
  friend class ResponseMatrix;
  FilledQuestionnaire(int k, std::vector<std::uint8_t> codes)
      : CodeSequence(k, std::move(codes)) {}
};

// Monotone raw score -> IQ table over raw in 0..m.
class ScoreTable {
 public:
  // Throws ValidationError("raw r: ...") on non-monotone input.
  explicit ScoreTable(std::vector<int> iq_of_raw);

  int m() const { return static_cast<int>(iq_.size()) - 1; }
  int iq(int raw) const;
  std::span<const int> values() const { return iq_; }

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  std::vector<int> iq_;
};

// Distinct participant indices into a ResponseMatrix, in caller order.
class Crowd {
 public:
  // Throws InvalidArgument on duplicates or indices >= n.
  Crowd(std::vector<std::size_t> members, std::size_t n);
  static Crowd everyone(std::size_t n);

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::span<const std::size_t> members() const { return members_; }
  std::size_t operator[](std::size_t i) const { return members_[i]; }

 private:
  std::vector<std::size_t> members_;
};

// Text formats. Parsers throw ValidationError carrying a location.
ResponseMatrix parse_responses(std::string_view text);
std::string serialize_responses(const ResponseMatrix& matrix);
// Directive and header lines only; what a zero-row subsample serializes to.
std::string serialize_response_header(int m, int k);

// `k` is used when the text carries no `#k=` directive; both present and
// different is an error.
AnswerKey parse_answer_key(std::string_view text, std::optional<int> k);
std::string serialize_answer_key(const CodeSequence& codes);
FilledQuestionnaire parse_questionnaire(std::string_view text,
                                        std::optional<int> k);

// `m`, when given, is the required highest raw score.
ScoreTable parse_score_table(std::string_view text,
                             std::optional<int> m = std::nullopt);
std::string serialize_score_table(const ScoreTable& table);

}  // namespace crowdiq

#endif  // CROWDIQ_CORE_HPP_
