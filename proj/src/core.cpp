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

#include "crowdiq/core.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <string>
#include <unordered_set>
#include <utility>

#include "crowdiq/error.hpp"

namespace crowdiq {

namespace {

struct Line {
  int number;  // 1-based
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits on LF, tolerating a trailing CR and a missing final newline. Blank
// lines are dropped.
std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto stop = end == std::string_view::npos ? text.size() : end;
    ++number;
    const auto line = trim(text.substr(pos, stop - pos));
    if (!line.empty()) lines.push_back({number, line});
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(pos)));
      break;
    }
    fields.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return fields;
}

std::optional<long long> to_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return value;
}

std::string at_line(int line) { return "line " + std::to_string(line); }

std::string at_cell(int line, std::string_view column) {
  return "line " + std::to_string(line) + ", column " + std::string(column);
}

void check_k(int k) {
  if (k < 2 || k > kMaxChoices) {
    throw InvalidArgument("choices per item k must be in 2.." +
                          std::to_string(kMaxChoices) + ", got " +
                          std::to_string(k));
  }
}

// Parses a `#k=<int>` directive; returns nullopt for other comments.
std::optional<int> parse_k_directive(const Line& line) {
  constexpr std::string_view prefix = "#k=";
  if (!line.text.starts_with(prefix)) return std::nullopt;
  const auto value = to_integer(trim(line.text.substr(prefix.size())));
  if (!value || *value < 2 || *value > kMaxChoices) {
    throw ValidationError(at_line(line.number),
                          "invalid #k directive '" + std::string(line.text) +
                              "' (expected an integer in 2.." +
                              std::to_string(kMaxChoices) + ")");
  }
  return static_cast<int>(*value);
}

std::string out_of_range(long long code, int k) {
  return "code out of range (" + std::to_string(code) + " not in 1.." +
         std::to_string(k) + ")";
}

// Shared reader for the `item_index,code` format.
std::pair<int, std::vector<int>> parse_code_lines(std::string_view text,
                                                  std::optional<int> k_arg,
                                                  const char* what) {
  const auto lines = split_lines(text);
  std::optional<int> k_directive;
  std::map<long long, std::pair<int, long long>> items;  // item -> (line, code)
  for (const auto& line : lines) {
    if (line.text.front() == '#') {
      if (auto k = parse_k_directive(line)) {
        if (k_directive) {
          throw ValidationError(at_line(line.number), "duplicate #k directive");
        }
        k_directive = k;
      }
      continue;
    }
    const auto fields = split_fields(line.text);
    if (fields.size() != 2) {
      throw ValidationError(at_line(line.number),
                            "expected 'item_index,code', found " +
                                std::to_string(fields.size()) + " fields");
    }
    const auto item = to_integer(fields[0]);
    if (!item || *item < 1) {
      throw ValidationError(at_cell(line.number, "1"),
                            "invalid item index '" + std::string(fields[0]) + "'");
    }
    const auto code = to_integer(fields[1]);
    if (!code) {
      throw ValidationError(at_cell(line.number, "2"),
                            "invalid code '" + std::string(fields[1]) + "'");
    }
    if (!items.emplace(*item, std::pair{line.number, *code}).second) {
      throw ValidationError(at_line(line.number),
                            "duplicate item index " + std::to_string(*item));
    }
  }
  if (k_directive && k_arg && *k_directive != *k_arg) {
    throw ValidationError("line 1", "#k directive " +
                                        std::to_string(*k_directive) +
                                        " conflicts with expected k=" +
                                        std::to_string(*k_arg));
  }
  const auto k = k_directive ? k_directive : k_arg;
  if (!k) throw ValidationError("line 1", "missing #k directive");
  check_k(*k);
  if (items.empty()) {
    throw ValidationError("line 1", std::string("empty ") + what);
  }
  std::vector<int> codes;
  long long expected = 1;
  for (const auto& [item, entry] : items) {
    if (item != expected) {
      throw ValidationError("item " + std::to_string(expected),
                            "non-contiguous items (item " +
                                std::to_string(expected) + " missing)");
    }
    const auto [line, code] = entry;
    if (code < 1 || code > *k) {
      throw ValidationError(at_cell(line, "2"), out_of_range(code, *k));
    }
    codes.push_back(static_cast<int>(code));
    ++expected;
  }
  return {*k, std::move(codes)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Types

ResponseMatrix ResponseMatrix::create(std::vector<std::string> participant_ids,
                                      int m, int k,
                                      std::span<const int> codes) {
  check_k(k);
  if (m < 1) throw InvalidArgument("item count m must be >= 1");
  if (participant_ids.empty()) {
    throw InvalidArgument("a response matrix needs at least one participant");
  }
  const auto n = participant_ids.size();
  if (codes.size() != n * static_cast<std::size_t>(m)) {
    throw InvalidArgument("expected " + std::to_string(n * m) +
                          " codes, got " + std::to_string(codes.size()));
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (participant_ids[i].empty()) {
      throw ValidationError("row " + std::to_string(i + 1),
                            "empty participant id");
    }
    if (!seen.insert(participant_ids[i]).second) {
      throw ValidationError("row " + std::to_string(i + 1),
                            "duplicate participant id '" + participant_ids[i] +
                                "'");
    }
  }
  ResponseMatrix matrix;
  matrix.codes_.reserve(codes.size());
  for (std::size_t idx = 0; idx < codes.size(); ++idx) {
    if (codes[idx] < 1 || codes[idx] > k) {
      throw ValidationError(
          "row " + std::to_string(idx / m + 1) + ", column q" +
              std::to_string(idx % m + 1),
          out_of_range(codes[idx], k));
    }
    matrix.codes_.push_back(static_cast<std::uint8_t>(codes[idx]));
  }
  matrix.ids_ = std::move(participant_ids);
  matrix.m_ = m;
  matrix.k_ = k;
  return matrix;
}

ResponseMatrix ResponseMatrix::select(std::span<const std::size_t> rows) const {
  if (rows.empty()) throw InvalidArgument("cannot select zero participants");
  ResponseMatrix out;
  out.m_ = m_;
  out.k_ = k_;
  out.codes_.reserve(rows.size() * static_cast<std::size_t>(m_));
  std::unordered_set<std::size_t> seen;
  for (const auto r : rows) {
    if (r >= n()) {
      throw InvalidArgument("participant index " + std::to_string(r) +
                            " out of range (n=" + std::to_string(n()) + ")");
    }
    if (!seen.insert(r).second) {
      throw InvalidArgument("participant index " + std::to_string(r) +
                            " selected twice");
    }
    out.ids_.push_back(ids_[r]);
    const auto src = row(r);
    out.codes_.insert(out.codes_.end(), src.begin(), src.end());
  }
  return out;
}

CodeSequence::CodeSequence(int k, std::span<const int> codes, const char* what)
    : k_(k) {
  check_k(k);
  if (codes.empty()) {
    throw InvalidArgument(std::string(what) + " must cover at least one item");
  }
  codes_.reserve(codes.size());
  for (std::size_t q = 0; q < codes.size(); ++q) {
    if (codes[q] < 1 || codes[q] > k) {
      throw ValidationError("item " + std::to_string(q + 1),
                            out_of_range(codes[q], k));
    }
    codes_.push_back(static_cast<std::uint8_t>(codes[q]));
  }
}

FilledQuestionnaire FilledQuestionnaire::from_row(const ResponseMatrix& matrix,
                                                  std::size_t participant) {
  const auto row = matrix.row(participant);
  return FilledQuestionnaire(matrix.k(),
                             std::vector<std::uint8_t>(row.begin(), row.end()));
}

ScoreTable::ScoreTable(std::vector<int> iq_of_raw) : iq_(std::move(iq_of_raw)) {
  if (iq_.size() < 2) {
    throw InvalidArgument("a score table needs rows for raw 0..m with m >= 1");
  }
  for (std::size_t r = 1; r < iq_.size(); ++r) {
    if (iq_[r] < iq_[r - 1]) {
      throw ValidationError("raw " + std::to_string(r),
                            "non-monotone (iq " + std::to_string(iq_[r]) +
                                " below iq " + std::to_string(iq_[r - 1]) +
                                " at raw " + std::to_string(r - 1) + ")");
    }
  }
}

int ScoreTable::iq(int raw) const {
  if (raw < 0 || raw > m()) {
    throw InvalidArgument("raw score " + std::to_string(raw) +
                          " outside table range 0.." + std::to_string(m()));
  }
  return iq_[static_cast<std::size_t>(raw)];
}

Crowd::Crowd(std::vector<std::size_t> members, std::size_t n)
    : members_(std::move(members)) {
  std::vector<bool> seen(n, false);
  for (const auto i : members_) {
    if (i >= n) {
      throw InvalidArgument("crowd member " + std::to_string(i) +
                            " out of range (n=" + std::to_string(n) + ")");
    }
    if (seen[i]) {
      throw InvalidArgument("crowd member " + std::to_string(i) +
                            " listed twice");
    }
    seen[i] = true;
  }
}

Crowd Crowd::everyone(std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return Crowd(std::move(all), n);
}

// ---------------------------------------------------------------------------
// Responses

ResponseMatrix parse_responses(std::string_view text) {
  const auto lines = split_lines(text);
  std::optional<int> k;
  std::size_t idx = 0;
  for (; idx < lines.size() && lines[idx].text.front() == '#'; ++idx) {
    if (auto parsed = parse_k_directive(lines[idx])) {
      if (k) throw ValidationError(at_line(lines[idx].number), "duplicate #k directive");
      k = parsed;
    }
  }
  if (idx == lines.size()) {
    const int where = lines.empty() ? 1 : lines.back().number;
    if (!k) throw ValidationError(at_line(where), "missing #k directive");
    throw ValidationError(at_line(where), "missing header row");
  }
  const auto& header_line = lines[idx];
  if (!k) {
    throw ValidationError(at_line(header_line.number),
                          "missing #k directive before the header");
  }
  const auto header = split_fields(header_line.text);
  if (header.front() != "participant_id") {
    throw ValidationError(at_cell(header_line.number, "1"),
                          "header must start with 'participant_id'");
  }
  const int m = static_cast<int>(header.size()) - 1;
  if (m < 1) {
    throw ValidationError(at_line(header_line.number), "header has no item columns");
  }
  // column position -> 0-based item index
  std::vector<int> item_of_column(static_cast<std::size_t>(m));
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (int c = 0; c < m; ++c) {
    const auto name = header[static_cast<std::size_t>(c) + 1];
    const auto item = name.starts_with("q") ? to_integer(name.substr(1)) : std::nullopt;
    if (!item || *item < 1 || *item > m) {
      throw ValidationError(at_cell(header_line.number, std::to_string(c + 2)),
                            "bad item column '" + std::string(name) +
                                "' (expected q1..q" + std::to_string(m) + ")");
    }
    if (seen[static_cast<std::size_t>(*item - 1)]) {
      throw ValidationError(at_cell(header_line.number, std::to_string(c + 2)),
                            "duplicate item column '" + std::string(name) + "'");
    }
    seen[static_cast<std::size_t>(*item - 1)] = true;
    item_of_column[static_cast<std::size_t>(c)] = static_cast<int>(*item - 1);
  }

  std::vector<std::string> ids;
  std::vector<int> codes;
  std::unordered_set<std::string> unique_ids;
  for (++idx; idx < lines.size(); ++idx) {
    const auto& line = lines[idx];
    if (line.text.front() == '#') continue;
    const auto fields = split_fields(line.text);
    if (fields.size() != header.size()) {
      throw ValidationError(at_line(line.number),
                            "ragged row: expected " +
                                std::to_string(header.size()) +
                                " fields, found " + std::to_string(fields.size()));
    }
    const std::string id(fields.front());
    if (id.empty()) {
      throw ValidationError(at_cell(line.number, "participant_id"),
                            "empty participant id");
    }
    if (!unique_ids.insert(id).second) {
      throw ValidationError(at_cell(line.number, "participant_id"),
                            "duplicate participant id '" + id + "'");
    }
    ids.push_back(id);
    const auto base = codes.size();
    codes.resize(base + static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
      const auto field = fields[static_cast<std::size_t>(c) + 1];
      const auto item = item_of_column[static_cast<std::size_t>(c)];
      const auto column = "q" + std::to_string(item + 1);
      const auto value = to_integer(field);
      if (!value) {
        throw ValidationError(at_cell(line.number, column),
                              "invalid integer '" + std::string(field) + "'");
      }
      if (*value < 1 || *value > *k) {
        throw ValidationError(at_cell(line.number, column),
                              out_of_range(*value, *k));
      }
      codes[base + static_cast<std::size_t>(item)] = static_cast<int>(*value);
    }
  }
  if (ids.empty()) {
    throw ValidationError(at_line(header_line.number),
                          "empty body (no participant rows after the header)");
  }
  return ResponseMatrix::create(std::move(ids), m, *k, codes);
}

std::string serialize_response_header(int m, int k) {
  std::string out = "#k=" + std::to_string(k) + "\nparticipant_id";
  for (int q = 1; q <= m; ++q) out += ",q" + std::to_string(q);
  out += '\n';
  return out;
}

std::string serialize_responses(const ResponseMatrix& matrix) {
  std::string out = serialize_response_header(matrix.m(), matrix.k());
  for (std::size_t i = 0; i < matrix.n(); ++i) {
    out += matrix.participant_id(i);
    for (const auto code : matrix.row(i)) {
      out += ',';
      out += std::to_string(code);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Answer keys and questionnaires

AnswerKey parse_answer_key(std::string_view text, std::optional<int> k) {
  auto [choices, codes] = parse_code_lines(text, k, "answer key");
  return AnswerKey(choices, codes);
}

FilledQuestionnaire parse_questionnaire(std::string_view text,
                                        std::optional<int> k) {
  auto [choices, codes] = parse_code_lines(text, k, "questionnaire");
  return FilledQuestionnaire(choices, codes);
}

std::string serialize_answer_key(const CodeSequence& codes) {
  std::string out = "#k=" + std::to_string(codes.k()) + "\n";
  for (int q = 0; q < codes.m(); ++q) {
    out += std::to_string(q + 1) + "," + std::to_string(codes[q]) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score tables

ScoreTable parse_score_table(std::string_view text, std::optional<int> m) {
  const auto lines = split_lines(text);
  std::map<long long, int> rows;
  bool first = true;
  for (const auto& line : lines) {
    if (line.text.front() == '#') continue;
    const auto fields = split_fields(line.text);
    if (first && fields.size() == 2 && fields[0] == "raw" && fields[1] == "iq") {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() != 2) {
      throw ValidationError(at_line(line.number),
                            "expected 'raw,iq', found " +
                                std::to_string(fields.size()) + " fields");
    }
    const auto raw = to_integer(fields[0]);
    if (!raw || *raw < 0) {
      throw ValidationError(at_cell(line.number, "raw"),
                            "invalid raw score '" + std::string(fields[0]) + "'");
    }
    const auto iq = to_integer(fields[1]);
    if (!iq || *iq < -1000000 || *iq > 1000000) {
      throw ValidationError("raw " + std::to_string(*raw),
                            "invalid iq '" + std::string(fields[1]) + "'");
    }
    if (m && *raw > *m) {
      throw ValidationError("raw " + std::to_string(*raw),
                            "raw score above m=" + std::to_string(*m));
    }
    if (!rows.emplace(*raw, static_cast<int>(*iq)).second) {
      throw ValidationError("raw " + std::to_string(*raw),
                            "duplicate raw score " + std::to_string(*raw));
    }
  }
  if (rows.empty()) throw ValidationError("raw 0", "empty score table");
  const long long top = m ? *m : rows.rbegin()->first;
  std::vector<int> values;
  for (long long r = 0; r <= top; ++r) {
    const auto it = rows.find(r);
    if (it == rows.end()) {
      throw ValidationError("raw " + std::to_string(r),
                            "missing raw score " + std::to_string(r));
    }
    values.push_back(it->second);
  }
  return ScoreTable(std::move(values));
}

std::string serialize_score_table(const ScoreTable& table) {
  std::string out;
  const auto values = table.values();
  for (std::size_t r = 0; r < values.size(); ++r) {
    out += std::to_string(r) + "," + std::to_string(values[r]) + "\n";
  }
  return out;
}

}  // namespace crowdiq
