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

// crowdiq command line tool. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 usage error, 2 data or validation error.
// Every subcommand computes all of its outputs before writing any file.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "crowdiq/crowdiq.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Thrown for bad flag values detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for unreadable files and failed library calls.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Responses = std::unique_ptr<ciq_responses, Deleter<ciq_responses, ciq_responses_free>>;
using Codes = std::unique_ptr<ciq_codes, Deleter<ciq_codes, ciq_codes_free>>;
using Table = std::unique_ptr<ciq_score_table, Deleter<ciq_score_table, ciq_score_table_free>>;
using Aggregation = std::unique_ptr<ciq_aggregation, Deleter<ciq_aggregation, ciq_aggregation_free>>;
using Report = std::unique_ptr<ciq_shapley_report, Deleter<ciq_shapley_report, ciq_shapley_report_free>>;

void check(ciq_status status, const std::string& context) {
  if (status != CIQ_OK) throw DataError(context + ": " + ciq_last_error());
}

std::string take_string(char* text) {
  std::string out(text);
  ciq_string_free(text);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Outputs are staged and flushed together once everything succeeded.
class Outputs {
 public:
  void add(std::string path, std::string text) {
    staged_.emplace_back(std::move(path), std::move(text));
  }
  void commit() const {
    for (const auto& [path, text] : staged_) {
      if (path.empty() || path == "-") {
        std::cout << text;
        continue;
      }
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError(path + ": cannot write file");
      out << text;
      if (!out) throw DataError(path + ": write failed");
    }
    std::cout.flush();
  }

 private:
  std::vector<std::pair<std::string, std::string>> staged_;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

double to_double(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double value = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return value;
  } catch (const std::exception&) {
    throw UsageError(flag + ": expected a number, got '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return value;
  } catch (const std::exception&) {
    throw UsageError(flag + ": expected an integer, got '" + s + "'");
  }
}

std::pair<double, double> number_pair(const std::string& s, const std::string& flag) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw UsageError(flag + ": expected A,B, got '" + s + "'");
  return {to_double(parts[0], flag), to_double(parts[1], flag)};
}

ciq_method parse_method(const std::string& s, const std::string& flag) {
  if (s == "maj") return CIQ_METHOD_MAJ;
  if (s == "ml") return CIQ_METHOD_ML;
  throw UsageError(flag + ": expected maj or ml, got '" + s + "'");
}

bool has_k_directive(const std::string& text) {
  return text.rfind("#k=", 0) == 0 || text.find("\n#k=") != std::string::npos;
}

// ---- Shared option groups -------------------------------------------------

struct MlOptions {
  double tolerance = 1e-8;
  int max_iterations = 500;
  std::string prior = "1,1";

  void attach(CLI::App* app) {
    app->add_option("--ml-tol", tolerance, "EM convergence tolerance")->capture_default_str();
    app->add_option("--ml-max-iters", max_iterations, "EM iteration cap")->capture_default_str();
    app->add_option("--ml-prior", prior, "Beta prior on aptitudes, A,B")->capture_default_str();
  }
  ciq_ml_settings settings() const {
    ciq_ml_settings s;
    ciq_ml_settings_init(&s);
    const auto [a, b] = number_pair(prior, "--ml-prior");
    s.prior_alpha = a;
    s.prior_beta = b;
    s.tolerance = tolerance;
    s.max_iterations = max_iterations;
    return s;
  }
};

struct TableOptions {
  std::string table_path;
  double mean_raw = 36.04;
  double sd_raw = 5.49;
  std::string clamp = "40,160";

  void attach(CLI::App* app) {
    auto* table = app->add_option("--table", table_path, "Score table file (raw,iq)");
    auto* mean = app->add_option("--mean-raw", mean_raw, "Default table: reference mean raw score")
                     ->capture_default_str();
    auto* sd = app->add_option("--sd-raw", sd_raw, "Default table: reference raw score sd")
                   ->capture_default_str();
    auto* cl = app->add_option("--clamp", clamp, "Default table: IQ clamp L,H")->capture_default_str();
    table->excludes(mean)->excludes(sd)->excludes(cl);
  }
  Table load(int m) const {
    ciq_score_table* out = nullptr;
    if (!table_path.empty()) {
      const auto text = read_file(table_path);
      check(ciq_score_table_parse(text.data(), text.size(), m, &out), table_path);
    } else {
      const auto [low, high] = number_pair(clamp, "--clamp");
      if (low != static_cast<int>(low) || high != static_cast<int>(high)) {
        throw UsageError("--clamp: bounds must be integers");
      }
      check(ciq_score_table_default(m, mean_raw, sd_raw, static_cast<int>(low),
                                    static_cast<int>(high), &out),
            "default score table");
    }
    return Table(out);
  }
};

struct InputOptions {
  std::string responses_path;
  std::string key_path;
  int k = 0;

  void attach(CLI::App* app, bool with_responses) {
    if (with_responses) {
      app->add_option("--responses", responses_path, "Responses file")->required();
    }
    app->add_option("--key", key_path, "Answer key file")->required();
    app->add_option("--k", k, "Choices per item for key files without a #k directive (default 8)");
  }
  Responses responses() const {
    const auto text = read_file(responses_path);
    ciq_responses* out = nullptr;
    check(ciq_responses_parse(text.data(), text.size(), &out), responses_path);
    return Responses(out);
  }
  Codes codes(const std::string& path, int fallback_k) const {
    const auto text = read_file(path);
    int k_arg = k;
    if (k_arg == 0 && !has_k_directive(text)) k_arg = fallback_k;
    ciq_codes* out = nullptr;
    check(ciq_codes_parse(text.data(), text.size(), k_arg, &out), path);
    return Codes(out);
  }
};

// ---- Subcommands ----------------------------------------------------------

struct GenerateCommand {
  int n = 0;
  int m = 60;
  int k = 8;
  std::string aptitude = "beta:1,1";
  std::uint64_t seed = 0;
  std::string out_responses;
  std::string out_key;
  std::string out_aptitudes;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "Participants")->required();
    app->add_option("--m", m, "Items")->capture_default_str();
    app->add_option("--k", k, "Choices per item")->capture_default_str();
    app->add_option("--aptitude", aptitude, "fixed:G | beta:A,B")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--out-responses", out_responses, "Responses output file")->required();
    app->add_option("--out-key", out_key, "Answer key output file")->required();
    app->add_option("--out-aptitudes", out_aptitudes, "Optional true aptitudes output (participant_id,aptitude)");
  }

  void run(Outputs& outputs) const {
    ciq_synth_config config;
    ciq_synth_config_init(&config);
    config.n = n;
    config.m = m;
    config.k = k;
    config.seed = seed;
    if (aptitude.rfind("fixed:", 0) == 0) {
      config.aptitude = CIQ_APTITUDE_FIXED;
      config.fixed_g = to_double(aptitude.substr(6), "--aptitude");
    } else if (aptitude.rfind("beta:", 0) == 0) {
      config.aptitude = CIQ_APTITUDE_BETA;
      std::tie(config.alpha, config.beta) = number_pair(aptitude.substr(5), "--aptitude");
    } else {
      throw UsageError("--aptitude: expected fixed:G or beta:A,B, got '" + aptitude + "'");
    }
    if (n < 1) throw UsageError("--n: must be >= 1");
    ciq_responses* responses_raw = nullptr;
    ciq_codes* key_raw = nullptr;
    std::vector<double> aptitudes(static_cast<std::size_t>(n));
    check(ciq_generate(&config, &responses_raw, &key_raw, aptitudes.data()), "generate");
    const Responses responses(responses_raw);
    const Codes key(key_raw);
    char* text = nullptr;
    check(ciq_responses_serialize(responses.get(), &text), "serialize responses");
    outputs.add(out_responses, take_string(text));
    check(ciq_codes_serialize(key.get(), &text), "serialize key");
    outputs.add(out_key, take_string(text));
    if (!out_aptitudes.empty()) {
      std::string table = "participant_id,aptitude\n";
      for (std::size_t i = 0; i < aptitudes.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.9f", aptitudes[i]);
        table += std::string(ciq_responses_id(responses.get(), i)) + "," + buf + "\n";
      }
      outputs.add(out_aptitudes, table);
    }
  }
};

struct AggregateCommand {
  std::string responses_path;
  std::string method = "maj";
  MlOptions ml;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--responses", responses_path, "Responses file")->required();
    app->add_option("--method", method, "maj | ml")->capture_default_str();
    ml.attach(app);
    app->add_option("--out", out, "Aggregated questionnaire output (default: stdout)");
  }

  void run(Outputs& outputs) const {
    const auto which = parse_method(method, "--method");
    const auto settings = ml.settings();
    const auto text = read_file(responses_path);
    ciq_responses* raw = nullptr;
    check(ciq_responses_parse(text.data(), text.size(), &raw), responses_path);
    const Responses responses(raw);
    ciq_aggregation* agg_raw = nullptr;
    check(ciq_aggregate(responses.get(), nullptr, 0, which, &settings, &agg_raw), "aggregate");
    const Aggregation aggregation(agg_raw);
    ciq_codes* answers_raw = nullptr;
    check(ciq_aggregation_answers(aggregation.get(), &answers_raw), "aggregate");
    const Codes answers(answers_raw);
    char* serialized = nullptr;
    check(ciq_codes_serialize(answers.get(), &serialized), "serialize answers");
    outputs.add(out, take_string(serialized));
  }
};

struct ScoreCommand {
  std::string answers_path;
  InputOptions input;
  TableOptions table;

  void attach(CLI::App* app) {
    app->add_option("--answers", answers_path, "Filled questionnaire (item_index,code)")->required();
    input.attach(app, false);
    table.attach(app);
  }

  void run(Outputs& outputs) const {
    const auto key = input.codes(input.key_path, 8);
    const auto answers = input.codes(answers_path, ciq_codes_k(key.get()));
    const auto scores = table.load(ciq_codes_m(key.get()));
    int raw = 0;
    int iq = 0;
    check(ciq_score(answers.get(), key.get(), scores.get(), &raw, &iq), "score");
    outputs.add("-", "raw=" + std::to_string(raw) + " iq=" + std::to_string(iq) + "\n");
  }
};

struct ShapleyOptions {
  std::string method = "mc";
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::size_t max_exact = 12;

  void attach(CLI::App* app) {
    app->add_option("--method", method, "exact | mc")->capture_default_str();
    app->add_option("--samples", samples, "Sampled permutations (mc)")->capture_default_str();
    app->add_option("--seed", seed, "Random seed (mc)")->capture_default_str();
    app->add_option("--max-exact", max_exact, "Player cap for exact enumeration")->capture_default_str();
  }
  ciq_shapley_settings settings() const {
    ciq_shapley_settings s;
    ciq_shapley_settings_init(&s);
    if (method == "exact") {
      s.monte_carlo = 0;
    } else if (method == "mc") {
      s.monte_carlo = 1;
    } else {
      throw UsageError("--method: expected exact or mc, got '" + method + "'");
    }
    s.samples = samples;
    s.seed = seed;
    s.max_exact_players = max_exact;
    return s;
  }
};

struct ShapleyCommand {
  InputOptions input;
  TableOptions table;
  ShapleyOptions shapley;
  std::string aggregator = "maj";
  MlOptions ml;
  std::string out;

  void attach(CLI::App* app) {
    input.attach(app, true);
    table.attach(app);
    shapley.attach(app);
    app->add_option("--aggregator", aggregator, "maj | ml")->capture_default_str();
    ml.attach(app);
    app->add_option("--out", out, "Report output (default: stdout)");
  }

  void run(Outputs& outputs) const {
    const auto which = parse_method(aggregator, "--aggregator");
    const auto s = shapley.settings();
    const auto settings = ml.settings();
    const auto responses = input.responses();
    const auto key = input.codes(input.key_path, ciq_responses_k(responses.get()));
    const auto scores = table.load(ciq_responses_m(responses.get()));
    ciq_shapley_report* raw = nullptr;
    check(ciq_contextual_iq(responses.get(), key.get(), scores.get(), which, &settings, &s, &raw),
          "shapley");
    const Report report(raw);
    const std::string meta = std::string("aggregator=") + (which == CIQ_METHOD_MAJ ? "MAJ" : "ML");
    char* text = nullptr;
    check(ciq_shapley_report_serialize(report.get(), responses.get(), meta.c_str(), &text),
          "serialize report");
    outputs.add(out, take_string(text));
  }
};

struct CrowdSizeCommand {
  InputOptions input;
  TableOptions table;
  std::string sizes;
  int max_size = 0;
  int crowds = 300;
  std::uint64_t seed = 0;
  std::string aggregators = "maj,ml";
  MlOptions ml;
  std::string out;

  void attach(CLI::App* app) {
    input.attach(app, true);
    table.attach(app);
    auto* s = app->add_option("--sizes", sizes, "Comma separated crowd sizes");
    auto* mx = app->add_option("--max-size", max_size, "Sweep sizes 1..N");
    s->excludes(mx);
    app->add_option("--crowds", crowds, "Random crowds per size")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--aggregators", aggregators, "Subset of maj,ml")->capture_default_str();
    ml.attach(app);
    app->add_option("--out", out, "CSV output (default: stdout)");
  }

  void run(Outputs& outputs) const {
    std::vector<int> size_list;
    if (!sizes.empty()) {
      for (const auto& part : split(sizes, ',')) size_list.push_back(to_int(part, "--sizes"));
    } else if (max_size > 0) {
      for (int s = 1; s <= max_size; ++s) size_list.push_back(s);
    } else {
      throw UsageError("crowd-size: one of --sizes or --max-size is required");
    }
    ciq_sweep_config config{};
    for (const auto& a : split(aggregators, ',')) {
      (parse_method(a, "--aggregators") == CIQ_METHOD_MAJ ? config.use_maj : config.use_ml) = 1;
    }
    const auto settings = ml.settings();
    const auto responses = input.responses();
    const auto key = input.codes(input.key_path, ciq_responses_k(responses.get()));
    const auto scores = table.load(ciq_responses_m(responses.get()));
    config.sizes = size_list.data();
    config.size_count = size_list.size();
    config.crowds_per_size = crowds;
    config.seed = seed;
    char* csv = nullptr;
    check(ciq_experiment_crowd_size(responses.get(), key.get(), scores.get(), &config, &settings,
                                    &csv),
          "crowd-size");
    outputs.add(out, take_string(csv));
  }
};

struct BandCommand {
  InputOptions input;
  TableOptions table;
  int low = 0;
  int high = 0;
  std::string out;

  void attach(CLI::App* app) {
    input.attach(app, true);
    table.attach(app);
    app->add_option("--low", low, "Lowest individual IQ kept (inclusive)")->required();
    app->add_option("--high", high, "Highest individual IQ kept (inclusive)")->required();
    app->add_option("--out", out, "Responses output (default: stdout)");
  }

  void run(Outputs& outputs) const {
    const auto responses = input.responses();
    const auto key = input.codes(input.key_path, ciq_responses_k(responses.get()));
    const auto scores = table.load(ciq_responses_m(responses.get()));
    char* text = nullptr;
    std::size_t retained = 0;
    check(ciq_experiment_band(responses.get(), key.get(), scores.get(), low, high, &text,
                              &retained),
          "band");
    std::cerr << "retained " << retained << " of " << ciq_responses_n(responses.get())
              << " participants\n";
    outputs.add(out, take_string(text));
  }
};

struct ContextualCommand {
  InputOptions input;
  TableOptions table;
  ShapleyOptions shapley;
  MlOptions ml;
  std::string out;

  void attach(CLI::App* app) {
    input.attach(app, true);
    table.attach(app);
    shapley.attach(app);
    ml.attach(app);
    app->add_option("--out", out, "CSV output (default: stdout)");
  }

  void run(Outputs& outputs) const {
    const auto s = shapley.settings();
    const auto settings = ml.settings();
    const auto responses = input.responses();
    const auto key = input.codes(input.key_path, ciq_responses_k(responses.get()));
    const auto scores = table.load(ciq_responses_m(responses.get()));
    char* csv = nullptr;
    check(ciq_experiment_contextual(responses.get(), key.get(), scores.get(), &s, &settings,
                                    &csv),
          "contextual");
    outputs.add(out, take_string(csv));
  }
};

std::optional<unsigned> threads_from_env() {
  const char* env = std::getenv("CROWDIQ_THREADS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  const int value = to_int(env, "CROWDIQ_THREADS");
  if (value < 0) throw UsageError("CROWDIQ_THREADS: must be >= 0");
  return static_cast<unsigned>(value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowdiq: crowd questionnaire aggregation, IQ scoring and contextual IQ"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = -1;
  app.add_option("--threads", threads, "Worker threads (0 = all cores; default: $CROWDIQ_THREADS or 0)");

  GenerateCommand generate;
  AggregateCommand aggregate;
  ScoreCommand score;
  ShapleyCommand shapley;
  CrowdSizeCommand crowd_size;
  BandCommand band;
  ContextualCommand contextual;

  generate.attach(app.add_subcommand("generate", "Generate synthetic responses and a key"));
  aggregate.attach(app.add_subcommand("aggregate", "Aggregate all participants' responses"));
  score.attach(app.add_subcommand("score", "Score a questionnaire against a key"));
  shapley.attach(app.add_subcommand("shapley", "Contextual IQ (Shapley values) per participant"));
  auto* experiment = app.add_subcommand("experiment", "Study protocols");
  experiment->require_subcommand(1);
  crowd_size.attach(experiment->add_subcommand("crowd-size", "Crowd IQ against crowd size"));
  band.attach(experiment->add_subcommand("band", "Participants within an IQ band"));
  contextual.attach(
      experiment->add_subcommand("contextual", "Contextual IQ under MAJ and ML, with correlations"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (threads >= 0) {
      ciq_set_threads(static_cast<unsigned>(threads));
    } else if (const auto env = threads_from_env()) {
      ciq_set_threads(*env);
    }
    Outputs outputs;
    auto* chosen = app.get_subcommands().front();
    if (chosen->get_name() == "generate") {
      generate.run(outputs);
    } else if (chosen->get_name() == "aggregate") {
      aggregate.run(outputs);
    } else if (chosen->get_name() == "score") {
      score.run(outputs);
    } else if (chosen->get_name() == "shapley") {
      shapley.run(outputs);
    } else {
      const auto name = experiment->get_subcommands().front()->get_name();
      if (name == "crowd-size") {
        crowd_size.run(outputs);
      } else if (name == "band") {
        band.run(outputs);
      } else {
        contextual.run(outputs);
      }
    }
    outputs.commit();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
