#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bechdel {

struct RunConfig {
  // Inputs.
  std::string messages;
  std::string profiles;
  std::string names;
  std::vector<std::string> stoplists;
  std::string male_words;
  std::string female_words;
  std::string mother_words;
  std::string father_words;
  std::string student_words;
  std::vector<std::string> scripts;  // files or directories
  std::string cast;
  std::string movies;
  std::string shares;
  std::string states;
  std::string cities;
  std::string aliases;
  std::vector<std::string> dialogues;
  std::string script_dialogues;
  std::vector<std::string> cohorts;

  // Thresholds.
  std::int64_t min_mentions = 10;
  std::uint64_t min_aligned = 50;
  std::size_t min_ego_dialogues = 25;
  std::size_t sample_size = 225;
  std::size_t n_samples = 1000;
  double ratio = 5.0;
  double t_min = 1.0;
  std::size_t min_gaps = 50;
  std::optional<double> tau_seconds;
  bool per_pair = false;
  std::string mention_rule = "sum";
  bool exclude_unknown_pairs = false;
  bool infer_cast = false;
  bool speaking_only = false;

  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir = "out";
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitMissingInput = 2;
inline constexpr int kExitInvalid = 3;

// Throws IngestError(kMissing) for absent inputs and Error for bad thresholds.
void validate(const RunConfig& config);

void cmd_parse_scripts(const RunConfig& config, std::ostream& out);
void cmd_segment(const RunConfig& config, std::ostream& out);
void cmd_score(const RunConfig& config, std::ostream& out);
void cmd_compare(const RunConfig& config, std::ostream& out);
void cmd_report(const RunConfig& config, std::ostream& out);

// Parses arguments (argv[0] included), runs the subcommand and maps errors to
// exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bechdel
