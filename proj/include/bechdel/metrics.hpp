#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bechdel/core.hpp"
#include "bechdel/gender.hpp"

namespace bechdel {

enum class Origin { kMovie, kStream };
std::string_view to_string(Origin o);

// One dialogue between two participants: the genders of both ends and whether
// the dialogue text references males (m) and females (f).
struct Dialogue {
  Gender g1 = Gender::kUnknown;
  Gender g2 = Gender::kUnknown;
  bool m = false;
  bool f = false;
  std::pair<std::string, std::string> participants;
  std::vector<std::string> source_ids;
  Origin origin = Origin::kStream;
  std::string unit;  // movie id, or empty for stream data

  bool operator==(const Dialogue&) const = default;
};

// Builds a dialogue whose (m, f) flags come from reference detection over the
// concatenation of `texts`.
Dialogue make_dialogue(Gender g1, Gender g2, std::pair<std::string, std::string> participants,
                       std::vector<std::string> source_ids, Origin origin, std::string unit,
                       const std::vector<std::string_view>& texts, const ReferenceLexicon& lex);

// Swaps M<->F on both genders and the reference flags.
Dialogue swap_genders(Dialogue d);

// A selection D(g1, g2, m, f); nullopt components are the wildcard '*'.
struct Pattern {
  std::optional<Gender> g1;
  std::optional<Gender> g2;
  std::optional<bool> m;
  std::optional<bool> f;
  // When set, (g1, g2) also matches dialogues stored as (g2, g1).
  bool unordered = false;

  // Parses "F,F,0,*" style text (four comma separated symbols).
  static Pattern parse(std::string_view s);
  bool matches(Gender a, Gender b, bool m, bool f) const;
};

class DialogueSet {
 public:
  static constexpr std::size_t kCells = 3 * 3 * 2 * 2;
  using Counts = std::array<std::uint64_t, kCells>;

  DialogueSet() { counts_.fill(0); }
  explicit DialogueSet(std::vector<Dialogue> dialogues, std::string label = "");

  const std::vector<Dialogue>& dialogues() const { return dialogues_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return dialogues_.size(); }
  bool empty() const { return dialogues_.empty(); }
  const Counts& counts() const { return counts_; }

  static std::size_t cell(Gender g1, Gender g2, bool m, bool f);
  static void decode_cell(std::size_t cell, Gender& g1, Gender& g2, bool& m, bool& f);

 private:
  std::vector<Dialogue> dialogues_;
  std::string label_;
  Counts counts_;
};

std::uint64_t select_count(const DialogueSet& ds, const Pattern& p);

// numerator / denominator, or undefined with a reason. Carries a Wilson
// interval at the level it was computed with.
struct RatioMetric {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 0;
  bool defined = false;
  std::string reason;
  double ci_low = 0.0;
  double ci_high = 0.0;

  double value() const;  // NaN when undefined
  static RatioMetric of(std::uint64_t num, std::uint64_t den, double level = 0.95);
  static RatioMetric undefined(std::uint64_t num, std::uint64_t den, std::string reason);
};

struct ScorePair {
  RatioMetric female;
  RatioMetric male;
};

struct IndependenceResult {
  RatioMetric female;
  RatioMetric male;
  std::optional<double> asymmetry;  // I_M - I_F when both defined
};

// B_F = |D(F,F,0,*)| / |D|, B_M = |D(M,M,*,0)| / |D|. With
// include_unknown_pairs == false, dialogues with both genders U are left out
// of |D|.
ScorePair bechdel_scores(const DialogueSet& ds, bool include_unknown_pairs = true);
// X_F = |D(F,M) u D(M,F)| / |D(F,*) u D(*,F)|, X_M = |D(M,M)| / |D(M,*) u D(*,M)|.
ScorePair dialogue_imbalance(const DialogueSet& ds);
// I_F = |D(F,F,0,*)| / |D(F,F,*,*)|, I_M = |D(M,M,*,0)| / |D(M,M,*,*)|; a
// gender with fewer than min_aligned aligned dialogues is undefined.
IndependenceResult gender_independence(const DialogueSet& ds, std::uint64_t min_aligned = 50);

struct MetricReport {
  std::string label;
  std::uint64_t total = 0;
  DialogueSet::Counts counts{};
  RatioMetric bechdel_female;
  RatioMetric bechdel_male;
  RatioMetric imbalance_female;
  RatioMetric imbalance_male;
  RatioMetric independence_female;
  RatioMetric independence_male;
  std::optional<double> asymmetry;
  std::uint64_t min_aligned = 50;
};

MetricReport compute_report(const DialogueSet& ds, std::uint64_t min_aligned = 50,
                            std::string label = "", bool include_unknown_pairs = true);

nlohmann::ordered_json to_json(const RatioMetric& r);
nlohmann::ordered_json to_json(const MetricReport& r);
std::vector<std::string> report_csv_header();
std::vector<std::string> report_csv_row(const MetricReport& r);

// Fixed six-decimal rendering, "NA" for undefined values.
std::string format_number(double v);
std::string format_ratio(const RatioMetric& r);
// JSON number rounded to 10 significant digits (null when not finite), so
// reports do not depend on last-bit differences between math libraries.
nlohmann::ordered_json json_number(double v);

// Dialogue files: one JSON object per line.
nlohmann::ordered_json to_json(const Dialogue& d);
std::string dialogue_to_json_line(const Dialogue& d);
struct DialogueReadResult {
  std::vector<Dialogue> dialogues;
  std::size_t malformed = 0;
};
DialogueReadResult parse_dialogues(std::string_view text);
DialogueReadResult read_dialogues(const std::string& path);
void write_dialogues(const std::string& path, const std::vector<Dialogue>& dialogues);

}  // namespace bechdel
