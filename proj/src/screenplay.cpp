#include "bechdel/screenplay.hpp"

#include <algorithm>
#include <set>

#include "bechdel/csv.hpp"
#include "bechdel/text.hpp"

namespace bechdel {

std::size_t ScriptDocument::line_count() const {
  std::size_t n = 0;
  for (const auto& s : scenes) n += s.lines.size();
  return n;
}

std::string normalize_cue(std::string_view cue) {
  std::string s(text::trim(cue));
  if (!s.empty() && s.front() == '@') s.erase(s.begin());
  if (!s.empty() && s.back() == '^') s.pop_back();
  // Drop every parenthetical group.
  std::string out;
  int depth = 0;
  for (char c : s) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth > 0) --depth;
    } else if (depth == 0) {
      out.push_back(c);
    }
  }
  std::string collapsed;
  bool space = false;
  for (char c : text::trim(out)) {
    if (c == ' ' || c == '\t') {
      space = true;
      continue;
    }
    if (space && !collapsed.empty()) collapsed.push_back(' ');
    space = false;
    collapsed.push_back(c);
  }
  return text::to_upper(collapsed);
}

namespace {

// Shooting scripts often prefix headings with a scene number ("12A INT. ...").
std::string_view strip_scene_number(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  if (i == 0) return line;
  while (i < line.size() && ((line[i] >= 'A' && line[i] <= 'Z') || line[i] == '.')) ++i;
  if (i < line.size() && (line[i] == ' ' || line[i] == '\t')) return text::trim(line.substr(i));
  return line;
}

bool is_parenthetical(std::string_view line) {
  return line.size() >= 2 && line.front() == '(' && line.find(')') == line.size() - 1;
}

bool is_cue_line(std::string_view line) {
  if (line.empty()) return false;
  if (line.front() == '@') return normalize_cue(line).size() > 0;
  if (text::has_lowercase(line) || !text::has_letter(line)) return false;
  const std::string cue = normalize_cue(line);
  if (cue.empty() || cue.size() > 40) return false;
  if (!text::has_letter(cue)) return false;
  if (std::count(cue.begin(), cue.end(), ' ') >= 5) return false;
  const char last = cue.back();
  return last != '!' && last != '?' && last != ':';
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto end = s.find('\n', pos);
    if (end == std::string_view::npos) end = s.size();
    auto line = s.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (end == s.size()) break;
    pos = end + 1;
  }
  return out;
}

}  // namespace

bool is_scene_heading(std::string_view line) {
  line = text::trim(line);
  if (line.size() >= 2 && line[0] == '.' && line[1] != '.') return true;
  line = strip_scene_number(line);
  static const std::string_view prefixes[] = {"INT./EXT", "INT/EXT", "EXT./INT", "EXT/INT",
                                              "I/E",      "INT.",    "EXT.",     "EST.",
                                              "INT ",     "EXT ",    "EST "};
  for (auto p : prefixes) {
    if (text::istarts_with(line, p)) return true;
  }
  return false;
}

bool is_transition(std::string_view line) {
  line = text::trim(line);
  if (line.empty()) return false;
  if (line.front() == '>') return line.back() != '<';
  if (text::has_lowercase(line) || !text::has_letter(line)) return false;
  auto ends_with = [&](std::string_view suffix) {
    return line.size() >= suffix.size() && line.substr(line.size() - suffix.size()) == suffix;
  };
  return ends_with("TO:") || text::istarts_with(line, "FADE IN") ||
         text::istarts_with(line, "FADE OUT") || text::istarts_with(line, "FADE TO") ||
         line == "CUT." || line == "CUT:";
}

ScriptDocument parse_script(std::string_view input, std::string title) {
  ScriptDocument doc;
  const auto lines = split_lines(input);
  std::size_t i = 0;

  // Optional title page: "Title: ..." up to the first blank line.
  while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
  if (i < lines.size() && text::istarts_with(text::trim(lines[i]), "title:")) {
    const auto t = text::trim(text::trim(lines[i]).substr(6));
    if (title.empty()) title = std::string(t);
    while (i < lines.size() && !text::trim(lines[i]).empty()) ++i;
  }
  doc.title = std::move(title);

  bool previous_blank = true;
  for (; i < lines.size(); ++i) {
    const auto t = text::trim(lines[i]);
    if (t.empty()) {
      previous_blank = true;
      continue;
    }
    if (is_scene_heading(t) || is_transition(t)) {
      doc.scenes.push_back(Scene{std::string(t), {}});
      previous_blank = false;
      continue;
    }
    if (previous_blank && is_cue_line(t) && i + 1 < lines.size() &&
        !text::trim(lines[i + 1]).empty()) {
      std::string utterance;
      std::size_t j = i + 1;
      for (; j < lines.size(); ++j) {
        const auto d = text::trim(lines[j]);
        if (d.empty()) break;
        if (is_parenthetical(d)) continue;
        if (!utterance.empty()) utterance.push_back(' ');
        utterance += d;
      }
      if (!utterance.empty()) {
        if (doc.scenes.empty()) doc.scenes.push_back(Scene{});
        doc.scenes.back().lines.push_back(ScriptLine{normalize_cue(t), std::move(utterance)});
        i = j - 1;
        previous_blank = false;
        continue;
      }
    }
    previous_blank = false;
  }
  if (doc.line_count() == 0) throw ParseError("not a screenplay: no character lines found");
  return doc;
}

std::string render_script(const ScriptDocument& doc) {
  std::string out;
  if (!doc.title.empty()) out += "Title: " + doc.title + "\n\n";
  for (const auto& scene : doc.scenes) {
    if (!scene.heading.empty()) out += scene.heading + "\n\n";
    for (const auto& line : scene.lines) {
      out += line.character_cue + "\n" + line.utterance + "\n\n";
    }
  }
  return out;
}

DialogueSet build_script_dialogues(const ScriptDocument& doc, const CastGenders& cast,
                                   const ReferenceLexicon& lex,
                                   const ScriptDialogueOptions& options) {
  auto gender_of = [&](const std::string& cue) {
    auto it = cast.find(cue);
    return it == cast.end() ? Gender::kUnknown : it->second;
  };
  std::vector<Dialogue> out;
  for (std::size_t s = 0; s < doc.scenes.size(); ++s) {
    const auto& lines = doc.scenes[s].lines;
    std::size_t run_start = 0;
    std::string first;
    std::string second;

    auto close_run = [&](std::size_t run_end) {
      if (!second.empty()) {
        std::vector<std::string_view> texts;
        std::vector<std::string> ids;
        for (std::size_t k = run_start; k < run_end; ++k) {
          texts.emplace_back(lines[k].utterance);
          ids.push_back("s" + std::to_string(s) + ":l" + std::to_string(k));
        }
        out.push_back(make_dialogue(gender_of(first), gender_of(second), {first, second},
                                    std::move(ids), Origin::kMovie, options.movie_id, texts, lex));
      }
    };

    for (std::size_t k = 0; k < lines.size(); ++k) {
      const auto& speaker = lines[k].character_cue;
      if (first.empty()) {
        first = speaker;
        run_start = k;
      } else if (speaker == first || speaker == second) {
        // same pair continues
      } else if (second.empty()) {
        second = speaker;
      } else {
        close_run(k);
        first = speaker;
        second.clear();
        run_start = k;
      }
    }
    close_run(lines.size());
  }
  return DialogueSet(std::move(out), options.movie_id.empty() ? doc.title : options.movie_id);
}

int classic_bechdel(const DialogueSet& ds, const CastGenders& cast, const ClassicOptions& options) {
  std::set<std::string> women;
  if (options.speaking_only) {
    for (const auto& d : ds.dialogues()) {
      if (d.g1 == Gender::kFemale) women.insert(d.participants.first);
      if (d.g2 == Gender::kFemale) women.insert(d.participants.second);
    }
  } else {
    for (const auto& [cue, g] : cast) {
      if (g == Gender::kFemale) women.insert(cue);
    }
  }
  if (women.size() < 2) return 0;
  bool talk = false;
  for (const auto& d : ds.dialogues()) {
    if (d.g1 != Gender::kFemale || d.g2 != Gender::kFemale) continue;
    talk = true;
    if (!d.m) return 3;
  }
  return talk ? 2 : 1;
}

std::map<std::string, CastGenders> parse_cast(std::string_view input, std::string_view source) {
  const auto table = csv::parse_table(input);
  const auto c_movie = table.require_column("movie_id", source);
  const auto c_cue = table.require_column("character_cue", source);
  const auto c_gender = table.require_column("gender", source);
  std::map<std::string, CastGenders> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = std::to_string(table.row_lines[r]);
    if (row.size() <= std::max({c_movie, c_cue, c_gender})) {
      throw IngestError(IngestError::Kind::kInvalid,
                        std::string(source) + ":" + line + ": too few columns");
    }
    const std::string movie(text::trim(row[c_movie]));
    const std::string cue = normalize_cue(row[c_cue]);
    Gender g;
    try {
      g = gender_from_string(text::trim(row[c_gender]));
    } catch (const Error& e) {
      throw IngestError(IngestError::Kind::kInvalid, std::string(source) + ":" + line + ": " + e.what());
    }
    auto [it, inserted] = out[movie].emplace(cue, g);
    if (!inserted && it->second != g) {
      throw IngestError(IngestError::Kind::kInvalid, std::string(source) + ":" + line +
                                                         ": conflicting gender for " + movie +
                                                         "/" + cue);
    }
  }
  return out;
}

std::map<std::string, CastGenders> read_cast(const std::string& path) {
  return parse_cast(csv::read_file(path), path);
}

}  // namespace bechdel
