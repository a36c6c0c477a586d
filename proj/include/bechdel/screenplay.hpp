#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bechdel/gender.hpp"
#include "bechdel/metrics.hpp"

namespace bechdel {

struct ScriptLine {
  std::string character_cue;  // normalized
  std::string utterance;
  bool operator==(const ScriptLine&) const = default;
};

struct Scene {
  std::string heading;  // empty for lines before the first heading
  std::vector<ScriptLine> lines;
  bool operator==(const Scene&) const = default;
};

struct ScriptDocument {
  std::string title;
  std::vector<Scene> scenes;

  std::size_t line_count() const;
  bool operator==(const ScriptDocument&) const = default;
};

// Character cue -> gender for one movie. Cues absent from the map are U.
using CastGenders = std::map<std::string, Gender>;

// Uppercases, trims, collapses inner whitespace and removes parenthetical
// extensions such as (V.O.), (O.S.) and (CONT'D). A leading '@' (forced cue)
// and a trailing '^' (dual dialogue) are dropped.
std::string normalize_cue(std::string_view cue);

bool is_scene_heading(std::string_view line);
bool is_transition(std::string_view line);

// Scene headings start with INT./EXT./EST./INT/EXT./I/E. (any case);
// transitions ("CUT TO:", "FADE OUT.", ...) also open a new scene. A cue is an
// uppercase line directly followed by at least one dialogue line; dialogue
// runs until a blank line and parenthetical-only lines inside it are skipped.
// Throws ParseError("not a screenplay") when no character line is found.
ScriptDocument parse_script(std::string_view text, std::string title = "");

// Canonical text form; parse_script(render_script(doc)) == doc.
std::string render_script(const ScriptDocument& doc);

struct ScriptDialogueOptions {
  std::string movie_id;
};

// Splits each scene into maximal runs spoken by exactly one pair of
// characters. A speaker outside the current pair closes the run and opens a
// new one; runs with a single speaker are dropped. Each run is one Dialogue
// with genders ordered by first speaker.
DialogueSet build_script_dialogues(const ScriptDocument& doc, const CastGenders& cast,
                                   const ReferenceLexicon& lex,
                                   const ScriptDialogueOptions& options = {});

struct ClassicOptions {
  // Count only F characters that appear in some dialogue, instead of every
  // F entry of the cast.
  bool speaking_only = false;
};

// Number of Bechdel rules passed (0..3): two women, who talk to each other,
// about something besides a man.
int classic_bechdel(const DialogueSet& ds, const CastGenders& cast,
                    const ClassicOptions& options = {});

// Cast file rows `movie_id,character_cue,gender`, keyed by movie id.
std::map<std::string, CastGenders> parse_cast(std::string_view text,
                                              std::string_view source = "cast");
std::map<std::string, CastGenders> read_cast(const std::string& path);

}  // namespace bechdel
