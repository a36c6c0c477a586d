#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "bechdel/csv.hpp"
#include "bechdel/rng.hpp"

namespace bechdel::synth {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kFemaleNames = {"mary",  "linda", "susan",  "karen", "emma",  "olivia",
                                               "sophia", "alice", "julia", "claire", "nora", "helen"};
const std::vector<std::string> kMaleNames = {"james", "john",   "robert", "michael", "david", "william",
                                             "thomas", "daniel", "peter", "henry",   "oscar", "paul"};
const std::vector<std::string> kSurnames = {"smith", "johnson", "brown",  "garcia", "miller", "davis",
                                            "lopez", "wilson",  "moore",  "clark",  "lewis",  "young"};

const std::vector<std::string> kNeutral = {
    "did you see the game last night",
    "running late, save me a seat",
    "that report is finally done",
    "lunch tomorrow at the usual place?",
    "the traffic downtown is unreal today",
    "new coffee shop opened near the office",
    "can you send me the slides",
    "happy friday!",
    "still waiting on the delivery",
    "the concert tickets sold out in minutes",
    "weather looks great for the weekend",
    "just finished that book you recommended",
    "meeting moved to three",
    "ha that is hilarious",
    "are we still on for tonight",
    "my flight got delayed again",
    "that recipe turned out great",
    "so tired after that workout",
    "the new season drops next week",
    "thanks for the help earlier",
};

const std::vector<std::string> kMaleRefs = {"he said it was fine", "my brother is visiting", "ask your dad",
                                            "that guy from work", "my husband cooked", "his car broke down"};
const std::vector<std::string> kFemaleRefs = {"she said it was fine", "my sister is visiting", "ask your mom",
                                              "that girl from class", "my wife cooked", "her car broke down"};

const std::vector<std::string> kBios = {"coffee and books",       "college student",  "phd student in biology",
                                        "music lover",            "just here for the memes", "software engineer",
                                        "history undergrad",      "trail runner"};
const std::vector<std::string> kMotherBios = {"proud mom of two", "mother of three cats", "nurse and mom"};
const std::vector<std::string> kFatherBios = {"dad, runner, cook", "father and husband", "girl dad x3"};

// Location strings grouped by state so most pairs can share a state.
const std::vector<std::vector<std::string>> kPlaces = {
    {"Ann Arbor, MI", "Detroit, Michigan", "Lansing, MI"},
    {"NYC baby", "Brooklyn, New York", "Albany, NY"},
    {"Austin, Texas", "Houston, TX", "Waco, TX"},
    {"Seattle, WA", "Olympia, Washington", "Spokane, WA"},
    {"Chicago, IL", "Peoria, Illinois", "Springfield, IL"},
};

std::string pad_id(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// Inverse-CDF draw from a power law normalized on [lo, hi].
double truncated_power_law(Rng& rng, double alpha, double lo, double hi) {
  const double u = rng.uniform();
  const double r = std::pow(hi / lo, 1.0 - alpha);
  return lo * std::pow(1.0 - u * (1.0 - r), 1.0 / (1.0 - alpha));
}

std::string message_text(Rng& rng, Gender author, Gender partner, const StreamOptions& o) {
  double pm = o.cross_male, pf = o.cross_female;
  if (author == Gender::kFemale && partner == Gender::kFemale) pm = o.ff_male, pf = o.ff_female;
  if (author == Gender::kMale && partner == Gender::kMale) pm = o.mm_male, pf = o.mm_female;
  std::string text = rng.pick(kNeutral);
  if (rng.bernoulli(pm)) {
    text += rng.bernoulli(0.3) ? ", " + capitalize(rng.pick(kMaleNames)) + " called" : ", " + rng.pick(kMaleRefs);
  }
  if (rng.bernoulli(pf)) {
    text += rng.bernoulli(0.3) ? ", " + capitalize(rng.pick(kFemaleNames)) + " called"
                               : ", " + rng.pick(kFemaleRefs);
  }
  return text;
}

}  // namespace

StreamCorpus make_stream_corpus(const StreamOptions& o) {
  Rng rng(o.seed);
  StreamCorpus corpus;
  const int width = o.users < 100 ? 2 : (o.users < 10000 ? 4 : 6);
  std::vector<Gender> gender(o.users);
  std::vector<std::size_t> region(o.users);
  for (std::size_t i = 0; i < o.users; ++i) {
    UserProfile p;
    p.user_id = pad_id("u", i + 1, width);
    // Roughly 45% women, 45% men, 10% names the lexicon cannot resolve.
    const double g = rng.uniform();
    std::string first;
    if (g < 0.45) {
      first = rng.pick(kFemaleNames);
      gender[i] = Gender::kFemale;
    } else if (g < 0.90) {
      first = rng.pick(kMaleNames);
      gender[i] = Gender::kMale;
    } else {
      first = rng.bernoulli(0.5) ? "jordan" : "snoop";
      gender[i] = Gender::kUnknown;
    }
    p.full_name = capitalize(first) + " " + capitalize(rng.pick(kSurnames));
    const bool parent = gender[i] != Gender::kUnknown && rng.bernoulli(0.35);
    p.bio = !parent ? rng.pick(kBios) : rng.pick(gender[i] == Gender::kFemale ? kMotherBios : kFatherBios);
    region[i] = rng.below(kPlaces.size());
    p.location_raw = rng.bernoulli(0.1) ? "planet earth" : rng.pick(kPlaces[region[i]]);
    corpus.profiles.push_back(std::move(p));
  }

  // Pairs: mostly within a region, sized so the corpus lands near the target.
  const double mean_pair_messages = 170.0;
  const std::size_t n_pairs = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(o.target_messages) / mean_pair_messages)));
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t attempts = 0;
  while (pairs.size() < n_pairs && attempts++ < n_pairs * 100) {
    const std::size_t a = rng.below(o.users);
    std::size_t b = rng.below(o.users);
    if (a == b) continue;
    if (region[a] != region[b] && rng.bernoulli(0.7)) continue;
    pairs.emplace(std::min(a, b), std::max(a, b));
  }

  std::vector<Message> messages;
  messages.reserve(o.target_messages + o.target_messages / 10);
  std::size_t remaining = o.target_messages;
  std::size_t pair_index = 0;
  for (const auto& [a, b] : pairs) {
    const std::size_t left_pairs = pairs.size() - pair_index++;
    // A few pairs stay below the interaction threshold.
    std::size_t budget = remaining / left_pairs;
    if (rng.bernoulli(0.08)) budget = 1 + rng.below(8);
    budget = std::min(budget, remaining);
    remaining -= budget;
    double t = static_cast<double>(o.start) + rng.uniform() * 30.0 * 86400.0;
    std::size_t made = 0;
    while (made < budget) {
      const std::size_t burst = 1 + static_cast<std::size_t>(rng.exponential(o.mean_burst - 1.0));
      for (std::size_t k = 0; k < burst && made < budget; ++k, ++made) {
        if (k > 0) t += truncated_power_law(rng, o.alpha, o.t_min, o.tau);
        const bool first_speaks = rng.bernoulli(0.5);
        const std::size_t author = first_speaks ? a : b;
        const std::size_t partner = first_speaks ? b : a;
        Message m;
        m.author_id = corpus.profiles[author].user_id;
        m.timestamp = static_cast<std::int64_t>(std::llround(t));
        m.text = message_text(rng, gender[author], gender[partner], o);
        if (!rng.bernoulli(o.untagged)) {
          m.mentioned_ids.push_back(corpus.profiles[partner].user_id);
          m.text = "@" + corpus.profiles[partner].user_id + " " + m.text;
        }
        messages.push_back(std::move(m));
      }
      t += o.tau + rng.exponential(o.tail_mean);
    }
  }
  std::stable_sort(messages.begin(), messages.end(),
                   [](const Message& x, const Message& y) { return x.timestamp < y.timestamp; });
  const int id_width = messages.size() < 1000000 ? 6 : 8;
  for (std::size_t i = 0; i < messages.size(); ++i) messages[i].msg_id = pad_id("m", i + 1, id_width);
  corpus.messages = std::move(messages);
  return corpus;
}

std::vector<NameRecord> name_table() {
  std::vector<NameRecord> out;
  std::int64_t k = 0;
  for (const auto& n : kFemaleNames) {
    out.push_back({n, Gender::kFemale, 40000 + 1000 * k});
    out.push_back({n, Gender::kMale, 30 + 5 * k});
    ++k;
  }
  k = 0;
  for (const auto& n : kMaleNames) {
    out.push_back({n, Gender::kMale, 45000 + 1000 * k});
    out.push_back({n, Gender::kFemale, 40 + 5 * k});
    ++k;
  }
  // Names the ratio rule must drop, and dictionary words the stoplist removes.
  out.push_back({"jordan", Gender::kMale, 600});
  out.push_back({"jordan", Gender::kFemale, 400});
  out.push_back({"taylor", Gender::kFemale, 900});
  out.push_back({"taylor", Gender::kMale, 700});
  out.push_back({"faith", Gender::kFemale, 5000});
  out.push_back({"hope", Gender::kFemale, 4000});
  out.push_back({"will", Gender::kMale, 3000});
  out.push_back({"june", Gender::kFemale, 2500});
  return out;
}

std::vector<std::string> stoplist() { return {"faith", "hope", "will", "june"}; }

namespace {

struct Beat {
  std::string a;
  std::string b;
  int lines;
  // Reference mix for this exchange.
  bool talk_about_men;
  bool talk_about_women;
};

std::string script_from_beats(const std::string& title, const std::vector<std::vector<Beat>>& scenes, Rng& rng) {
  static const std::vector<std::string> kHeadings = {"INT. KITCHEN - NIGHT",  "EXT. HARBOR - DAY",
                                                     "INT. OFFICE - DAY",     "EXT. PARKING LOT - NIGHT",
                                                     "INT. DINER - MORNING",  "INT. APARTMENT - EVENING"};
  std::string out = "Title: " + title + "\nAuthor: generated\n\n";
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    out += kHeadings[s % kHeadings.size()] + "\n\n";
    out += "Rain streaks the windows.\n\n";
    for (const auto& beat : scenes[s]) {
      for (int i = 0; i < beat.lines; ++i) {
        const std::string& who = i % 2 == 0 ? beat.a : beat.b;
        std::string line = capitalize(rng.pick(kNeutral));
        if (line.back() != '?' && line.back() != '!') line += ".";
        if (beat.talk_about_men && i % 2 == 0) line += " " + capitalize(rng.pick(kMaleRefs)) + ".";
        if (beat.talk_about_women && i % 2 == 1) line += " " + capitalize(rng.pick(kFemaleRefs)) + ".";
        out += who + (i == 2 ? " (CONT'D)" : "") + "\n";
        if (i == 1) out += "(quietly)\n";
        out += line + "\n\n";
      }
    }
    if (s + 1 < scenes.size()) out += "CUT TO:\n\n";
  }
  return out;
}

}  // namespace

std::vector<ScriptFixture> make_scripts(std::uint64_t seed) {
  Rng rng(seed ^ 0x5c1e);
  std::vector<ScriptFixture> out;
  const Gender F = Gender::kFemale, M = Gender::kMale;

  // Two women talk about something other than men: passes.
  out.push_back({"harbor_lights",
                 script_from_beats("Harbor Lights",
                                   {{{"ANNA", "BETH", 6, false, false}, {"CARL", "BETH", 4, false, true}},
                                    {{"CARL", "DEREK", 6, false, true}},
                                    {{"ANNA", "DEREK", 5, true, false}, {"ANNA", "BETH", 4, true, false}},
                                    {{"DEREK", "CARL", 5, false, false}}},
                                   rng),
                 {{"ANNA", F}, {"BETH", F}, {"CARL", M}, {"DEREK", M}}});
  // Two women talk, but only about men.
  out.push_back({"night_shift",
                 script_from_beats("Night Shift",
                                   {{{"JANE", "KATE", 6, true, false}},
                                    {{"LEO", "MARK", 8, false, false}, {"KATE", "MARK", 4, true, false}},
                                    {{"JANE", "KATE", 4, true, true}},
                                    {{"MARK", "LEO", 6, false, true}}},
                                   rng),
                 {{"JANE", F}, {"KATE", F}, {"LEO", M}, {"MARK", M}}});
  // Two women who never talk to each other.
  out.push_back({"long_road",
                 script_from_beats("Long Road",
                                   {{{"NINA", "OWEN", 6, false, false}},
                                    {{"PETE", "OWEN", 8, false, true}, {"OLGA", "PETE", 4, true, false}},
                                    {{"OWEN", "PETE", 6, false, false}}},
                                   rng),
                 {{"NINA", F}, {"OLGA", F}, {"OWEN", M}, {"PETE", M}}});
  return out;
}

std::vector<MovieRecord> make_movies(const std::vector<ScriptFixture>& scripts, std::uint64_t seed) {
  Rng rng(seed ^ 0x3071e5);
  static const std::map<std::string, int> kScripted = {{"harbor_lights", 3}, {"night_shift", 2}, {"long_road", 1}};
  static const std::vector<std::string> kTitles = {"Harbor Lights", "Night Shift", "Long Road"};
  std::vector<MovieRecord> out;
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    MovieRecord m;
    m.movie_id = scripts[i].movie_id;
    m.title = i < kTitles.size() ? kTitles[i] : scripts[i].movie_id;
    auto it = kScripted.find(m.movie_id);
    if (it != kScripted.end()) m.bechdel_b = it->second;
    out.push_back(std::move(m));
  }
  for (std::size_t i = 4; i <= 15; ++i) {
    MovieRecord m;
    m.movie_id = pad_id("mv", i, 2);
    m.title = "Feature " + std::to_string(i);
    m.bechdel_b = static_cast<int>(rng.below(4));
    m.disputed = rng.bernoulli(0.1);
    out.push_back(std::move(m));
  }
  for (auto& m : out) {
    const double scale = m.bechdel_b && *m.bechdel_b == 3 ? 0.8 : 1.0;
    m.views = static_cast<std::int64_t>(std::llround(scale * (20000.0 + rng.exponential(200000.0))));
    m.likes = *m.views / (40 + static_cast<std::int64_t>(rng.below(40)));
    m.dislikes = *m.views / (400 + static_cast<std::int64_t>(rng.below(400)));
  }
  return out;
}

std::vector<ShareRecord> make_shares(const std::vector<UserProfile>& profiles,
                                     const std::vector<MovieRecord>& movies, std::uint64_t seed) {
  Rng rng(seed ^ 0x54a2e5);
  std::vector<std::size_t> pass, fail;
  for (std::size_t i = 0; i < movies.size(); ++i) {
    (movies[i].bechdel_b && *movies[i].bechdel_b == 3 ? pass : fail).push_back(i);
  }
  std::vector<ShareRecord> out;
  for (const auto& p : profiles) {
    const std::string first = p.full_name.substr(0, p.full_name.find(' '));
    std::string lower = first;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const bool female = std::find(kFemaleNames.begin(), kFemaleNames.end(), lower) != kFemaleNames.end();
    const double pass_bias = female ? 0.55 : 0.3;
    const std::size_t n = 5 + rng.below(6);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& pool = (!pass.empty() && rng.bernoulli(pass_bias)) || fail.empty() ? pass : fail;
      out.push_back({p.user_id, movies[rng.pick(pool)].movie_id});
    }
  }
  return out;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

std::string opt_int(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : ""; }

}  // namespace

void write_bundle(const std::string& dir_name, const StreamOptions& options) {
  const fs::path dir(dir_name);
  fs::create_directories(dir / "scripts");
  const auto corpus = make_stream_corpus(options);

  std::string text;
  for (const auto& m : corpus.messages) text += message_to_json_line(m) + "\n";
  write_text(dir / "messages.jsonl", text);

  text = csv::join_row({"user_id", "full_name", "bio", "location_raw"}) + "\n";
  for (const auto& p : corpus.profiles) text += csv::join_row({p.user_id, p.full_name, p.bio, p.location_raw}) + "\n";
  write_text(dir / "profiles.csv", text);

  text = "name,gender,count\n";
  for (const auto& n : name_table()) {
    text += csv::join_row({n.name, std::string(1, to_char(n.gender)), std::to_string(n.count)}) + "\n";
  }
  write_text(dir / "names.csv", text);

  text.clear();
  for (const auto& w : stoplist()) text += w + "\n";
  write_text(dir / "stoplist.txt", text);

  const auto scripts = make_scripts(options.seed);
  text = "movie_id,character_cue,gender\n";
  for (const auto& s : scripts) {
    write_text(dir / "scripts" / (s.movie_id + ".fountain"), s.text);
    for (const auto& [cue, g] : s.cast) text += csv::join_row({s.movie_id, cue, std::string(1, to_char(g))}) + "\n";
  }
  write_text(dir / "cast.csv", text);

  const auto movies = make_movies(scripts, options.seed);
  text = "movie_id,title,bechdel_b,disputed,views,likes,dislikes\n";
  for (const auto& m : movies) {
    text += csv::join_row({m.movie_id, m.title, m.bechdel_b ? std::to_string(*m.bechdel_b) : "",
                           m.disputed ? "1" : "0", opt_int(m.views), opt_int(m.likes), opt_int(m.dislikes)}) +
            "\n";
  }
  write_text(dir / "movies.csv", text);

  text = "user_id,movie_id\n";
  for (const auto& s : make_shares(corpus.profiles, movies, options.seed)) {
    text += csv::join_row({s.user_id, s.movie_id}) + "\n";
  }
  write_text(dir / "shares.csv", text);
}

}  // namespace bechdel::synth
