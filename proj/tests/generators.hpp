#pragma once

// Random fixtures shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bechdel/gender.hpp"
#include "bechdel/ingest.hpp"
#include "bechdel/metrics.hpp"
#include "bechdel/rng.hpp"
#include "bechdel/screenplay.hpp"
#include "bechdel/segmentation.hpp"

namespace gen {

using bechdel::Gender;
using bechdel::Rng;

inline const std::vector<std::string>& female_names() {
  static const std::vector<std::string> v = {"mary", "linda", "susan", "anna", "emma"};
  return v;
}
inline const std::vector<std::string>& male_names() {
  static const std::vector<std::string> v = {"john", "james", "robert", "mike", "paul"};
  return v;
}
// "jordan" is ambiguous in the table below, "zed" is absent from it.
inline const std::vector<std::string>& other_names() {
  static const std::vector<std::string> v = {"jordan", "zed"};
  return v;
}

inline std::vector<bechdel::NameRecord> name_records() {
  std::vector<bechdel::NameRecord> out;
  std::int64_t c = 1000;
  for (const auto& n : female_names()) out.push_back({n, Gender::kFemale, c += 37});
  for (const auto& n : male_names()) out.push_back({n, Gender::kMale, c += 41});
  out.push_back({"jordan", Gender::kFemale, 400});
  out.push_back({"jordan", Gender::kMale, 500});
  return out;
}

inline std::vector<bechdel::NameRecord> swap_records(std::vector<bechdel::NameRecord> records) {
  for (auto& r : records) r.gender = bechdel::swap_gender(r.gender);
  return records;
}

// Words drawn into message and script text.
inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v = {
      "the", "movie", "was", "great", "see", "you", "tomorrow", "lunch", "weather", "ok",
      "he", "him", "his", "she", "her", "hers", "man", "woman", "boyfriend", "girlfriend",
      "mary", "john", "emma", "paul", "jordan", "zed", "coffee", "later"};
  return v;
}

inline std::string random_text(Rng& rng, double p_gendered) {
  static const std::vector<std::string> neutral = {"the", "movie", "was", "great", "see", "you",
                                                   "tomorrow", "lunch", "weather", "ok",
                                                   "coffee", "later", "zed", "jordan"};
  std::string s;
  const std::size_t words = 1 + static_cast<std::size_t>(rng.below(6));
  for (std::size_t i = 0; i < words; ++i) {
    if (!s.empty()) s += ' ';
    s += rng.bernoulli(p_gendered) ? rng.pick(vocabulary()) : rng.pick(neutral);
  }
  return s;
}

struct MessageCorpus {
  std::vector<bechdel::Message> messages;
  std::vector<bechdel::UserProfile> profiles;
};

// A handful of users talking in pairs with bursty timing.
inline MessageCorpus random_message_corpus(Rng& rng, std::size_t users, std::size_t messages) {
  MessageCorpus c;
  for (std::size_t u = 0; u < users; ++u) {
    const auto roll = rng.below(10);
    const auto& pool = roll < 4 ? female_names() : roll < 8 ? male_names() : other_names();
    c.profiles.push_back({"u" + std::to_string(u), rng.pick(pool) + " smith", "", ""});
  }
  std::int64_t t = 1000000;
  std::size_t id = 0;
  while (c.messages.size() < messages) {
    const auto a = rng.below(users);
    auto b = rng.below(users);
    if (b == a) b = (b + 1) % users;
    const std::size_t burst = 1 + static_cast<std::size_t>(rng.below(12));
    for (std::size_t k = 0; k < burst && c.messages.size() < messages; ++k) {
      const bool forward = rng.bernoulli(0.5);
      bechdel::Message m;
      m.msg_id = "m" + std::to_string(id++);
      m.author_id = "u" + std::to_string(forward ? a : b);
      m.mentioned_ids = {"u" + std::to_string(forward ? b : a)};
      m.text = random_text(rng, 0.04);
      t += static_cast<std::int64_t>(std::ceil(std::pow(rng.uniform_open_zero(), -1.0 / 0.5)));
      m.timestamp = t;
      c.messages.push_back(std::move(m));
    }
    t += 4000 + static_cast<std::int64_t>(rng.exponential(20000.0));
  }
  return c;
}

// Script with random scenes over a small cast; some characters have no cast
// entry and are therefore U.
struct ScriptFixture {
  std::string text;
  bechdel::CastGenders cast;
};

inline ScriptFixture random_script(Rng& rng) {
  static const std::vector<std::string> cues = {"ALICE", "BETH", "CARA", "DAN", "ED", "FRAN", "GUS"};
  ScriptFixture f;
  for (const auto& c : cues) {
    const auto roll = rng.below(5);
    if (roll < 2) f.cast[c] = Gender::kFemale;
    else if (roll < 4) f.cast[c] = Gender::kMale;
  }
  bechdel::ScriptDocument doc;
  const std::size_t scenes = 1 + static_cast<std::size_t>(rng.below(4));
  for (std::size_t s = 0; s < scenes; ++s) {
    bechdel::Scene scene;
    scene.heading = (rng.bernoulli(0.5) ? "INT. ROOM " : "EXT. STREET ") + std::to_string(s) + " - DAY";
    std::string a = rng.pick(cues), b = rng.pick(cues);
    const std::size_t lines = 1 + static_cast<std::size_t>(rng.below(10));
    for (std::size_t l = 0; l < lines; ++l) {
      if (rng.bernoulli(0.2)) b = rng.pick(cues);
      const std::string& who = rng.bernoulli(0.5) ? a : b;
      scene.lines.push_back({who, random_text(rng, 0.25)});
    }
    doc.scenes.push_back(std::move(scene));
  }
  f.text = bechdel::render_script(doc);
  return f;
}

}  // namespace gen
