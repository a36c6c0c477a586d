#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bechdel/ingest.hpp"
#include "bechdel/screenplay.hpp"

// Deterministic synthetic corpora: a mention stream with bursty pair
// conversations, user profiles, a name table, screenplays with cast lists, and
// movie/share tables.
namespace bechdel::synth {

struct StreamOptions {
  std::size_t users = 20;
  std::size_t target_messages = 5000;
  double alpha = 1.5;
  double t_min = 60.0;
  double tau = 14400.0;
  double tail_mean = 86400.0;
  double mean_burst = 5.0;
  std::int64_t start = 1325376000;  // 2012-01-01T00:00:00Z
  // Per-message chance of a male / female reference, by author gender and
  // partner gender.
  double ff_male = 0.10, ff_female = 0.12;
  double mm_male = 0.12, mm_female = 0.04;
  double cross_male = 0.10, cross_female = 0.10;
  // Fraction of messages from an active pair that mention nobody.
  double untagged = 0.04;
  std::uint64_t seed = 7;
};

struct StreamCorpus {
  std::vector<Message> messages;  // timestamp order
  std::vector<UserProfile> profiles;
};

StreamCorpus make_stream_corpus(const StreamOptions& options);

std::vector<NameRecord> name_table();
std::vector<std::string> stoplist();

struct ScriptFixture {
  std::string movie_id;
  std::string text;
  CastGenders cast;
};

// Three screenplays whose classic test values are 3, 2 and 1.
std::vector<ScriptFixture> make_scripts(std::uint64_t seed);

std::vector<MovieRecord> make_movies(const std::vector<ScriptFixture>& scripts, std::uint64_t seed);
std::vector<ShareRecord> make_shares(const std::vector<UserProfile>& profiles,
                                     const std::vector<MovieRecord>& movies, std::uint64_t seed);

// Writes the whole bundle (messages.jsonl, profiles.csv, names.csv,
// stoplist.txt, cast.csv, movies.csv, shares.csv, scripts/*.fountain).
void write_bundle(const std::string& dir, const StreamOptions& options);

}  // namespace bechdel::synth
