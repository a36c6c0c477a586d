#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "bechdel/ingest.hpp"
#include "generators.hpp"

using namespace bechdel;

TEST_CASE("message lines") {
  const std::string text =
      R"({"msg_id":"1","author_id":"a","timestamp":100,"text":"hi @b","mentioned_ids":["b"]})"
      "\n\n"
      R"({"msg_id":"2","author_id":"b","timestamp":"100","text":"x","mentioned_ids":[]})"
      "\n"
      "{broken\n"
      R"({"msg_id":"3","author_id":"","timestamp":1,"text":"x","mentioned_ids":[]})"
      "\n"
      R"({"msg_id":"4","author_id":"c","timestamp":-5,"text":"x","mentioned_ids":[]})"
      "\n"
      R"({"msg_id":"5","author_id":"c","timestamp":7,"text":"x","mentioned_ids":[1]})"
      "\n"
      R"({"msg_id":"6","author_id":"c","timestamp":7,"text":"x"})"
      "\n"
      R"([1,2])";
  const auto r = parse_messages(text);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0] == Message{"1", "a", 100, "hi @b", {"b"}});
  REQUIRE(r.rejected.size() == 7);
  CHECK(r.rejected[0].line == 3);
  CHECK(r.rejected[1].line == 4);
  CHECK(r.rejected[1].reason == "invalid JSON");
  CHECK(r.rejected.back().line == 9);
}

TEST_CASE("message json round trip") {
  Rng rng(3);
  const auto corpus = gen::random_message_corpus(rng, 5, 200);
  std::string text;
  for (const auto& m : corpus.messages) text += message_to_json_line(m) + "\n";
  const auto back = parse_messages(text);
  CHECK(back.rejected.empty());
  CHECK(back.records == corpus.messages);

  const Message odd{"q\"1", "a\\b", 0, "line\nbreak \xc3\xa9", {}};
  CHECK(parse_messages(message_to_json_line(odd)).records.at(0) == odd);
}

TEST_CASE("missing files are reported as missing") {
  try {
    read_messages("/nonexistent/messages.jsonl");
    FAIL("expected an exception");
  } catch (const IngestError& e) {
    CHECK(e.kind() == IngestError::Kind::kMissing);
  }
}

TEST_CASE("interacting pairs") {
  std::vector<Message> ms;
  auto add = [&](std::string author, std::vector<std::string> to, int times) {
    for (int i = 0; i < times; ++i) ms.push_back({"", author, 0, "", to});
  };
  add("a", {"b"}, 6);
  add("b", {"a", "a"}, 4);  // counted once per message
  add("c", {"d"}, 10);      // one direction only
  add("e", {"e", "f"}, 3);  // self mentions ignored
  add("f", {"e"}, 5);
  const auto sum = filter_interacting_pairs(ms, 10);
  REQUIRE(sum.size() == 2);
  CHECK(sum[0] == AuthorPair{"a", "b"});
  CHECK(sum[1] == AuthorPair{"c", "d"});
  const auto both = filter_interacting_pairs(ms, 10, MentionRule::kBothDirections);
  REQUIRE(both.size() == 1);
  CHECK(both[0] == AuthorPair{"a", "b"});
  CHECK(filter_interacting_pairs(ms, 8).size() == 3);
  CHECK(AuthorPair::make("z", "y") == AuthorPair{"y", "z"});
}

TEST_CASE("interacting pairs agree with a direct count") {
  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Message> ms;
    const std::size_t n = 1 + rng.below(400);
    for (std::size_t i = 0; i < n; ++i) {
      Message m;
      m.author_id = "u" + std::to_string(rng.below(8));
      const std::size_t k = rng.below(3);
      for (std::size_t j = 0; j < k; ++j) m.mentioned_ids.push_back("u" + std::to_string(rng.below(8)));
      ms.push_back(std::move(m));
    }
    const std::int64_t threshold = 1 + static_cast<std::int64_t>(rng.below(15));
    std::map<std::pair<std::string, std::string>, std::int64_t> directed;
    for (const auto& m : ms) {
      std::vector<std::string> targets = m.mentioned_ids;
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      for (const auto& t : targets) {
        if (t != m.author_id) ++directed[{m.author_id, t}];
      }
    }
    std::vector<AuthorPair> want_sum, want_both;
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        const std::string x = "u" + std::to_string(a), y = "u" + std::to_string(b);
        if (!(x < y)) continue;
        const auto f = directed[{x, y}], r = directed[{y, x}];
        if (f + r >= threshold) {
          want_sum.push_back({x, y});
          if (f > 0 && r > 0) want_both.push_back({x, y});
        }
      }
    CHECK(filter_interacting_pairs(ms, threshold) == want_sum);
    CHECK(filter_interacting_pairs(ms, threshold, MentionRule::kBothDirections) == want_both);
  }
}

TEST_CASE("csv tables") {
  const auto profiles = parse_profiles(
      "user_id,full_name,bio,location_raw\nu1,Mary Smith,\"mom, runner\",\"Detroit, MI\"\n,x,y,z\n");
  REQUIRE(profiles.records.size() == 1);
  CHECK(profiles.records[0].bio == "mom, runner");
  CHECK(profiles.records[0].location_raw == "Detroit, MI");
  CHECK(profiles.rejected.size() == 1);
  CHECK_THROWS_AS(parse_profiles("user_id,full_name,bio,location_raw\nu1,a,,\nu1,b,,\n"),
                  IngestError);
  CHECK_THROWS_AS(parse_profiles("user_id,name\nu1,a\n"), IngestError);

  const auto movies = parse_movies(
      "movie_id,title,bechdel_b,disputed,views,likes,dislikes\n"
      "m1,One,3,0,10,5,1\nm2,Two,,yes,,,\nm3,Three,4,0,1,1,1\nm4,Four,2,0,-1,0,0\n");
  REQUIRE(movies.records.size() == 2);
  CHECK(movies.records[0].bechdel_b == 3);
  CHECK(movies.records[0].views == 10);
  CHECK_FALSE(movies.records[1].bechdel_b);
  CHECK(movies.records[1].disputed);
  CHECK(movies.rejected.size() == 2);

  const auto shares = parse_shares("user_id,movie_id\nu1,m1\nu1,m1\n,m2\n");
  CHECK(shares.records.size() == 2);
  CHECK(shares.rejected.size() == 1);
  const auto dangling = dangling_shares(shares.records, profiles.records, movies.records);
  CHECK(dangling.empty());
  CHECK(dangling_shares({{"u9", "m1"}}, profiles.records, movies.records).size() == 1);
}

TEST_CASE("geo tables") {
  const auto states = parse_states(
      "state,avg_income,gini,largest_city_latitude,largest_city_longitude\n"
      "mi,50000,0.45,152000,299000\nXX,1,1.5,0,0\nNY,1,0.5,-1,0\n");
  REQUIRE(states.records.size() == 1);
  CHECK(states.records[0].code == "MI");
  CHECK(states.rejected.size() == 2);
  GeoTables geo;
  geo.states = states.records;
  CHECK(geo.find_state("MI"));
  CHECK_FALSE(geo.find_state("NY"));
}

TEST_CASE("name table and token lists") {
  const auto names = parse_name_records("name,gender,count\nMary,F,10\nJohn,m,7\nbad,X,1\nx,F,abc\n");
  REQUIRE(names.records.size() == 2);
  CHECK(names.records[0].name == "mary");
  CHECK(names.records[1].gender == Gender::kMale);
  CHECK(names.rejected.size() == 2);
  CHECK(parse_name_records("mary,F,3\n").records.size() == 1);
  CHECK(parse_token_list("# comment\n Faith \n\nHOPE") == std::vector<std::string>{"faith", "hope"});
}
