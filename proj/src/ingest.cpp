#include "bechdel/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "bechdel/csv.hpp"
#include "bechdel/text.hpp"

namespace bechdel {

using nlohmann::json;

const StateRecord* GeoTables::find_state(std::string_view code) const {
  for (const auto& s : states) {
    if (s.code == code) return &s;
  }
  return nullptr;
}

namespace {

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = text::trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  s = text::trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v.empty() || v == "0" || v == "false" || v == "no") return false;
  if (v == "1" || v == "true" || v == "yes") return true;
  return std::nullopt;
}

const std::string& cell(const std::vector<std::string>& row, std::size_t idx) {
  static const std::string kEmpty;
  return idx < row.size() ? row[idx] : kEmpty;
}

// Throws when any id appears more than once.
template <typename T, typename IdFn>
void reject_duplicates(const std::vector<T>& records, IdFn id_of, std::string_view source,
                       std::string_view what) {
  std::map<std::string, int> seen;
  for (const auto& r : records) ++seen[id_of(r)];
  std::string offenders;
  for (const auto& [id, n] : seen) {
    if (n > 1) {
      if (!offenders.empty()) offenders += ", ";
      offenders += id;
    }
  }
  if (!offenders.empty()) {
    throw IngestError(IngestError::Kind::kInvalid, std::string(source) + ": duplicate " +
                                                       std::string(what) + ": " + offenders);
  }
}

std::optional<Message> message_from_json(const json& j, std::string& reason) {
  if (!j.is_object()) {
    reason = "not an object";
    return std::nullopt;
  }
  Message m;
  auto get_string = [&](const char* key, std::string& out) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      reason = std::string("missing or non-string '") + key + "'";
      return false;
    }
    out = it->get<std::string>();
    return true;
  };
  if (!get_string("msg_id", m.msg_id) || !get_string("author_id", m.author_id) ||
      !get_string("text", m.text)) {
    return std::nullopt;
  }
  if (m.author_id.empty()) {
    reason = "empty author_id";
    return std::nullopt;
  }
  auto ts = j.find("timestamp");
  if (ts == j.end() || !(ts->is_number_integer() || ts->is_number_unsigned())) {
    reason = "missing or non-integer 'timestamp'";
    return std::nullopt;
  }
  if (ts->is_number_unsigned()) {
    const auto u = ts->get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) {
      reason = "timestamp out of range";
      return std::nullopt;
    }
    m.timestamp = static_cast<std::int64_t>(u);
  } else {
    m.timestamp = ts->get<std::int64_t>();
  }
  if (m.timestamp < 0) {
    reason = "negative timestamp";
    return std::nullopt;
  }
  auto mentions = j.find("mentioned_ids");
  if (mentions == j.end() || !mentions->is_array()) {
    reason = "missing or non-array 'mentioned_ids'";
    return std::nullopt;
  }
  m.mentioned_ids.reserve(mentions->size());
  for (const auto& id : *mentions) {
    if (!id.is_string()) {
      reason = "non-string entry in 'mentioned_ids'";
      return std::nullopt;
    }
    m.mentioned_ids.push_back(id.get<std::string>());
  }
  return m;
}

}  // namespace

ReadResult<Message> parse_messages(std::string_view input) {
  ReadResult<Message> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    std::size_t end = input.find('\n', pos);
    if (end == std::string_view::npos) end = input.size();
    std::string_view line = input.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      out.rejected.push_back({line_no, "invalid JSON"});
      continue;
    }
    std::string reason;
    if (auto m = message_from_json(j, reason)) {
      out.records.push_back(std::move(*m));
    } else {
      out.rejected.push_back({line_no, reason});
    }
  }
  return out;
}

ReadResult<Message> read_messages(const std::string& path) {
  return parse_messages(csv::read_file(path));
}

std::string message_to_json_line(const Message& m) {
  json j = {{"msg_id", m.msg_id},
            {"author_id", m.author_id},
            {"timestamp", m.timestamp},
            {"text", m.text},
            {"mentioned_ids", m.mentioned_ids}};
  return j.dump();
}

AuthorPair AuthorPair::make(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return AuthorPair{std::move(a), std::move(b)};
}

std::vector<AuthorPair> filter_interacting_pairs(const std::vector<Message>& messages,
                                                 std::int64_t min_mentions, MentionRule rule) {
  struct Counts {
    std::int64_t forward = 0;   // first -> second
    std::int64_t backward = 0;  // second -> first
  };
  std::unordered_map<std::string, std::pair<AuthorPair, Counts>> counts;
  std::vector<const std::string*> seen;
  for (const auto& m : messages) {
    seen.clear();
    for (const auto& target : m.mentioned_ids) {
      if (target == m.author_id) continue;
      if (std::any_of(seen.begin(), seen.end(), [&](const std::string* s) { return *s == target; }))
        continue;
      seen.push_back(&target);
      AuthorPair pair = AuthorPair::make(m.author_id, target);
      std::string key = pair.first;
      key.push_back('\x1f');
      key += pair.second;
      auto [it, inserted] = counts.try_emplace(std::move(key), std::move(pair), Counts{});
      if (m.author_id == it->second.first.first) {
        ++it->second.second.forward;
      } else {
        ++it->second.second.backward;
      }
    }
  }
  std::vector<AuthorPair> result;
  for (auto& [key, entry] : counts) {
    const Counts& c = entry.second;
    if (c.forward + c.backward < min_mentions) continue;
    if (rule == MentionRule::kBothDirections && (c.forward == 0 || c.backward == 0)) continue;
    result.push_back(entry.first);
  }
  std::sort(result.begin(), result.end());
  return result;
}

ReadResult<UserProfile> parse_profiles(std::string_view input, std::string_view source) {
  const auto table = csv::parse_table(input);
  const auto c_id = table.require_column("user_id", source);
  const auto c_name = table.require_column("full_name", source);
  const auto c_bio = table.require_column("bio", source);
  const auto c_loc = table.require_column("location_raw", source);
  ReadResult<UserProfile> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    UserProfile p{std::string(text::trim(cell(row, c_id))), cell(row, c_name), cell(row, c_bio),
                  cell(row, c_loc)};
    if (p.user_id.empty()) {
      out.rejected.push_back({table.row_lines[r], "empty user_id"});
      continue;
    }
    out.records.push_back(std::move(p));
  }
  reject_duplicates(out.records, [](const UserProfile& p) { return p.user_id; }, source, "user_id");
  return out;
}

ReadResult<UserProfile> read_profiles(const std::string& path) {
  return parse_profiles(csv::read_file(path), path);
}

ReadResult<MovieRecord> parse_movies(std::string_view input, std::string_view source) {
  const auto table = csv::parse_table(input);
  const auto c_id = table.require_column("movie_id", source);
  const auto c_title = table.require_column("title", source);
  const auto c_b = table.require_column("bechdel_b", source);
  const auto c_disputed = table.find_column("disputed");
  const auto c_views = table.find_column("views");
  const auto c_likes = table.find_column("likes");
  const auto c_dislikes = table.find_column("dislikes");
  ReadResult<MovieRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    MovieRecord m;
    m.movie_id = std::string(text::trim(cell(row, c_id)));
    m.title = cell(row, c_title);
    if (m.movie_id.empty()) {
      out.rejected.push_back({line, "empty movie_id"});
      continue;
    }
    const auto b_text = text::trim(cell(row, c_b));
    if (!b_text.empty()) {
      auto b = parse_int(b_text);
      if (!b || *b < 0 || *b > 3) {
        out.rejected.push_back({line, "bechdel_b out of range 0..3: '" + std::string(b_text) + "'"});
        continue;
      }
      m.bechdel_b = static_cast<int>(*b);
    }
    if (c_disputed) {
      auto d = parse_bool(cell(row, *c_disputed));
      if (!d) {
        out.rejected.push_back({line, "unreadable disputed flag"});
        continue;
      }
      m.disputed = *d;
    }
    bool ok = true;
    auto count_field = [&](std::optional<std::size_t> col, std::optional<std::int64_t>& dst,
                           const char* name) {
      if (!col) return;
      const auto t = text::trim(cell(row, *col));
      if (t.empty()) return;
      auto v = parse_int(t);
      if (!v || *v < 0) {
        out.rejected.push_back({line, std::string("invalid ") + name + " count"});
        ok = false;
        return;
      }
      dst = *v;
    };
    count_field(c_views, m.views, "views");
    if (ok) count_field(c_likes, m.likes, "likes");
    if (ok) count_field(c_dislikes, m.dislikes, "dislikes");
    if (!ok) continue;
    out.records.push_back(std::move(m));
  }
  reject_duplicates(out.records, [](const MovieRecord& m) { return m.movie_id; }, source,
                    "movie_id");
  return out;
}

ReadResult<MovieRecord> read_movies(const std::string& path) {
  return parse_movies(csv::read_file(path), path);
}

ReadResult<ShareRecord> parse_shares(std::string_view input, std::string_view source) {
  const auto table = csv::parse_table(input);
  const auto c_user = table.require_column("user_id", source);
  const auto c_movie = table.require_column("movie_id", source);
  ReadResult<ShareRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    ShareRecord s{std::string(text::trim(cell(table.rows[r], c_user))),
                  std::string(text::trim(cell(table.rows[r], c_movie)))};
    if (s.user_id.empty() || s.movie_id.empty()) {
      out.rejected.push_back({table.row_lines[r], "empty user_id or movie_id"});
      continue;
    }
    out.records.push_back(std::move(s));
  }
  return out;
}

ReadResult<ShareRecord> read_shares(const std::string& path) {
  return parse_shares(csv::read_file(path), path);
}

ReadResult<StateRecord> parse_states(std::string_view input, std::string_view source) {
  const auto table = csv::parse_table(input);
  const auto c_code = table.require_column("state", source);
  const auto c_income = table.require_column("avg_income", source);
  const auto c_gini = table.require_column("gini", source);
  const auto c_lat = table.require_column("largest_city_latitude", source);
  const auto c_lon = table.require_column("largest_city_longitude", source);
  ReadResult<StateRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    StateRecord s;
    s.code = text::to_upper(text::trim(cell(row, c_code)));
    auto income = parse_double(cell(row, c_income));
    auto gini = parse_double(cell(row, c_gini));
    auto lat = parse_int(cell(row, c_lat));
    auto lon = parse_int(cell(row, c_lon));
    if (s.code.empty() || !income || !gini || !lat || !lon) {
      out.rejected.push_back({line, "unreadable state row"});
      continue;
    }
    if (*gini < 0.0 || *gini > 1.0) {
      out.rejected.push_back({line, "gini outside [0,1]"});
      continue;
    }
    if (*lat < 0 || *lat > 90 * 3600) {
      out.rejected.push_back({line, "latitude outside [0, 324000] seconds"});
      continue;
    }
    if (*lon < 0 || *lon > 180 * 3600) {
      out.rejected.push_back({line, "longitude outside [0, 648000] seconds"});
      continue;
    }
    s.avg_income = *income;
    s.gini = *gini;
    s.largest_city_latitude = *lat;
    s.largest_city_longitude = *lon;
    out.records.push_back(std::move(s));
  }
  reject_duplicates(out.records, [](const StateRecord& s) { return s.code; }, source, "state");
  return out;
}

ReadResult<CityRecord> parse_cities(std::string_view input, std::string_view source) {
  const auto table = csv::parse_table(input);
  const auto c_city = table.require_column("city", source);
  const auto c_state = table.require_column("state", source);
  ReadResult<CityRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    CityRecord c{std::string(text::trim(cell(table.rows[r], c_city))),
                 text::to_upper(text::trim(cell(table.rows[r], c_state)))};
    if (c.name.empty() || c.state.empty()) {
      out.rejected.push_back({table.row_lines[r], "empty city or state"});
      continue;
    }
    out.records.push_back(std::move(c));
  }
  reject_duplicates(
      out.records, [](const CityRecord& c) { return text::to_lower(c.name) + ", " + c.state; },
      source, "city");
  return out;
}

ReadResult<CityAlias> parse_aliases(std::string_view input, std::string_view source) {
  const auto table = csv::parse_table(input);
  const auto c_alias = table.require_column("alias", source);
  const auto c_city = table.require_column("city", source);
  const auto c_state = table.require_column("state", source);
  ReadResult<CityAlias> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    CityAlias a{std::string(text::trim(cell(row, c_alias))),
                std::string(text::trim(cell(row, c_city))),
                text::to_upper(text::trim(cell(row, c_state)))};
    if (a.alias.empty() || a.city.empty() || a.state.empty()) {
      out.rejected.push_back({table.row_lines[r], "empty alias field"});
      continue;
    }
    out.records.push_back(std::move(a));
  }
  return out;
}

GeoTables read_geo(const std::string& states_path, const std::string& cities_path,
                   const std::string& aliases_path) {
  GeoTables geo;
  geo.states = parse_states(csv::read_file(states_path), states_path).records;
  geo.top_cities = parse_cities(csv::read_file(cities_path), cities_path).records;
  if (!aliases_path.empty()) {
    geo.aliases = parse_aliases(csv::read_file(aliases_path), aliases_path).records;
  }
  return geo;
}

std::vector<ShareRecord> dangling_shares(const std::vector<ShareRecord>& shares,
                                         const std::vector<UserProfile>& profiles,
                                         const std::vector<MovieRecord>& movies) {
  std::unordered_set<std::string> users;
  for (const auto& p : profiles) users.insert(p.user_id);
  std::unordered_set<std::string> movie_ids;
  for (const auto& m : movies) movie_ids.insert(m.movie_id);
  std::vector<ShareRecord> out;
  for (const auto& s : shares) {
    if (!users.count(s.user_id) || !movie_ids.count(s.movie_id)) out.push_back(s);
  }
  return out;
}

ReadResult<NameRecord> parse_name_records(std::string_view input, std::string_view source) {
  (void)source;
  ReadResult<NameRecord> out;
  std::vector<std::size_t> lines;
  const auto rows = csv::parse_rows(input, &lines);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < 3) {
      out.rejected.push_back({lines[r], "expected name,gender,count"});
      continue;
    }
    auto count = parse_int(row[2]);
    if (!count) {
      // A header row is the only non-numeric count tolerated.
      if (r == 0) continue;
      out.rejected.push_back({lines[r], "non-numeric count"});
      continue;
    }
    const std::string g = text::to_upper(text::trim(row[1]));
    if ((g != "M" && g != "F") || *count < 0) {
      out.rejected.push_back({lines[r], "gender must be M or F and count >= 0"});
      continue;
    }
    out.records.push_back(NameRecord{text::to_lower(text::trim(row[0])),
                                     g == "M" ? Gender::kMale : Gender::kFemale, *count});
  }
  return out;
}

ReadResult<NameRecord> read_name_records(const std::string& path) {
  return parse_name_records(csv::read_file(path), path);
}

std::vector<std::string> parse_token_list(std::string_view input) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= input.size()) {
    std::size_t end = input.find('\n', pos);
    if (end == std::string_view::npos) end = input.size();
    auto line = text::trim(input.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    out.push_back(text::to_lower(line));
    if (end == input.size()) break;
  }
  return out;
}

std::vector<std::string> read_token_list(const std::string& path) {
  return parse_token_list(csv::read_file(path));
}

}  // namespace bechdel
