#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bechdel {

enum class Gender : std::uint8_t { kMale = 0, kFemale = 1, kUnknown = 2 };

inline constexpr int kGenderCount = 3;

char to_char(Gender g);
// Accepts M/F/U (any case); anything else is an error.
Gender gender_from_string(std::string_view s);
Gender swap_gender(Gender g);

// Error families. The CLI exits 2 for IngestError(kMissing), 3 for the other
// Error (bad input, failed fits, degenerate statistics, bad thresholds) and 1
// for anything else.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IngestError : public Error {
 public:
  enum class Kind { kMissing, kInvalid };
  IngestError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class StatsError : public Error {
 public:
  using Error::Error;
};

}  // namespace bechdel
