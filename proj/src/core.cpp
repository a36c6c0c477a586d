#include "bechdel/core.hpp"

namespace bechdel {

char to_char(Gender g) {
  switch (g) {
    case Gender::kMale:
      return 'M';
    case Gender::kFemale:
      return 'F';
    case Gender::kUnknown:
      return 'U';
  }
  return 'U';
}

Gender gender_from_string(std::string_view s) {
  if (s.size() == 1) {
    switch (s[0]) {
      case 'M':
      case 'm':
        return Gender::kMale;
      case 'F':
      case 'f':
        return Gender::kFemale;
      case 'U':
      case 'u':
        return Gender::kUnknown;
      default:
        break;
    }
  }
  throw Error("invalid gender '" + std::string(s) + "' (expected M, F or U)");
}

Gender swap_gender(Gender g) {
  if (g == Gender::kMale) return Gender::kFemale;
  if (g == Gender::kFemale) return Gender::kMale;
  return g;
}

}  // namespace bechdel
