#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bechdel/metrics.hpp"
#include "oracles.hpp"

using namespace bechdel;

namespace {

const Gender F = Gender::kFemale, M = Gender::kMale, U = Gender::kUnknown;

Dialogue dlg(Gender a, Gender b, bool m, bool f) {
  Dialogue d;
  d.g1 = a;
  d.g2 = b;
  d.m = m;
  d.f = f;
  return d;
}

// 10 dialogues with hand-counted values.
DialogueSet small_set() {
  return DialogueSet({dlg(F, F, false, false), dlg(F, F, true, false), dlg(F, F, false, true),
                      dlg(M, M, false, false), dlg(M, M, false, true), dlg(M, M, true, true),
                      dlg(F, M, true, true), dlg(M, F, false, false), dlg(U, F, false, false),
                      dlg(U, U, true, false)});
}

}  // namespace

TEST_CASE("hand counted scores") {
  const auto ds = small_set();
  const auto b = bechdel_scores(ds);
  CHECK(b.female.numerator == 2);
  CHECK(b.female.denominator == 10);
  CHECK(b.male.numerator == 1);
  CHECK(b.male.denominator == 10);

  const auto b_known = bechdel_scores(ds, false);
  CHECK(b_known.female.denominator == 9);

  const auto x = dialogue_imbalance(ds);
  CHECK(x.female.numerator == 2);    // F-M and M-F
  CHECK(x.female.denominator == 6);  // 3 FF + 2 cross + U-F
  CHECK(x.male.numerator == 3);
  CHECK(x.male.denominator == 5);

  const auto i = gender_independence(ds, 1);
  CHECK(i.female.numerator == 2);
  CHECK(i.female.denominator == 3);
  CHECK(i.male.numerator == 1);
  CHECK(i.male.denominator == 3);
  REQUIRE(i.asymmetry);
  CHECK(*i.asymmetry == doctest::Approx(1.0 / 3 - 2.0 / 3));
}

TEST_CASE("independence needs enough aligned dialogues") {
  const auto ds = small_set();
  const auto i = gender_independence(ds, 4);
  CHECK_FALSE(i.female.defined);
  CHECK_FALSE(i.male.defined);
  CHECK(i.female.denominator == 3);
  CHECK_FALSE(i.asymmetry);
  CHECK(std::isnan(i.female.value()));
  CHECK(i.female.reason.find("fewer than 4") != std::string::npos);
}

TEST_CASE("empty set leaves every ratio undefined") {
  const DialogueSet ds;
  const auto r = compute_report(ds, 1);
  CHECK_FALSE(r.bechdel_female.defined);
  CHECK_FALSE(r.imbalance_female.defined);
  CHECK_FALSE(r.independence_male.defined);
  CHECK(format_ratio(r.bechdel_female) == "NA");
}

TEST_CASE("pattern parsing and matching") {
  const auto p = Pattern::parse("F,F,0,*");
  CHECK(p.matches(F, F, false, true));
  CHECK_FALSE(p.matches(F, F, true, false));
  CHECK_FALSE(p.matches(F, M, false, false));
  const auto any = Pattern::parse("*,*,*,*");
  CHECK(any.matches(U, M, true, true));
  CHECK_THROWS_AS(Pattern::parse("F,F,0"), Error);
  CHECK_THROWS_AS(Pattern::parse("X,F,0,1"), Error);

  Pattern cross{F, M, std::nullopt, std::nullopt, true};
  CHECK(cross.matches(M, F, false, false));
  cross.unordered = false;
  CHECK_FALSE(cross.matches(M, F, false, false));
}

TEST_CASE("select_count agrees with a scan for every pattern") {
  Rng rng(11);
  const auto dialogues = oracle::random_dialogues(rng, 300);
  const DialogueSet ds(dialogues);
  const std::vector<std::optional<Gender>> gs = {std::nullopt, F, M, U};
  const std::vector<std::optional<bool>> bs = {std::nullopt, false, true};
  for (auto g1 : gs)
    for (auto g2 : gs)
      for (auto m : bs)
        for (auto f : bs)
          for (bool unordered : {false, true}) {
            const Pattern p{g1, g2, m, f, unordered};
            std::uint64_t n = 0;
            for (const auto& d : dialogues) {
              auto ok = [&](Gender a, Gender b) {
                return (!g1 || *g1 == a) && (!g2 || *g2 == b) && (!m || *m == d.m) &&
                       (!f || *f == d.f);
              };
              if (ok(d.g1, d.g2) || (unordered && ok(d.g2, d.g1))) ++n;
            }
            CHECK(select_count(ds, p) == n);
          }
}

TEST_CASE("metrics match the brute-force scan") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dialogues = oracle::random_dialogues(rng, 200);
    const std::uint64_t min_aligned = rng.below(20);
    const auto want = oracle::brute_metrics(dialogues, min_aligned);
    const auto got = compute_report(DialogueSet(dialogues), min_aligned);
    CHECK(oracle::same(want.bf, got.bechdel_female));
    CHECK(oracle::same(want.bm, got.bechdel_male));
    CHECK(oracle::same(want.xf, got.imbalance_female));
    CHECK(oracle::same(want.xm, got.imbalance_male));
    CHECK(oracle::same(want.i_f, got.independence_female));
    CHECK(oracle::same(want.i_m, got.independence_male));
  }
}

TEST_CASE("ratios lie in [0,1] and carry a Wilson interval around the value") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = compute_report(DialogueSet(oracle::random_dialogues(rng, 100)), 0);
    for (const auto* m : {&r.bechdel_female, &r.bechdel_male, &r.imbalance_female,
                          &r.imbalance_male, &r.independence_female, &r.independence_male}) {
      if (!m->defined) continue;
      CHECK(m->value() >= 0.0);
      CHECK(m->value() <= 1.0);
      CHECK(m->ci_low <= m->value() + 1e-12);
      CHECK(m->ci_high >= m->value() - 1e-12);
    }
  }
}

TEST_CASE("swap_genders exchanges the female and male metrics") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dialogues = oracle::random_dialogues(rng, 150);
    std::vector<Dialogue> swapped;
    for (const auto& d : dialogues) swapped.push_back(swap_genders(d));
    const auto a = compute_report(DialogueSet(dialogues), 1);
    const auto b = compute_report(DialogueSet(swapped), 1);
    CHECK(a.bechdel_female.numerator == b.bechdel_male.numerator);
    CHECK(a.bechdel_male.numerator == b.bechdel_female.numerator);
    CHECK(a.independence_female.denominator == b.independence_male.denominator);
    CHECK(a.imbalance_female.denominator == b.imbalance_male.denominator);
    CHECK(a.independence_male.numerator == b.independence_female.numerator);
  }
}

TEST_CASE("decomposition B_F = I_F * |D(F,F)| / |D|") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const DialogueSet ds(oracle::random_dialogues(rng, 200));
    const auto b = bechdel_scores(ds);
    const auto i = gender_independence(ds, 1);
    if (!b.female.defined || !i.female.defined) continue;
    CHECK(b.female.numerator * ds.size() == b.female.denominator * i.female.numerator);
    CHECK(i.female.denominator == select_count(ds, Pattern::parse("F,F,*,*")));
  }
}

TEST_CASE("dialogue lines round trip") {
  Dialogue d = dlg(F, M, true, false);
  d.participants = {"a", "b"};
  d.source_ids = {"m1", "m2"};
  d.origin = Origin::kMovie;
  d.unit = "mv01";
  const auto parsed = parse_dialogues(dialogue_to_json_line(d) + "\n\nnot json\n");
  REQUIRE(parsed.dialogues.size() == 1);
  CHECK(parsed.dialogues[0] == d);
  CHECK(parsed.malformed == 1);
}

TEST_CASE("json numbers are rounded to ten significant digits") {
  CHECK(json_number(0.1 + 0.2).dump() == "0.3");
  CHECK(json_number(-0.0).dump() == "0.0");
  CHECK(json_number(std::nan("")).is_null());
  CHECK(format_number(1.0 / 3.0) == "0.333333");
}
