#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "chartag/error.hpp"
#include "chartag/eval.hpp"
#include "chartag/rng.hpp"

using namespace chartag;

namespace {

// Independent reference for span extraction, written from the definition:
// a span starts at B-X, or at I-X that does not continue a same-type span,
// and runs while I-X of the same type follows.
std::vector<EntitySpan> ref_spans(const std::vector<std::string>& tags) {
  std::vector<EntitySpan> out;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i] == "O") {
      ++i;
      continue;
    }
    std::string type = tags[i].substr(2);
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j] == "I-" + type) ++j;
    out.push_back({static_cast<int>(i), static_cast<int>(j) - 1, type});
    i = j;
  }
  return out;
}

std::vector<std::string> random_tags(Rng& rng, int len) {
  static const std::vector<std::string> pool{"O", "B-X", "I-X", "B-Y", "I-Y", "B-Longer", "I-Longer"};
  std::vector<std::string> tags;
  for (int i = 0; i < len; ++i) tags.push_back(pool[static_cast<std::size_t>(rng.below(static_cast<int>(pool.size())))]);
  return tags;
}

}  // namespace

TEST_CASE("extract_spans on hand-worked examples") {
  CHECK(extract_spans({"B-X", "I-X", "O", "B-Y"}) ==
        std::vector<EntitySpan>{{0, 1, "X"}, {3, 3, "Y"}});
  CHECK(extract_spans({"O", "O"}).empty());
  CHECK(extract_spans({}).empty());
  // stray I-X opens a span (repair policy)
  CHECK(extract_spans({"O", "I-X", "I-X"}) == std::vector<EntitySpan>{{1, 2, "X"}});
  // I-Y directly after an X span closes X and opens Y
  CHECK(extract_spans({"B-X", "I-Y"}) == std::vector<EntitySpan>{{0, 0, "X"}, {1, 1, "Y"}});
  // B-X after I-X starts a fresh span of the same type
  CHECK(extract_spans({"B-X", "B-X"}) == std::vector<EntitySpan>{{0, 0, "X"}, {1, 1, "X"}});
  CHECK_THROWS_AS(extract_spans({"B"}), DataError);
  CHECK_THROWS_AS(extract_spans({"Z-X"}), DataError);
}

TEST_CASE("extract_spans agrees with the reference scan on random tags") {
  Rng rng(301);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> tags = random_tags(rng, 1 + rng.below(12));
    REQUIRE(extract_spans(tags) == ref_spans(tags));
  }
}

TEST_CASE("spans_to_bio then extract_spans is the identity (10000 cases)") {
  Rng rng(302);
  static const std::vector<std::string> types{"X", "Y", "Chemical", "Disease"};
  for (int iter = 0; iter < 10000; ++iter) {
    int len = 1 + rng.below(14);
    std::vector<EntitySpan> spans;
    int pos = 0;
    while (pos < len) {
      if (rng.bernoulli(0.45)) {
        int width = 1 + rng.below(std::min(3, len - pos));
        spans.push_back({pos, pos + width - 1,
                         types[static_cast<std::size_t>(rng.below(4))]});
        pos += width + 1;  // gap so adjacent same-type spans stay distinct
      } else {
        ++pos;
      }
    }
    std::vector<std::string> tags = spans_to_bio(spans, len);
    REQUIRE(extract_spans(tags) == spans);
  }
}

TEST_CASE("spans_to_bio keeps adjacent spans apart with a fresh B tag") {
  std::vector<EntitySpan> spans{{0, 1, "X"}, {2, 2, "X"}};
  std::vector<std::string> tags = spans_to_bio(spans, 4);
  CHECK(tags == std::vector<std::string>{"B-X", "I-X", "B-X", "O"});
  CHECK(extract_spans(tags) == spans);
}

TEST_CASE("spans_to_bio validates ranges and overlap") {
  CHECK_THROWS_AS(spans_to_bio({{0, 4, "X"}}, 4), DimError);
  CHECK_THROWS_AS(spans_to_bio({{-1, 0, "X"}}, 4), DimError);
  CHECK_THROWS_AS(spans_to_bio({{2, 1, "X"}}, 4), DimError);
  CHECK_THROWS_AS(spans_to_bio({{0, 1, "X"}, {1, 2, "Y"}}, 4), DimError);
  CHECK_THROWS_AS(spans_to_bio({{0, 1, ""}}, 4), DimError);
}

TEST_CASE("prf counts handle zero denominators") {
  PrfCounts none;
  CHECK(none.precision() == 0.0);
  CHECK(none.recall() == 0.0);
  CHECK(none.f1() == 0.0);
  PrfCounts only_fp{0, 3, 0};
  CHECK(only_fp.precision() == 0.0);
  CHECK(only_fp.recall() == 0.0);
  CHECK(only_fp.f1() == 0.0);
}

TEST_CASE("score reproduces a hand-computed P/R/F1") {
  //        0    1  2    3  4    5  6    7  8    9  10   11
  TagCorpus gold{{"B-X", "O", "B-X", "O", "B-X", "O", "B-Y", "O", "B-Y", "O", "O", "O"}};
  TagCorpus pred{{"B-X", "O", "B-X", "O", "O", "O", "B-Y", "O", "O", "O", "B-X", "O"}};
  EvalReport rep = score(gold, pred);
  CHECK(rep.overall.tp == 3);
  CHECK(rep.overall.fp == 1);
  CHECK(rep.overall.fn == 2);
  CHECK(rep.overall.precision() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(rep.overall.recall() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(rep.overall.f1() ==
        doctest::Approx(2.0 * 0.75 * 0.6 / (0.75 + 0.6)).epsilon(1e-15));
  CHECK(rep.per_category.at("X").tp == 2);
  CHECK(rep.per_category.at("X").fp == 1);
  CHECK(rep.per_category.at("X").fn == 1);
  CHECK(rep.per_category.at("Y").tp == 1);
  CHECK(rep.per_category.at("Y").fn == 1);
  // micro average pools counts, so overall == sum of category counts
  long tp = 0, fp = 0, fn = 0;
  for (const auto& [cat, c] : rep.per_category) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  CHECK(tp == rep.overall.tp);
  CHECK(fp == rep.overall.fp);
  CHECK(fn == rep.overall.fn);
}

TEST_CASE("exact-span matching counts boundary and type errors as fp plus fn") {
  EvalReport boundary = score({{"B-X", "I-X", "O"}}, {{"B-X", "O", "O"}});
  CHECK(boundary.overall.tp == 0);
  CHECK(boundary.overall.fp == 1);
  CHECK(boundary.overall.fn == 1);

  EvalReport type_err = score({{"B-X"}}, {{"B-Y"}});
  CHECK(type_err.overall.tp == 0);
  CHECK(type_err.overall.fp == 1);
  CHECK(type_err.overall.fn == 1);
  CHECK(type_err.per_category.count("X") == 1);  // gold category present
  CHECK(type_err.per_category.count("Y") == 1);  // fp category present
  CHECK(type_err.per_category.at("X").f1() == 0.0);
}

TEST_CASE("swapping gold and pred swaps precision and recall") {
  Rng rng(303);
  for (int iter = 0; iter < 100; ++iter) {
    TagCorpus a, b;
    for (int s = 0; s < 4; ++s) {
      int len = 1 + rng.below(10);
      a.push_back(random_tags(rng, len));
      b.push_back(random_tags(rng, len));
    }
    EvalReport ab = score(a, b);
    EvalReport ba = score(b, a);
    REQUIRE(ab.overall.tp == ba.overall.tp);
    REQUIRE(ab.overall.fp == ba.overall.fn);
    REQUIRE(ab.overall.fn == ba.overall.fp);
    REQUIRE(ab.overall.precision() == ba.overall.recall());
    REQUIRE(ab.overall.recall() == ba.overall.precision());
    REQUIRE(ab.overall.f1() == doctest::Approx(ba.overall.f1()).epsilon(1e-15));

    // count identities against the span extractors
    long gold_spans = 0, pred_spans = 0;
    for (const auto& t : a) gold_spans += static_cast<long>(extract_spans(t).size());
    for (const auto& t : b) pred_spans += static_cast<long>(extract_spans(t).size());
    REQUIRE(ab.overall.tp + ab.overall.fn == gold_spans);
    REQUIRE(ab.overall.tp + ab.overall.fp == pred_spans);
  }
}

TEST_CASE("spans never match across sentence boundaries") {
  // same flattened tags, different sentence split -> no true positive
  EvalReport rep = score({{"B-X", "I-X"}, {"O"}}, {{"B-X", "I-X"}, {"O"}});
  CHECK(rep.overall.tp == 1);
  EvalReport split = score({{"B-X", "I-X"}, {"O"}}, {{"B-X", "O"}, {"O"}});
  CHECK(split.overall.tp == 0);
}

TEST_CASE("score validates alignment") {
  CHECK_THROWS_AS(score({{"O"}}, {{"O"}, {"O"}}), DataError);
  CHECK_THROWS_AS(score({{"O", "O"}}, {{"O"}}), DataError);
  EvalReport empty = score({}, {});
  CHECK(empty.overall.f1() == 0.0);
}

TEST_CASE("report tables and json mention every category") {
  EvalReport rep = score({{"B-X", "O", "B-Y"}}, {{"B-X", "O", "O"}});
  std::string table = rep.to_table();
  CHECK(table.find("X") != std::string::npos);
  CHECK(table.find("Y") != std::string::npos);
  CHECK(table.find("Overall") != std::string::npos);
  std::string json = rep.to_json();
  CHECK(json.find("\"overall\"") != std::string::npos);
  CHECK(json.find("\"X\"") != std::string::npos);
}

TEST_CASE("compare_errors buckets word-level errors by surface length") {
  TagCorpus gold{{"B-X", "O", "B-Y", "O"}};
  TagCorpus a{{"O", "O", "B-Y", "B-X"}};
  TagCorpus b{{"O", "B-X", "B-Y", "O"}};
  std::vector<std::vector<std::string>> surfaces{
      {"ab", "abcde", "abcdefghij", "abcdefghijklmnopqrstuvwx"}};
  ErrorComparison cmp = compare_errors(gold, a, b, surfaces);

  CHECK(cmp.errors_a == 2);  // positions 0 (fn) and 3 (fp)
  CHECK(cmp.fn_a == 1);
  CHECK(cmp.fp_a == 1);
  CHECK(cmp.errors_b == 2);  // positions 0 (fn) and 1 (fp)
  CHECK(cmp.fn_b == 1);
  CHECK(cmp.fp_b == 1);
  CHECK(cmp.common == 1);  // position 0 wrong in both

  REQUIRE(cmp.bucket_a.size() == 4);  // [1,5) [5,10) [10,20) [20,inf)
  CHECK(cmp.bucket_a == std::vector<long>{1, 0, 0, 1});
  CHECK(cmp.bucket_b == std::vector<long>{1, 1, 0, 0});

  // a type confusion counts as an error but neither fp nor fn
  TagCorpus c{{"B-Y", "O", "B-Y", "O"}};
  ErrorComparison conf = compare_errors(gold, c, c, surfaces);
  CHECK(conf.errors_a == 1);
  CHECK(conf.fp_a == 0);
  CHECK(conf.fn_a == 0);
}

TEST_CASE("compare_errors length buckets use utf8 characters, not bytes") {
  TagCorpus gold{{"B-X"}};
  TagCorpus a{{"O"}};
  TagCorpus b{{"B-X"}};
  // four 2-byte characters: 8 bytes but 4 characters -> bucket [1,5)
  std::vector<std::vector<std::string>> surfaces{{"\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9"}};
  ErrorComparison cmp = compare_errors(gold, a, b, surfaces);
  CHECK(cmp.bucket_a == std::vector<long>{1, 0, 0, 0});
}

TEST_CASE("compare_errors validates shapes and edges") {
  TagCorpus g{{"O"}};
  std::vector<std::vector<std::string>> surf{{"w"}};
  CHECK_THROWS_AS(compare_errors(g, {}, g, surf), DataError);
  CHECK_THROWS_AS(compare_errors(g, {{"O", "O"}}, g, surf), DataError);
  CHECK_THROWS_AS(compare_errors(g, g, g, surf, {10, 5}), DimError);
  CHECK_THROWS_AS(compare_errors(g, g, g, surf, {0, 5}), DimError);
  ErrorComparison cmp = compare_errors(g, g, g, surf, {});
  CHECK(cmp.bucket_a == std::vector<long>{0});
}
