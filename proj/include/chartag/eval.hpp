#pragma once

#include <map>
#include <string>
#include <vector>

namespace chartag {

struct EntitySpan {
  int start = 0;  // inclusive token indices
  int end = 0;
  std::string type;

  auto operator<=>(const EntitySpan&) const = default;
};

// Maximal B-X (I-X)* runs. Stray I-X starts a new span (repair policy) and
// an I-Y following an X span ends X and starts Y. Throws DataError on tags
// that are not O / B-X / I-X.
std::vector<EntitySpan> extract_spans(const std::vector<std::string>& tags);

// Writes non-overlapping sorted spans back to BIO tags of the given length.
// Throws DimError on overlap or out-of-range spans.
std::vector<std::string> spans_to_bio(const std::vector<EntitySpan>& spans, int length);

struct PrfCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

struct EvalReport {
  std::map<std::string, PrfCounts> per_category;
  PrfCounts overall;  // micro average: counts pooled across categories

  std::string to_table() const;
  std::string to_json() const;
};

using TagCorpus = std::vector<std::vector<std::string>>;

// Exact-span micro-averaged scoring. Throws DataError when sentence counts
// or per-sentence lengths differ.
EvalReport score(const TagCorpus& gold, const TagCorpus& pred);

struct ErrorComparison {
  long errors_a = 0;
  long errors_b = 0;
  long common = 0;
  long fp_a = 0, fn_a = 0;  // word level: fp = gold O but tagged, fn = gold entity but O
  long fp_b = 0, fn_b = 0;
  std::vector<int> bucket_edges;     // length buckets: [1,e0), [e0,e1), ..., [ek,inf)
  std::vector<long> bucket_a, bucket_b;

  std::string to_table() const;
  std::string to_json() const;
};

// Word-level error comparison of two predictions against gold, with error
// counts bucketed by surface length in characters.
ErrorComparison compare_errors(const TagCorpus& gold, const TagCorpus& pred_a,
                               const TagCorpus& pred_b,
                               const std::vector<std::vector<std::string>>& surfaces,
                               std::vector<int> bucket_edges = {5, 10, 20});

}  // namespace chartag
