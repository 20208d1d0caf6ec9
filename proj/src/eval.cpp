#include "chartag/eval.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "chartag/error.hpp"
#include "chartag/util.hpp"

namespace chartag {

std::vector<EntitySpan> extract_spans(const std::vector<std::string>& tags) {
  std::vector<EntitySpan> spans;
  int open = -1;  // start of the span being built
  std::string open_type;

  auto close = [&](int end) {
    if (open >= 0) spans.push_back({open, end, open_type});
    open = -1;
  };

  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    const std::string& tag = tags[static_cast<std::size_t>(i)];
    if (tag == "O") {
      close(i - 1);
      continue;
    }
    if (tag.size() <= 2 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') {
      throw DataError("extract_spans: unknown BIO tag '" + tag + "' at position " + std::to_string(i));
    }
    std::string type = tag.substr(2);
    if (tag[0] == 'B' || open < 0 || type != open_type) {
      close(i - 1);
      open = i;
      open_type = type;
    }
    // else: I-X continuing the open X span
  }
  close(static_cast<int>(tags.size()) - 1);
  return spans;
}

std::vector<std::string> spans_to_bio(const std::vector<EntitySpan>& spans, int length) {
  if (length < 0) throw DimError("spans_to_bio: negative length");
  std::vector<std::string> tags(static_cast<std::size_t>(length), "O");
  std::vector<EntitySpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end());
  int prev_end = -1;
  for (const auto& s : sorted) {
    if (s.start > s.end || s.start < 0 || s.end >= length) {
      throw DimError("spans_to_bio: span [" + std::to_string(s.start) + "," +
                     std::to_string(s.end) + "] out of range for length " + std::to_string(length));
    }
    if (s.start <= prev_end) throw DimError("spans_to_bio: overlapping spans");
    if (s.type.empty()) throw DimError("spans_to_bio: empty span type");
    tags[static_cast<std::size_t>(s.start)] = "B-" + s.type;
    for (int i = s.start + 1; i <= s.end; ++i) tags[static_cast<std::size_t>(i)] = "I-" + s.type;
    prev_end = s.end;
  }
  return tags;
}

EvalReport score(const TagCorpus& gold, const TagCorpus& pred) {
  if (gold.size() != pred.size()) {
    throw DataError("score: gold has " + std::to_string(gold.size()) + " sentences, pred has " +
                    std::to_string(pred.size()));
  }
  EvalReport rep;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) {
      throw DataError("score: sentence " + std::to_string(s) + " length mismatch (" +
                      std::to_string(gold[s].size()) + " vs " + std::to_string(pred[s].size()) + ")");
    }
    std::vector<EntitySpan> gs = extract_spans(gold[s]);
    std::vector<EntitySpan> ps = extract_spans(pred[s]);
    std::set<EntitySpan> gset(gs.begin(), gs.end());
    for (const auto& sp : gs) rep.per_category[sp.type];  // ensure categories appear
    for (const auto& sp : ps) {
      if (gset.count(sp)) {
        rep.per_category[sp.type].tp += 1;
      } else {
        rep.per_category[sp.type].fp += 1;
      }
    }
    std::set<EntitySpan> pset(ps.begin(), ps.end());
    for (const auto& sp : gs) {
      if (!pset.count(sp)) rep.per_category[sp.type].fn += 1;
    }
  }
  for (const auto& [type, c] : rep.per_category) {
    rep.overall.tp += c.tp;
    rep.overall.fp += c.fp;
    rep.overall.fn += c.fn;
  }
  return rep;
}

namespace {

std::string fmt_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%7.2f", 100.0 * v);
  return buf;
}

void json_counts(std::ostringstream& os, const PrfCounts& c) {
  os << "{\"tp\":" << c.tp << ",\"fp\":" << c.fp << ",\"fn\":" << c.fn
     << ",\"precision\":" << c.precision() << ",\"recall\":" << c.recall()
     << ",\"f1\":" << c.f1() << "}";
}

}  // namespace

std::string EvalReport::to_table() const {
  std::ostringstream os;
  os << "category        TP     FP     FN       P       R      F1\n";
  auto row = [&](const std::string& name, const PrfCounts& c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-12s %5ld  %5ld  %5ld ", name.c_str(), c.tp, c.fp, c.fn);
    os << buf << fmt_pct(c.precision()) << " " << fmt_pct(c.recall()) << " " << fmt_pct(c.f1()) << "\n";
  };
  for (const auto& [type, c] : per_category) row(type, c);
  row("Overall", overall);
  return os.str();
}

std::string EvalReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"categories\":{";
  bool first = true;
  for (const auto& [type, c] : per_category) {
    if (!first) os << ",";
    first = false;
    os << "\"" << type << "\":";
    json_counts(os, c);
  }
  os << "},\"overall\":";
  json_counts(os, overall);
  os << "}";
  return os.str();
}

ErrorComparison compare_errors(const TagCorpus& gold, const TagCorpus& pred_a,
                               const TagCorpus& pred_b,
                               const std::vector<std::vector<std::string>>& surfaces,
                               std::vector<int> bucket_edges) {
  if (gold.size() != pred_a.size() || gold.size() != pred_b.size() || gold.size() != surfaces.size()) {
    throw DataError("compare_errors: corpus sizes differ");
  }
  if (!std::is_sorted(bucket_edges.begin(), bucket_edges.end()) ||
      (!bucket_edges.empty() && bucket_edges.front() < 1)) {
    throw DimError("compare_errors: bucket edges must be sorted and >= 1");
  }

  ErrorComparison cmp;
  cmp.bucket_edges = bucket_edges;
  cmp.bucket_a.assign(bucket_edges.size() + 1, 0);
  cmp.bucket_b.assign(bucket_edges.size() + 1, 0);

  auto bucket_of = [&](int len) {
    std::size_t b = 0;
    while (b < bucket_edges.size() && len >= bucket_edges[b]) ++b;
    return b;
  };

  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& g = gold[s];
    if (pred_a[s].size() != g.size() || pred_b[s].size() != g.size() || surfaces[s].size() != g.size()) {
      throw DataError("compare_errors: sentence " + std::to_string(s) + " length mismatch");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      bool err_a = pred_a[s][i] != g[i];
      bool err_b = pred_b[s][i] != g[i];
      int len = static_cast<int>(utf8_chars(surfaces[s][i]).size());
      if (err_a) {
        cmp.errors_a += 1;
        cmp.bucket_a[bucket_of(len)] += 1;
        if (g[i] == "O") cmp.fp_a += 1;
        if (g[i] != "O" && pred_a[s][i] == "O") cmp.fn_a += 1;
      }
      if (err_b) {
        cmp.errors_b += 1;
        cmp.bucket_b[bucket_of(len)] += 1;
        if (g[i] == "O") cmp.fp_b += 1;
        if (g[i] != "O" && pred_b[s][i] == "O") cmp.fn_b += 1;
      }
      if (err_a && err_b) cmp.common += 1;
    }
  }
  return cmp;
}

namespace {

std::string bucket_label(const std::vector<int>& edges, std::size_t b) {
  int lo = b == 0 ? 1 : edges[b - 1];
  if (b == edges.size()) return ">=" + std::to_string(lo);
  return std::to_string(lo) + "-" + std::to_string(edges[b] - 1);
}

}  // namespace

std::string ErrorComparison::to_table() const {
  std::ostringstream os;
  os << "word-level errors: A=" << errors_a << " B=" << errors_b << " common=" << common << "\n";
  os << "A: FP=" << fp_a << " FN=" << fn_a << "   B: FP=" << fp_b << " FN=" << fn_b << "\n";
  os << "length    errors-A  errors-B\n";
  for (std::size_t b = 0; b < bucket_a.size(); ++b) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-8s %9ld %9ld\n", bucket_label(bucket_edges, b).c_str(),
                  bucket_a[b], bucket_b[b]);
    os << buf;
  }
  return os.str();
}

std::string ErrorComparison::to_json() const {
  std::ostringstream os;
  os << "{\"errors_a\":" << errors_a << ",\"errors_b\":" << errors_b << ",\"common\":" << common
     << ",\"fp_a\":" << fp_a << ",\"fn_a\":" << fn_a << ",\"fp_b\":" << fp_b << ",\"fn_b\":" << fn_b
     << ",\"buckets\":[";
  for (std::size_t b = 0; b < bucket_a.size(); ++b) {
    if (b) os << ",";
    os << "{\"length\":\"" << bucket_label(bucket_edges, b) << "\",\"a\":" << bucket_a[b]
       << ",\"b\":" << bucket_b[b] << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace chartag
