#pragma once

// Brute-force reference implementations used by the unit and acceptance
// suites. They deliberately avoid the library's data structures and
// summation order: n-grams are counted by rescanning, scores are combined
// with pow() instead of exp/log sums, top-k is a full sort over plainly
// accumulated dot products, and LFGT sets are built by linear search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

inline bool same_ngram(const Tokens& a, std::size_t i, const Tokens& b, std::size_t j, std::size_t n) {
  for (std::size_t t = 0; t < n; ++t) {
    if (a[i + t] != b[j + t]) return false;
  }
  return true;
}

inline std::size_t occurrences(const Tokens& haystack, const Tokens& src, std::size_t at, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t j = 0; j + n <= haystack.size(); ++j) {
    if (same_ngram(haystack, j, src, at, n)) ++count;
  }
  return count;
}

struct Counts {
  std::uint64_t matches[4] = {0, 0, 0, 0};
  std::uint64_t cand_total[4] = {0, 0, 0, 0};
  std::uint64_t ref_total[4] = {0, 0, 0, 0};
  std::uint64_t c = 0;
  std::uint64_t r = 0;
};

inline Counts count(const Tokens& cand, const Tokens& ref) {
  Counts out;
  out.c = cand.size();
  out.r = ref.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
      ++out.cand_total[n - 1];
      bool first = true;
      for (std::size_t j = 0; j < i; ++j) {
        if (same_ngram(cand, j, cand, i, n)) {
          first = false;
          break;
        }
      }
      if (!first) continue;
      out.matches[n - 1] += std::min(occurrences(cand, cand, i, n), occurrences(ref, cand, i, n));
    }
    if (ref.size() >= n) out.ref_total[n - 1] = ref.size() - n + 1;
  }
  return out;
}

/// Score in [0, 100]; `add_one` smooths zero-match orders n >= 2.
inline double bleu_from(const Counts& k, bool add_one) {
  if (k.c == 0) return 0.0;
  double product = 1.0;
  for (int n = 0; n < 4; ++n) {
    double p;
    if (k.cand_total[n] == 0 && k.ref_total[n] == 0) {
      p = 1.0;
    } else if (k.matches[n] == 0) {
      if (!add_one || n == 0) return 0.0;
      p = 1.0 / (static_cast<double>(k.cand_total[n]) + 1.0);
    } else {
      p = static_cast<double>(k.matches[n]) / static_cast<double>(k.cand_total[n]);
    }
    product *= p;
  }
  const double bp = k.c < k.r ? std::exp(1.0 - static_cast<double>(k.r) / static_cast<double>(k.c)) : 1.0;
  return 100.0 * bp * std::pow(product, 0.25);
}

inline double sentence_bleu(const Tokens& cand, const Tokens& ref, bool add_one) {
  return bleu_from(count(cand, ref), add_one);
}

inline double corpus_bleu(const std::vector<std::pair<Tokens, Tokens>>& pairs) {
  Counts total;
  for (const auto& [cand, ref] : pairs) {
    const Counts k = count(cand, ref);
    for (int n = 0; n < 4; ++n) {
      total.matches[n] += k.matches[n];
      total.cand_total[n] += k.cand_total[n];
      total.ref_total[n] += k.ref_total[n];
    }
    total.c += k.c;
    total.r += k.r;
  }
  return bleu_from(total, false);
}

/// Full sort by (float score desc, id asc) with a sequential double dot.
inline std::vector<std::string> topk_dense(const std::vector<std::string>& ids, const std::vector<std::vector<float>>& rows,
                                           const std::vector<float>& query, std::size_t k) {
  std::vector<std::pair<float, std::string>> scored;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double s = 0.0;
    for (std::size_t d = 0; d < query.size(); ++d) s += static_cast<double>(rows[i][d]) * static_cast<double>(query[d]);
    scored.emplace_back(static_cast<float>(s), ids[i]);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

/// Per-threshold count of distinct tokens present in both sequences whose
/// frequency (0 when unseen) is <= the threshold.
inline std::vector<std::uint64_t> lfgt(const std::vector<Tokens>& cands, const std::vector<Tokens>& refs,
                                       const std::map<std::string, std::uint64_t>& freq,
                                       const std::vector<std::uint64_t>& thresholds) {
  std::vector<std::uint64_t> counts(thresholds.size(), 0);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    Tokens seen;
    for (const std::string& t : cands[i]) {
      if (std::find(seen.begin(), seen.end(), t) != seen.end()) continue;
      seen.push_back(t);
      if (std::find(refs[i].begin(), refs[i].end(), t) == refs[i].end()) continue;
      auto it = freq.find(t);
      const std::uint64_t f = it == freq.end() ? 0 : it->second;
      for (std::size_t x = 0; x < thresholds.size(); ++x) {
        if (f <= thresholds[x]) ++counts[x];
      }
    }
  }
  return counts;
}

/// Random word sequence over a small vocabulary so n-gram overlaps happen.
inline Tokens random_tokens(std::mt19937_64& rng, std::size_t max_len, std::size_t vocab) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  Tokens out(len(rng));
  for (auto& t : out) t = "w" + std::to_string(word(rng));
  return out;
}

}  // namespace oracle
