// Copyright 2026 The specguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "specguard/ks.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "specguard/error.h"
#include "specguard/schema.h"

namespace specguard {
namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

std::uint64_t parse_u64(const std::string& field, int base,
                        std::size_t line_no, const char* what) {
  if (field.empty()) throw ParseError(line_no, std::string("empty ") + what);
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(field, &pos, base);
  } catch (const std::exception&) {
    throw ParseError(line_no, std::string("bad ") + what + " '" + field + "'");
  }
  if (pos != field.size() || field.front() == '-')
    throw ParseError(line_no, std::string("bad ") + what + " '" + field + "'");
  return v;
}

BranchId parse_branch_id(const std::string& field, std::size_t line_no) {
  if (field.size() > 2 && field[0] == '0' && (field[1] == 'x' || field[1] == 'X'))
    return parse_u64(field.substr(2), 16, line_no, "branch_id");
  return parse_u64(field, 10, line_no, "branch_id");
}

// Cumulative-count sweep over the pooled support. Returns max |ca*m - cb*n|,
// i.e. D scaled by n*m.
std::uint64_t scaled_statistic(std::vector<std::uint64_t> a,
                               std::vector<std::uint64_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto n = static_cast<std::int64_t>(a.size());
  const auto m = static_cast<std::int64_t>(b.size());
  std::size_t i = 0, j = 0;
  std::int64_t best = 0;
  while (i < a.size() || j < b.size()) {
    std::uint64_t v;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) v = a[i];
    else v = b[j];
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    const std::int64_t gap = static_cast<std::int64_t>(i) * m -
                             static_cast<std::int64_t>(j) * n;
    best = std::max(best, gap < 0 ? -gap : gap);
  }
  return static_cast<std::uint64_t>(best);
}

// Exact permutation p-value. Only the number of a-labels that land in each
// tie block of the pooled sample matters, so the count of relabellings whose
// statistic stays strictly below the observed one is a lattice-path count
// over block boundaries, weighted by binomial coefficients within blocks.
double exact_p_value(const std::vector<std::uint64_t>& a,
                     const std::vector<std::uint64_t>& b,
                     std::uint64_t observed) {
  const std::size_t n = a.size(), m = b.size(), total = n + m;
  std::vector<std::uint64_t> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());

  std::vector<std::vector<std::uint64_t>> choose(total + 1);
  for (std::size_t r = 0; r <= total; ++r) {
    choose[r].assign(r + 1, 1);
    for (std::size_t c = 1; c < r; ++c)
      choose[r][c] = choose[r - 1][c - 1] + choose[r - 1][c];
  }

  // ways[i]: relabellings of the prefix with i a-labels, all block ends so
  // far below the observed statistic.
  std::vector<std::uint64_t> ways(n + 1, 0), next(n + 1);
  ways[0] = 1;
  std::size_t seen = 0;
  for (std::size_t start = 0; start < total;) {
    std::size_t end = start;
    while (end < total && pooled[end] == pooled[start]) ++end;
    const std::size_t block = end - start;
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (ways[i] == 0) continue;
      for (std::size_t x = 0; x <= block && i + x <= n; ++x) {
        const std::size_t ia = i + x;
        const std::size_t jb = seen + block - ia;
        if (jb > m) continue;
        const std::int64_t gap = static_cast<std::int64_t>(ia * m) -
                                 static_cast<std::int64_t>(jb * n);
        if (static_cast<std::uint64_t>(std::llabs(gap)) >= observed) continue;
        next[ia] += ways[i] * choose[block][x];
      }
    }
    ways.swap(next);
    seen = end;
    start = end;
  }
  const std::uint64_t all = choose[total][n];
  return static_cast<double>(all - ways[n]) / static_cast<double>(all);
}

}  // namespace

void BranchHistogram::add(BranchId branch, std::uint64_t count) {
  if (count == 0) return;
  entries_[branch] += count;
  total_ += count;
}

BranchHistogram parse_histogram_csv(std::istream& in) {
  BranchHistogram h;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (is_comment_line(line)) {
      if (header_seen) throw ParseError(line_no, "comment after header");
      check_schema_line(line, "histogram", line_no);
      continue;
    }
    if (!header_seen) {
      if (line != "branch_id,mispredictions")
        throw ParseError(line_no, "expected header 'branch_id,mispredictions'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ParseError(line_no, "expected two columns");
    const BranchId id = parse_branch_id(trim(line.substr(0, comma)), line_no);
    const std::uint64_t count =
        parse_u64(trim(line.substr(comma + 1)), 10, line_no, "mispredictions");
    if (count == 0)
      throw InvariantViolation("mispredictions",
                               "line " + std::to_string(line_no) + ": zero count");
    if (h.entries().count(id))
      throw InvariantViolation("branch_id", "line " + std::to_string(line_no) +
                                                ": duplicate branch");
    h.add(id, count);
  }
  return h;
}

BranchHistogram load_histogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open histogram '" + path.string() + "'");
  return parse_histogram_csv(in);
}

std::string emit_histogram_csv(const BranchHistogram& h) {
  std::ostringstream out;
  out << schema_line("histogram") << "\n";
  out << "branch_id,mispredictions\n";
  for (const auto& [id, count] : h.entries())
    out << "0x" << std::hex << id << std::dec << ',' << count << '\n';
  return out.str();
}

std::vector<std::uint64_t> top_branches(const BranchHistogram& h,
                                        std::size_t k) {
  if (k == 0) throw InputError("k must be at least 1");
  if (h.empty()) throw EmptyHistogram();
  std::vector<std::pair<std::uint64_t, BranchId>> ranked;
  ranked.reserve(h.size());
  for (const auto& [id, count] : h.entries()) ranked.emplace_back(count, id);
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  const std::size_t keep = std::min(k, ranked.size());
  std::vector<std::uint64_t> out(keep);
  for (std::size_t i = 0; i < keep; ++i) out[i] = ranked[i].first;
  return out;
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0)) return 1.0;
  const double l2 = -2.0 * lambda * lambda;
  double sum = 0;
  double sign = 1;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * sign * std::exp(l2 * k * k);
    sum += term;
    if (std::abs(term) < 1e-12) return std::clamp(sum, 0.0, 1.0);
    sign = -sign;
  }
  return 1.0;
}

KsResult ks_two_sample(std::span<const std::uint64_t> a,
                       std::span<const std::uint64_t> b, KsMode mode) {
  if (a.empty() || b.empty()) throw EmptySample();
  const std::size_t n = a.size(), m = b.size();
  if (mode == KsMode::kExact && n + m > kExactModeLimit)
    throw ExactModeTooLarge(n + m);

  std::vector<std::uint64_t> va(a.begin(), a.end()), vb(b.begin(), b.end());
  const std::uint64_t scaled = scaled_statistic(va, vb);

  KsResult r;
  r.n = n;
  r.m = m;
  r.statistic = static_cast<double>(scaled) / static_cast<double>(n * m);
  if (mode == KsMode::kExact) {
    r.p_value = scaled == 0 ? 1.0 : exact_p_value(va, vb, scaled);
  } else {
    const double nd = static_cast<double>(n), md = static_cast<double>(m);
    r.p_value = kolmogorov_survival(r.statistic * std::sqrt(nd * md / (nd + md)));
  }
  return r;
}

KsVerdict classify_ks(const BranchHistogram& hist,
                      const BranchHistogram& attack_template, double alpha,
                      std::size_t k) {
  if (!(alpha > 0 && alpha < 1)) throw InputError("alpha must be in (0, 1)");
  const auto subject = top_branches(hist, k);
  const auto tmpl = top_branches(attack_template, k);
  KsVerdict v;
  v.ks = ks_two_sample(subject, tmpl);
  v.alpha = alpha;
  v.k_effective = subject.size();
  v.suspect = v.ks.p_value >= alpha;
  return v;
}

}  // namespace specguard
