#include "isbst/analysis/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "isbst/error.hpp"

namespace isbst::analysis {
namespace {

// Twice the midrank of every pooled value, so ties stay integral.
std::vector<std::int64_t> doubled_ranks(const std::vector<double>& pooled, double& tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<std::int64_t> r(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // Ranks i+1 .. j+1 averaged, doubled.
    const auto twice_mid = static_cast<std::int64_t>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = twice_mid;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

double exact_p(const std::vector<std::int64_t>& ranks, std::size_t n1, std::int64_t observed) {
  // count[k][s]: subsets of size k with doubled-rank sum s.
  std::int64_t total = 0;
  for (const auto r : ranks) total += r;
  std::vector<std::vector<double>> count(n1 + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
  count[0][0] = 1.0;
  for (const auto r : ranks) {
    for (std::size_t k = n1; k >= 1; --k) {
      auto& dst = count[k];
      const auto& src = count[k - 1];
      for (std::int64_t s = total; s >= r; --s) dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
    }
  }
  double le = 0.0, ge = 0.0, all = 0.0;
  for (std::int64_t s = 0; s <= total; ++s) {
    const double c = count[n1][static_cast<std::size_t>(s)];
    all += c;
    if (s <= observed) le += c;
    if (s >= observed) ge += c;
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / all);
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b, PMethod method) {
  if (a.size() < 3 || b.size() < 3) throw Error(ErrorCode::kInvalidArgument, "Mann-Whitney needs at least 3 values per sample");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (const double v : pooled) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "Mann-Whitney sample contains a non-finite value");
  }
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
  double tie_term = 0.0;
  const auto ranks = doubled_ranks(pooled, tie_term);
  std::int64_t r1 = 0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];

  MannWhitneyResult res;
  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2), dn = static_cast<double>(n);
  res.u = static_cast<double>(r1) / 2.0 - dn1 * (dn1 + 1.0) / 2.0;
  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); })) {
    res.p = 1.0;
    res.method = method == PMethod::Auto ? PMethod::Exact : method;
    return res;
  }

  if (method == PMethod::Auto) method = (n1 <= kExactLimit && n2 <= kExactLimit) ? PMethod::Exact : PMethod::Normal;
  res.method = method;
  if (method == PMethod::Exact) {
    res.p = exact_p(ranks, n1, r1);
    return res;
  }
  const double mu = dn1 * dn2 / 2.0;
  const double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(var > 0.0)) {
    res.p = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::abs(res.u - mu) - 0.5) / std::sqrt(var);
  res.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

}  // namespace isbst::analysis
