#include "quadlab/harness/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "quadlab/errors.hpp"

namespace quadlab::harness {

Summary summarize(std::span<const double> returns) {
  if (returns.empty()) throw InputError("summarize: empty list");
  const double n = static_cast<double>(returns.size());
  Summary s;
  double total = 0.0;
  for (const double r : returns) total += r;
  s.mean = total / n;
  if (returns.size() > 1) {
    double sq = 0.0;
    for (const double r : returns) sq += (r - s.mean) * (r - s.mean);
    s.std = std::sqrt(sq / (n - 1.0));
  }
  std::vector<double> sorted(returns.begin(), returns.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  s.best = sorted.back();
  return s;
}

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace quadlab::harness
