#pragma once

#include <span>
#include <string>

namespace quadlab::harness {

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 when n == 1
  double median = 0.0;
  double best = 0.0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

// Throws InputError on an empty list.
Summary summarize(std::span<const double> returns);

// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

}  // namespace quadlab::harness
