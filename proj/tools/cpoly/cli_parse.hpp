#pragma once

// Parsers for the textual forms accepted on the command line.

#include <cstdint>
#include <string>
#include <vector>

#include "cpoly/charge_model.hpp"

namespace cpoly::cli {

/// "rademacher", "gaussian", "uniform", "three_point(N)" or
/// "lattice(v:p,v:p,...)" with v and p integers or fractions a/b.
ChargeLaw parse_law(const std::string& text);

/// "a:b" doubles from a up to b; otherwise a comma list of integers.
std::vector<std::int64_t> parse_ladder(const std::string& text);

/// "lo:hi:step" (inclusive, step > 0); otherwise a comma list.
std::vector<double> parse_grid(const std::string& text);

Rational parse_rational(const std::string& text);

}  // namespace cpoly::cli
