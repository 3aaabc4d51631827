#include "cli_parse.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "cpoly/error.hpp"

namespace cpoly::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

std::int64_t to_int(const std::string& s) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw InvalidArgument("not an integer: '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

// Argument inside name(...), or empty when there are no parentheses.
bool call_form(const std::string& text, const std::string& name, std::string& arg) {
  if (text.rfind(name + "(", 0) != 0 || text.back() != ')') return false;
  arg = text.substr(name.size() + 1, text.size() - name.size() - 2);
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto parts = split(text, '/');
  if (parts.size() == 1) return {to_int(parts[0]), 1};
  if (parts.size() == 2) {
    const std::int64_t den = to_int(parts[1]);
    if (den <= 0) throw InvalidArgument("rational needs a positive denominator: '" + text + "'");
    return {to_int(parts[0]), den};
  }
  throw InvalidArgument("bad rational '" + text + "'");
}

ChargeLaw parse_law(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "rademacher") return ChargeLaw::rademacher();
  if (text == "gaussian") return ChargeLaw::gaussian();
  if (text == "uniform") return ChargeLaw::uniform();
  std::string arg;
  if (call_form(text, "three_point", arg)) return ChargeLaw::three_point(static_cast<int>(to_int(trim(arg))));
  if (call_form(text, "lattice", arg)) {
    std::vector<Rational> values;
    std::vector<Rational> probs;
    for (const auto& atom : split(arg, ',')) {
      const auto vp = split(atom, ':');
      if (vp.size() != 2) throw InvalidArgument("lattice atom must be value:probability, got '" + atom + "'");
      values.push_back(parse_rational(vp[0]));
      probs.push_back(parse_rational(vp[1]));
    }
    return ChargeLaw::finite_lattice(std::move(values), std::move(probs));
  }
  throw InvalidArgument("unknown law '" + text +
                        "' (expected rademacher, gaussian, uniform, three_point(N) or lattice(v:p,...))");
}

std::vector<std::int64_t> parse_ladder(const std::string& text) {
  std::vector<std::int64_t> out;
  const auto colon = split(text, ':');
  if (colon.size() == 2) {
    const std::int64_t a = to_int(colon[0]);
    const std::int64_t b = to_int(colon[1]);
    if (a < 1 || b < a) throw InvalidArgument("ladder a:b needs 1 <= a <= b");
    for (std::int64_t n = a; n <= b; n *= 2) out.push_back(n);
    return out;
  }
  if (colon.size() != 1) throw InvalidArgument("bad ladder '" + text + "'");
  for (const auto& item : split(text, ',')) out.push_back(to_int(item));
  if (out.empty()) throw InvalidArgument("empty ladder");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const auto colon = split(text, ':');
  if (colon.size() == 3) {
    const double lo = to_double(colon[0]);
    const double hi = to_double(colon[1]);
    const double step = to_double(colon[2]);
    if (!(step > 0) || hi < lo) throw InvalidArgument("grid lo:hi:step needs step > 0 and hi >= lo");
    const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
  if (colon.size() != 1) throw InvalidArgument("bad grid '" + text + "'");
  for (const auto& item : split(text, ',')) out.push_back(to_double(item));
  if (out.empty()) throw InvalidArgument("empty grid");
  return out;
}

}  // namespace cpoly::cli
