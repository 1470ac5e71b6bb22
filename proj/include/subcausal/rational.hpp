#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace subcausal {

// Exact probability arithmetic. Tables are stored as rationals so that
// equalities like a(x_I, x_J) = a(x_I) a(x_J) can be checked without
// rounding slack; solvers work on a double view.
using Rat = boost::multiprecision::cpp_rational;

// Error with a stable machine-readable kind ("undefined-conditional",
// "no-scr", "missing-data", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Parses "3/4", "-1/8", "0.25", "1". Decimal strings are exact
// (e.g. "0.2" -> 1/5), which is what model files rely on.
Rat rat_from_string(std::string_view s);

std::string rat_to_string(const Rat& r);

}  // namespace subcausal
