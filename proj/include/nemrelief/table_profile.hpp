#pragma once

#include <cmath>
// Boost 1.74 pchip calls isnan unqualified on double.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nemrelief {

// Monotone cubic (pchip) interpolant of a sampled profile. Outside the
// sampled range the value is held at the end value with zero slope.
class TableProfile {
 public:
  TableProfile(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("profile table: column lengths differ");
    if (xs.size() < 4) throw std::invalid_argument("profile table: need at least four rows");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("profile table: abscissae must increase strictly");
    lo_ = xs.front();
    hi_ = xs.back();
    ylo_ = ys.front();
    yhi_ = ys.back();
    interp_ = std::make_shared<Interp>(std::move(xs), std::move(ys));
  }

  double operator()(double x) const {
    if (x <= lo_) return ylo_;
    if (x >= hi_) return yhi_;
    return (*interp_)(x);
  }
  double prime(double x) const {
    if (x < lo_ || x > hi_) return 0.0;
    return interp_->prime(x);
  }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  using Interp = boost::math::interpolators::pchip<std::vector<double>>;
  std::shared_ptr<Interp> interp_;
  double lo_, hi_, ylo_, yhi_;
};

// Two-column CSV with the exact header given, e.g. "x0,phi0".
inline std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(std::istream& in,
                                                                               const std::string& header) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("profile csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::invalid_argument("profile csv: expected header '" + header + "', got '" + line + "'");
  std::vector<double> a, b;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("profile csv: missing comma on line " + std::to_string(lineno));
    try {
      std::size_t used = 0;
      const std::string sa = line.substr(0, comma), sb = line.substr(comma + 1);
      a.push_back(std::stod(sa, &used));
      if (used != sa.size()) throw std::invalid_argument("trailing characters");
      b.push_back(std::stod(sb, &used));
      if (used != sb.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("profile csv: bad number on line " + std::to_string(lineno));
    }
  }
  return {std::move(a), std::move(b)};
}

}  // namespace nemrelief
