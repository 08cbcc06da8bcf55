#include "neass/switching.hpp"

#include "neass/core.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>
#include <vector>

namespace neass {

namespace {

double bump(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / x - 1.0 / (1.0 - x));
}

// Cumulative integrals on a uniform grid, refined per call with a fixed
// Gauss rule on the last partial cell.
constexpr int kCells = 256;

const std::vector<double>& cumulative_table() {
  static const std::vector<double> table = [] {
    using boost::math::quadrature::gauss_kronrod;
    std::vector<double> out(kCells + 1, 0.0);
    for (int k = 0; k < kCells; ++k) {
      const double a = static_cast<double>(k) / kCells, b = static_cast<double>(k + 1) / kCells;
      out[k + 1] = out[k] + gauss_kronrod<double, 31>::integrate(bump, a, b, 5, 1e-14);
    }
    return out;
  }();
  return table;
}

double bump_integral(double upper) {
  if (upper <= 0.0) return 0.0;
  upper = std::min(upper, 1.0);
  const auto& table = cumulative_table();
  const int k = std::min(kCells - 1, static_cast<int>(upper * kCells));
  const double a = static_cast<double>(k) / kCells;
  if (upper == a) return table[k];
  return table[k] + boost::math::quadrature::gauss<double, 15>::integrate(bump, a, upper);
}

double bump_normalization() {
  return cumulative_table()[kCells];
}

}  // namespace

double smooth_step(double x, int order) {
  const double z = bump_normalization();
  switch (order) {
    case 0:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      // Integrate from the nearer endpoint; the profile is symmetric.
      if (x > 0.5) return 1.0 - bump_integral(1.0 - x) / z;
      return bump_integral(x) / z;
    case 1:
      return bump(x) / z;
    case 2: {
      if (x <= 0.0 || x >= 1.0) return 0.0;
      return bump(x) * (1.0 / (x * x) - 1.0 / ((1.0 - x) * (1.0 - x))) / z;
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "smooth_step derivative order > 2");
  }
}

double evaluate(const Switching& f, double t, int order) {
  if (order < 0 || order > 2) throw Error(ErrorCode::InvalidArgument, "derivative order must be 0..2");
  struct Visitor {
    double t;
    int order;
    double operator()(const switching::Constant& c) const { return order == 0 ? c.value : 0.0; }
    double operator()(const switching::Ramp& r) const {
      const double width = r.end - r.start;
      if (width <= 0.0) throw Error(ErrorCode::InvalidArgument, "ramp needs end > start");
      const double x = (t - r.start) / width;
      const double scale = std::pow(width, -order);
      if (order == 0) return r.from + (r.to - r.from) * smooth_step(x, 0);
      return (r.to - r.from) * scale * smooth_step(x, order);
    }
    double operator()(const switching::Linear& l) const {
      if (order == 0) return l.offset + l.slope * t;
      return order == 1 ? l.slope : 0.0;
    }
    double operator()(const switching::Sine& s) const {
      const double arg = s.omega * t + s.phase;
      if (order == 0) return s.amplitude * std::sin(arg);
      if (order == 1) return s.amplitude * s.omega * std::cos(arg);
      return -s.amplitude * s.omega * s.omega * std::sin(arg);
    }
  };
  return std::visit(Visitor{t, order}, f);
}

std::string describe(const Switching& f) {
  std::ostringstream os;
  os.precision(17);
  struct Visitor {
    std::ostringstream& os;
    void operator()(const switching::Constant& c) const { os << "constant " << c.value; }
    void operator()(const switching::Ramp& r) const {
      os << "ramp " << r.start << ' ' << r.end << ' ' << r.from << ' ' << r.to;
    }
    void operator()(const switching::Linear& l) const { os << "linear " << l.slope << ' ' << l.offset; }
    void operator()(const switching::Sine& s) const {
      os << "sine " << s.amplitude << ' ' << s.omega << ' ' << s.phase;
    }
  };
  std::visit(Visitor{os}, f);
  return os.str();
}

bool constant_on(const Switching& f, double a, double b) {
  struct Visitor {
    double a, b;
    bool operator()(const switching::Constant&) const { return true; }
    bool operator()(const switching::Ramp& r) const { return b <= r.start || a >= r.end || r.from == r.to; }
    bool operator()(const switching::Linear& l) const { return l.slope == 0.0; }
    bool operator()(const switching::Sine& s) const { return s.amplitude == 0.0 || s.omega == 0.0; }
  };
  return std::visit(Visitor{a, b}, f);
}

std::vector<double> breakpoints(const Switching& f) {
  if (const auto* r = std::get_if<switching::Ramp>(&f)) return {r->start, r->end};
  return {};
}

}  // namespace neass
