#pragma once

#include <string>
#include <variant>
#include <vector>

namespace neass {

/// Smooth scalar time profiles multiplying fixed interactions. All time
/// dependence of a Hamiltonian enters through these, so derivatives are exact.
namespace switching {

struct Constant {
  double value = 1.0;
};

/// from + (to - from) * F((t - start)/(end - start)), where F is the normalized
/// integral of the bump exp(-1/x) exp(-1/(1-x)) on [0,1]; constant outside.
struct Ramp {
  double start = 0.0;
  double end = 1.0;
  double from = 0.0;
  double to = 1.0;
};

struct Linear {
  double slope = 1.0;
  double offset = 0.0;
};

struct Sine {
  double amplitude = 1.0;
  double omega = 1.0;
  double phase = 0.0;
};

}  // namespace switching

using Switching = std::variant<switching::Constant, switching::Ramp, switching::Linear, switching::Sine>;

/// d^order/dt^order of the profile at t, order in {0, 1, 2}.
double evaluate(const Switching& f, double t, int order = 0);

/// Normalized smooth step F on [0,1] and its first two derivatives.
double smooth_step(double x, int order = 0);

std::string describe(const Switching& f);

/// True when the profile is exactly constant on [a, b].
bool constant_on(const Switching& f, double a, double b);

/// Times where the profile changes between constant and varying behaviour.
std::vector<double> breakpoints(const Switching& f);

}  // namespace neass
