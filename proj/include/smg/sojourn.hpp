#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace smg {

// Holding-time laws restricted to families with closed-form Laplace
// transforms and CDFs, so discounted aggregates are exact.
struct Exponential {
  double rate;  // > 0
};

struct Deterministic {
  double delay;  // >= 0
};

struct Uniform {
  double lo;  // >= 0
  double hi;  // > lo
};

struct DiscreteAtom {
  double t;       // >= 0
  double weight;  // > 0
};

struct Discrete {
  std::vector<DiscreteAtom> atoms;  // times strictly increasing, weights sum to 1
};

using SojournLaw = std::variant<Exponential, Deterministic, Uniform, Discrete>;

// E[e^{-alpha * tau}] for tau ~ law.
double laplace_point(const SojournLaw& law, double alpha);

// P(tau <= t), right-continuous.
double cdf_point(const SojournLaw& law, double t);

// Appends human-readable invariant violations, prefixing each with `path`.
void validate_law(const SojournLaw& law, const std::string& path,
                  std::vector<std::string>* violations);

const char* law_kind(const SojournLaw& law);

}  // namespace smg
