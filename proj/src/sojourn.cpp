#include "smg/sojourn.hpp"

#include <cmath>
#include <sstream>

namespace smg {

double laplace_point(const SojournLaw& law, double alpha) {
  struct Visitor {
    double alpha;
    double operator()(const Exponential& e) const {
      return e.rate / (e.rate + alpha);
    }
    double operator()(const Deterministic& d) const {
      return std::exp(-alpha * d.delay);
    }
    double operator()(const Uniform& u) const {
      return (std::exp(-alpha * u.lo) - std::exp(-alpha * u.hi)) /
             (alpha * (u.hi - u.lo));
    }
    double operator()(const Discrete& d) const {
      double s = 0.0;
      for (const auto& a : d.atoms) s += a.weight * std::exp(-alpha * a.t);
      return s;
    }
  };
  return std::visit(Visitor{alpha}, law);
}

double cdf_point(const SojournLaw& law, double t) {
  struct Visitor {
    double t;
    double operator()(const Exponential& e) const {
      return t <= 0.0 ? 0.0 : 1.0 - std::exp(-e.rate * t);
    }
    double operator()(const Deterministic& d) const {
      return t >= d.delay ? 1.0 : 0.0;
    }
    double operator()(const Uniform& u) const {
      if (t <= u.lo) return 0.0;
      if (t >= u.hi) return 1.0;
      return (t - u.lo) / (u.hi - u.lo);
    }
    double operator()(const Discrete& d) const {
      double s = 0.0;
      for (const auto& a : d.atoms)
        if (a.t <= t) s += a.weight;
      return s;
    }
  };
  return std::visit(Visitor{t}, law);
}

void validate_law(const SojournLaw& law, const std::string& path,
                  std::vector<std::string>* violations) {
  auto emit = [&](const std::string& msg) {
    violations->push_back(path + ": " + msg);
  };
  struct Visitor {
    decltype(emit)& fail;
    void operator()(const Exponential& e) const {
      if (!(e.rate > 0.0) || !std::isfinite(e.rate))
        fail("exponential rate must be positive and finite");
    }
    void operator()(const Deterministic& d) const {
      if (!(d.delay >= 0.0) || !std::isfinite(d.delay))
        fail("deterministic delay must be nonnegative and finite");
    }
    void operator()(const Uniform& u) const {
      if (!(u.lo >= 0.0) || !std::isfinite(u.lo))
        fail("uniform lo must be nonnegative and finite");
      if (!(u.hi > u.lo) || !std::isfinite(u.hi))
        fail("uniform hi must exceed lo and be finite");
    }
    void operator()(const Discrete& d) const {
      if (d.atoms.empty()) {
        fail("discrete law needs at least one atom");
        return;
      }
      double total = 0.0;
      double prev = -1.0;
      for (const auto& a : d.atoms) {
        if (!(a.t >= 0.0) || !std::isfinite(a.t))
          fail("atom time must be nonnegative and finite");
        if (a.t <= prev) fail("atom times must be strictly increasing");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
          fail("atom weight must be positive and finite");
        prev = a.t;
        total += a.weight;
      }
      if (std::abs(total - 1.0) > 1e-12)
        fail("atom weights must sum to 1 within 1e-12");
    }
  };
  std::visit(Visitor{emit}, law);
}

const char* law_kind(const SojournLaw& law) {
  switch (law.index()) {
    case 0: return "exponential";
    case 1: return "deterministic";
    case 2: return "uniform";
    default: return "discrete";
  }
}

}  // namespace smg
