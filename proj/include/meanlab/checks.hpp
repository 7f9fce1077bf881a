#pragma once

// Named expected-vs-observed comparisons collected by the verification routines.

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "meanlab/errors.hpp"
#include "meanlab/matrix.hpp"

namespace meanlab {

using CheckValue = std::variant<double, Matrix>;

struct Check {
  std::string name;
  CheckValue expected;
  CheckValue observed;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool lower_bound = false;  // observed >= tolerance rather than deviation <= tolerance
};

struct CheckReport {
  std::string subject;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  const Check& at(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw DomainError("no check named '" + name + "' in report for " + subject);
  }

  double worst_failed_deviation() const {
    double w = 0.0;
    for (const auto& c : checks)
      if (!c.pass) w = std::max(w, c.deviation);
    return w;
  }

  // Multiplies every tolerance (not lower-bound thresholds) by s and re-judges.
  CheckReport& scale_tolerances(double s) {
    for (auto& c : checks) {
      if (c.lower_bound) continue;
      c.tolerance *= s;
      c.pass = c.deviation <= c.tolerance;
    }
    return *this;
  }

  // Throws FitFailure carrying the worst failing deviation.
  const CheckReport& require() const {
    if (passed()) return *this;
    std::string failed;
    for (const auto& c : checks)
      if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
    throw FitFailure(subject + ": failed checks: " + failed, worst_failed_deviation());
  }

  // Scalar comparison |observed - expected| <= tol.
  void add(std::string name, double expected, double observed, double tol) {
    const double dev = std::abs(observed - expected);
    checks.push_back({std::move(name), expected, observed, dev, tol, dev <= tol});
  }

  // Upper bound: observed <= tol, expected recorded as 0.
  void add_bound(std::string name, double observed, double tol) {
    checks.push_back({std::move(name), 0.0, observed, observed, tol, observed <= tol});
  }

  // Lower bound: observed >= threshold; deviation is the shortfall.
  void add_floor(std::string name, double observed, double threshold) {
    const double dev = std::max(0.0, threshold - observed);
    checks.push_back({std::move(name), threshold, observed, dev, threshold, observed >= threshold, true});
  }

  // Entrywise max |observed - expected| <= tol.
  void add(std::string name, const Matrix& expected, const Matrix& observed, double tol) {
    const double dev = max_abs_diff(observed, expected);
    checks.push_back({std::move(name), expected, observed, dev, tol, dev <= tol});
  }
};

}  // namespace meanlab
