#pragma once

// Named pass/fail checks collected by a subcommand.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace vecgrav {

struct DiagnosticCheck {
  std::string name;
  double observed = 0.0;
  double tolerance = 0.0;
  /// How observed relates to tolerance when passing, e.g. "<=", ">=".
  std::string relation = "<=";
  bool passed = false;
};

struct DiagnosticsReport {
  std::string title;
  std::vector<DiagnosticCheck> checks;
  /// Free-form lines (tables, parameters) printed before the checks.
  std::vector<std::string> notes;

  /// Records observed <= tolerance.
  bool at_most(const std::string& name, double observed, double tolerance) {
    return add({name, observed, tolerance, "<=", observed <= tolerance});
  }
  /// Records observed >= bound.
  bool at_least(const std::string& name, double observed, double bound) {
    return add({name, observed, bound, ">=", observed >= bound});
  }
  /// Records |observed - target| <= tolerance; `tolerance` is stored as given.
  bool within(const std::string& name, double observed, double target, double tolerance) {
    DiagnosticCheck c{name, observed, tolerance, "~" + format(target) + " +/-",
                      std::abs(observed - target) <= tolerance};
    return add(std::move(c));
  }
  bool flag(const std::string& name, bool ok) {
    return add({name, ok ? 1.0 : 0.0, 1.0, "==", ok});
  }
  bool add(DiagnosticCheck c) {
    checks.push_back(std::move(c));
    return checks.back().passed;
  }

  /// Folds another report in; its title becomes a heading in the notes and
  /// its check names get the title as prefix.
  void append(const DiagnosticsReport& other) {
    notes.push_back("## " + other.title);
    for (const auto& n : other.notes) notes.push_back(n);
    for (DiagnosticCheck c : other.checks) {
      c.name = other.title + ": " + c.name;
      checks.push_back(std::move(c));
    }
  }

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
  int failures() const {
    int n = 0;
    for (const auto& c : checks) n += c.passed ? 0 : 1;
    return n;
  }

  static std::string format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  std::string text() const {
    std::string out = "# " + title + "\n";
    for (const auto& n : notes) out += n + "\n";
    for (const auto& c : checks)
      out += std::string(c.passed ? "PASS" : "FAIL") + "  " + c.name + "  observed " +
             format(c.observed) + " " + c.relation + " " + format(c.tolerance) + "\n";
    out += "checks " + std::to_string(checks.size()) + ", failed " + std::to_string(failures()) +
           "\nstatus " + (passed() ? "PASS" : "FAIL") + "\n";
    return out;
  }
};

}  // namespace vecgrav
