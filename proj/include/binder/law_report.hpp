#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

namespace binder {

/// Outcome of checking one law on a batch of inputs.
struct LawReport {
  struct Failure {
    std::string inputs;
    std::string lhs;
    std::string rhs;
    std::size_t weight = 0;  // total node count of the inputs
    std::size_t order = 0;   // position in the deterministic case order
  };

  static constexpr std::size_t kMaxKept = 5;

  std::string law;
  std::size_t samples = 0;
  std::size_t failure_count = 0;
  std::vector<Failure> failures;  // the lightest kMaxKept witnesses

  bool passed() const { return failure_count == 0; }

  void record(Failure f) {
    ++failure_count;
    failures.push_back(std::move(f));
    normalize();
  }

  void merge(const LawReport& other) {
    samples += other.samples;
    failure_count += other.failure_count;
    failures.insert(failures.end(), other.failures.begin(), other.failures.end());
    normalize();
  }

private:
  void normalize() {
    std::sort(failures.begin(), failures.end(), [](const Failure& a, const Failure& b) {
      return std::tie(a.weight, a.order) < std::tie(b.weight, b.order);
    });
    if (failures.size() > kMaxKept) failures.resize(kMaxKept);
  }
};

/// `LAW <name> PASS|FAIL n=<samples>`, then the kept witnesses on failure.
inline std::string format_report(const LawReport& r) {
  std::string out = "LAW " + r.law + (r.passed() ? " PASS" : " FAIL") + " n=" + std::to_string(r.samples) + "\n";
  for (const auto& f : r.failures) {
    out += "  witness " + f.inputs + "\n";
    out += "    lhs " + f.lhs + "\n";
    out += "    rhs " + f.rhs + "\n";
  }
  return out;
}

inline bool all_passed(const std::vector<LawReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const LawReport& r) { return r.passed(); });
}

}  // namespace binder
