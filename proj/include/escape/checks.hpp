#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace escape {

enum class Verdict { pass, fail, inconclusive };

std::string_view to_string(Verdict v);

/// One comparison inside a named check: a measured statistic against a bound.
/// `ci` is the half-width already applied in the forgiving direction.
struct CheckItem {
  std::string label;
  double measured = 0.0;
  double bound = 0.0;
  double ci = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

struct NamedCheck {
  std::string name;
  Verdict verdict = Verdict::inconclusive;
  std::vector<CheckItem> items;
  std::string note;

  /// Recomputes `verdict` from the items: any failure fails the check, an
  /// empty or partially inconclusive list is inconclusive.
  void settle();
};

/// measured + ci >= bound
CheckItem at_least(std::string label, double measured, double bound, double ci);
/// measured - ci <= bound
CheckItem at_most(std::string label, double measured, double bound, double ci);

}  // namespace escape
