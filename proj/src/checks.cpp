#include "escape/checks.hpp"

#include <utility>

namespace escape {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

void NamedCheck::settle() {
  if (items.empty()) {
    verdict = Verdict::inconclusive;
    return;
  }
  bool open = false;
  for (const auto& item : items) {
    if (item.verdict == Verdict::fail) {
      verdict = Verdict::fail;
      return;
    }
    if (item.verdict == Verdict::inconclusive) open = true;
  }
  verdict = open ? Verdict::inconclusive : Verdict::pass;
}

CheckItem at_least(std::string label, double measured, double bound, double ci) {
  CheckItem item{std::move(label), measured, bound, ci, Verdict::fail};
  if (measured + ci >= bound) item.verdict = Verdict::pass;
  return item;
}

CheckItem at_most(std::string label, double measured, double bound, double ci) {
  CheckItem item{std::move(label), measured, bound, ci, Verdict::fail};
  if (measured - ci <= bound) item.verdict = Verdict::pass;
  return item;
}

}  // namespace escape
