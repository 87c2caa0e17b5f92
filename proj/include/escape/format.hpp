#pragma once

#include <string>

namespace escape {

/// Shortest decimal text that reads back to the same double; "nan", "inf"
/// and "-inf" for non-finite values.
std::string format_double(double v);

}  // namespace escape
