#pragma once

#include <string>
#include <vector>

namespace structembed {

/// Reads one vector per line: decimal floats separated by commas and/or
/// whitespace.  Blank lines and `#` comments are ignored.  All vectors must
/// share one dimension.  Malformed input raises data_error carrying the
/// 1-based line number.
std::vector<std::vector<double>> load_dataset(const std::string& path);

/// Same parser over an in-memory string (used by tests and stdin paths).
std::vector<std::vector<double>> parse_dataset(const std::string& text);

/// Round-trip-exact float serialization: 17 significant digits, '.' decimal
/// separator regardless of locale.
std::string format_float(double x);

}  // namespace structembed
