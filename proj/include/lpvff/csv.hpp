#pragma once

#include <string>
#include <vector>

namespace lpvff {

/// Writes "t,<name0>,<name1>,..." with one row per sample at full round-trip
/// precision. All columns must share the same length.
void write_csv_columns(const std::string& path, const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& columns,
                       double sample_period);

}  // namespace lpvff
