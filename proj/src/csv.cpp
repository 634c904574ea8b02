#include "lpvff/csv.hpp"

#include <cstdio>
#include <fstream>

#include "lpvff/errors.hpp"

namespace lpvff {

void write_csv_columns(const std::string& path, const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& columns,
                       double sample_period) {
  if (names.size() != columns.size() || columns.empty()) {
    throw InvalidInput("csv writer: names and columns must match and be non-empty");
  }
  const std::size_t n = columns.front()->size();
  for (const auto* c : columns) {
    if (c->size() != n) throw InvalidInput("csv writer: column length mismatch");
  }
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot open for writing: " + path);
  f << "t";
  for (const auto& name : names) f << "," << name;
  f << "\n";
  char cell[40];
  for (std::size_t k = 0; k < n; ++k) {
    std::snprintf(cell, sizeof(cell), "%.17g", static_cast<double>(k) * sample_period);
    f << cell;
    for (const auto* c : columns) {
      std::snprintf(cell, sizeof(cell), ",%.17g", (*c)[k]);
      f << cell;
    }
    f << "\n";
  }
}

}  // namespace lpvff
