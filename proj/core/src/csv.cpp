#include "iskew/csv.hpp"

#include <cmath>
#include <cstdio>

#include "iskew/version.hpp"

namespace iskew {

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_provenance_line(std::ostream& out, std::uint64_t seed) {
  out << "# " << kToolName << ' ' << kVersion << " seed=" << seed << '\n';
}

}  // namespace iskew
