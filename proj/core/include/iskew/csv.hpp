#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace iskew {

/// Value with 12 significant digits; non-finite values print as nan / inf / -inf.
std::string csv_number(double v);

/// "# index-skew-lab <version> seed=<seed>"
void write_provenance_line(std::ostream& out, std::uint64_t seed);

}  // namespace iskew
