#pragma once

// Plain numeric CSV: one observation per line, ',' separated, '.' decimal
// point, optional scientific notation. A first line that does not parse as
// numbers is treated as a header.

#include "hdcov/core_model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hdcov {

/// Throws Io when the file cannot be opened, Parse with a 1-based line and
/// column for malformed cells, NonFiniteEntry for NaN / infinity cells.
SampleBlock read_csv(const std::string& path);

SampleBlock parse_csv(std::istream& in, const std::string& source = "<input>");

/// 17 significant digits, so values read back bit-exactly.
void write_csv(const SampleBlock& block, const std::string& path);

void write_csv(const SampleBlock& block, std::ostream& out);

/// Single-column CSV with a header line.
void write_column_csv(const std::vector<double>& values,
                      const std::string& header, std::ostream& out);

}  // namespace hdcov
