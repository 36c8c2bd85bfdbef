#ifndef FAIRIPM_IO_HPP
#define FAIRIPM_IO_HPP

#include <string>

namespace fairipm {

// Whole-file atomic write: writes to a sibling temp file, then renames.
void write_file_atomic(const std::string& path, const std::string& contents);

// Full-precision decimal formatting (17 significant digits) so numeric text
// output round-trips bitwise.
std::string format_double(double value);

}  // namespace fairipm

#endif
