#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "addsel/basis.hpp"

namespace addsel::io {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;  // rows x header.size()

  /// Index of the named column; throws InputError naming it when absent.
  Eigen::Index column(const std::string& name) const;
};

/// Comma-separated, header row required, every data cell numeric. Blank
/// lines are skipped; CR before LF is tolerated.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_text(const std::filesystem::path& path);

}  // namespace addsel::io
