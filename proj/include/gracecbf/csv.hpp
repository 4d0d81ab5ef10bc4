#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gracecbf/simulator.hpp"

namespace gracecbf {

/// One line of the trajectory CSV. Optional fields are written blank.
struct CsvRow {
  double t = 0.0;
  double x = 0.0;
  std::optional<double> xdot;
  double u = 0.0;
  std::optional<double> h;
  std::optional<double> h2;
  std::optional<double> hg;
  std::optional<double> V;

  bool operator==(const CsvRow&) const = default;
};

inline constexpr const char* kCsvHeader = "t,x,xdot,u,h,h2,hg,V";

std::vector<CsvRow> to_csv_rows(const Trajectory& trajectory);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

void write_csv(const Trajectory& trajectory, std::ostream& out);
/// Throws IoError if the file cannot be written.
void emit_csv(const Trajectory& trajectory, const std::filesystem::path& path);

/// Throws ConfigError on a malformed header or row.
std::vector<CsvRow> parse_csv(std::istream& in);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

}  // namespace gracecbf
