#include "gracecbf/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gracecbf/errors.hpp"

namespace gracecbf {
namespace {

std::string field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

double parse_number(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ConfigError,
                "line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
  }
  return v;
}

std::optional<double> parse_optional(std::string_view text, std::size_t line) {
  if (text.empty()) return std::nullopt;
  return parse_number(text, line);
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error(ErrorCode::IoError, "number formatting failed");
  return std::string(buf.data(), ptr);
}

std::vector<CsvRow> to_csv_rows(const Trajectory& trajectory) {
  std::vector<CsvRow> rows;
  rows.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& x = trajectory.states[i];
    const auto& s = trajectory.signals[i];
    CsvRow r;
    r.t = trajectory.times[i];
    r.x = x[0];
    if (x.size() > 1) r.xdot = x[1];
    r.u = trajectory.controls[i].u_star;
    r.h = s.h;
    r.h2 = s.h2;
    r.hg = s.h_g;
    r.V = s.lyapunov;
    rows.push_back(r);
  }
  return rows;
}

void write_csv(const Trajectory& trajectory, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : to_csv_rows(trajectory)) {
    out << format_number(r.t) << ',' << format_number(r.x) << ',' << field(r.xdot) << ','
        << format_number(r.u) << ',' << field(r.h) << ',' << field(r.h2) << ',' << field(r.hg) << ','
        << field(r.V) << '\n';
  }
}

void emit_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  write_csv(trajectory, out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::ConfigError, "missing or unexpected CSV header");
  }
  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::string_view, 8> cols;
    std::string_view rest(line);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (c + 1 == cols.size())) {
        throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected 8 columns");
      }
      cols[c] = rest.substr(0, comma);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    CsvRow r;
    r.t = parse_number(cols[0], line_no);
    r.x = parse_number(cols[1], line_no);
    r.xdot = parse_optional(cols[2], line_no);
    r.u = parse_number(cols[3], line_no);
    r.h = parse_optional(cols[4], line_no);
    r.h2 = parse_optional(cols[5], line_no);
    r.hg = parse_optional(cols[6], line_no);
    r.V = parse_optional(cols[7], line_no);
    rows.push_back(r);
  }
  return rows;
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_csv(in);
}

}  // namespace gracecbf
