#include "orps/app/trajectory_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace orps::app {

namespace {

[[noreturn]] void mismatch(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) mismatch(line, "not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_trajectory_csv(std::ostream& out, const PiecewiseTrajectory& traj) {
  out << "t,side";
  for (Eigen::Index i = 0; i < traj.dim(); ++i) out << ",y_" << (i + 1);
  out << '\n';
  for (const auto& s : traj.samples()) {
    out << format_double(s.t) << ',' << s.side;
    for (Eigen::Index i = 0; i < s.y.size(); ++i) out << ',' << format_double(s.y(i));
    out << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const PiecewiseTrajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  write_trajectory_csv(out, traj);
}

PiecewiseTrajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) mismatch(1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 3 || header[0] != "t" || header[1] != "side") mismatch(1, "header must be t,side,y_1..y_n");
  const std::size_t n = header.size() - 2;
  for (std::size_t i = 0; i < n; ++i)
    if (header[i + 2] != "y_" + std::to_string(i + 1)) mismatch(1, "expected column y_" + std::to_string(i + 1));

  std::vector<TrajectorySample> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != n + 2) mismatch(lineno, "expected " + std::to_string(n + 2) + " columns");
    if (cells[1].size() != 1 || (cells[1][0] != 'L' && cells[1][0] != 'R' && cells[1][0] != '-'))
      mismatch(lineno, "side must be L, R or -");
    TrajectorySample s{parse_double(cells[0], lineno), cells[1][0], Vector(static_cast<Eigen::Index>(n))};
    for (std::size_t i = 0; i < n; ++i) s.y(static_cast<Eigen::Index>(i)) = parse_double(cells[i + 2], lineno);
    rows.push_back(std::move(s));
  }
  return trajectory_from_samples(rows);
}

PiecewiseTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaMismatch, "cannot read " + path);
  return read_trajectory_csv(in);
}

}  // namespace orps::app
