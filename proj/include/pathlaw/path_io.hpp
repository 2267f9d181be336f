#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pathlaw/errors.hpp"
#include "pathlaw/pl_path.hpp"

namespace pathlaw {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      return out;
    }
    start = comma + 1;
  }
}

inline double parse_double(const std::string &field, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IoError("line " + std::to_string(line_no) + ": cannot parse '" + field + "' as a number");
  }
  return v;
}

inline void set_precision(std::ostream &out) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
}

}  // namespace detail

// Path CSV: header `time,value`, one knot per line.
inline void write_path_csv(std::ostream &out, const PlPath &path) {
  detail::set_precision(out);
  out << "time,value\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << path.time(i) << ',' << path.value(i) << '\n';
  }
}

// Long batch CSV: header `path_id,time,value`.
inline void write_batch_csv(std::ostream &out, const std::vector<PlPath> &paths) {
  detail::set_precision(out);
  out << "path_id,time,value\n";
  for (std::size_t id = 0; id < paths.size(); ++id) {
    for (std::size_t i = 0; i < paths[id].size(); ++i) {
      out << id << ',' << paths[id].time(i) << ',' << paths[id].value(i) << '\n';
    }
  }
}

// Reads either layout; a batch file yields its paths in path_id order.
inline std::vector<PlPath> read_paths_csv(std::istream &in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) {
      header = detail::split_csv_line(line);
      break;
    }
  }
  const bool single = header == std::vector<std::string>{"time", "value"};
  const bool batch = header == std::vector<std::string>{"path_id", "time", "value"};
  if (!single && !batch) {
    throw IoError("expected header 'time,value' or 'path_id,time,value'");
  }
  std::map<std::uint64_t, std::pair<std::vector<double>, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    const auto f = detail::split_csv_line(line);
    if (f.size() != header.size()) {
      throw IoError("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " fields");
    }
    std::uint64_t id = 0;
    if (batch) {
      const double raw = detail::parse_double(f[0], line_no);
      if (!(raw >= 0.0) || raw != static_cast<double>(static_cast<std::uint64_t>(raw))) {
        throw IoError("line " + std::to_string(line_no) + ": bad path_id");
      }
      id = static_cast<std::uint64_t>(raw);
    }
    auto &[ts, vs] = rows[id];
    ts.push_back(detail::parse_double(f[batch ? 1 : 0], line_no));
    vs.push_back(detail::parse_double(f[batch ? 2 : 1], line_no));
  }
  if (rows.empty()) {
    throw IoError("no knots in input");
  }
  std::vector<PlPath> out;
  for (auto &[id, tv] : rows) {
    try {
      out.emplace_back(std::move(tv.first), std::move(tv.second));
    } catch (const DomainError &e) {
      throw IoError("path " + std::to_string(id) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<PlPath> read_paths_csv(const std::string &file) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("cannot open '" + file + "' for reading");
  }
  return read_paths_csv(in);
}

inline PlPath read_path_csv(const std::string &file) {
  auto paths = read_paths_csv(file);
  if (paths.size() != 1) {
    throw IoError("'" + file + "' holds " + std::to_string(paths.size()) + " paths, expected one");
  }
  return std::move(paths.front());
}

}  // namespace pathlaw
