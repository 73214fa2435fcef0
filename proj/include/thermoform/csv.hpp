#pragma once

#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include "thermoform/errors.hpp"

namespace thermoform {

// Shortest round-trip decimal representation (<= 17 significant digits).
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Minimal CSV emitter: header row, comma separators, newline-terminated
// rows, optional generation-time comment line.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header,
            bool timestamp = true)
      : out_(path) {
    if (!out_) throw Error("cannot open output file: " + path);
    if (timestamp) {
      std::time_t now = std::time(nullptr);
      char stamp[64];
      std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ",
                    std::gmtime(&now));
      out_ << "# generated " << stamp << "\n";
    }
    write_strings(header);
  }

  void write_row(const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(row[i]);
    }
    out_ << '\n';
  }

  void write_strings(const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out_ << ',';
      out_ << row[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace thermoform
