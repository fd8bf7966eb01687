// CSV emission with a pinned numeric format: %.12g, '.' decimal separator,
// LF line endings. Artifacts are compared byte-for-byte across runs, so all
// formatting goes through here rather than through locale-sensitive streams.
#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpg {

inline std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string format_num(int v) { return std::to_string(v); }

class Csv {
 public:
  explicit Csv(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void close() { out_.close(); }

 private:
  std::ofstream out_;
};

}  // namespace wpg
