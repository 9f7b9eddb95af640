#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace trilab {

// Lossless, locale-independent double formatting (17 significant digits).
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Minimal CSV emitter.  Fields never contain commas or quotes here, so no
// escaping is performed; numeric cells go through format_double for
// byte-stable output.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names) { line(names); }

  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace trilab
