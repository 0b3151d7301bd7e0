#include "rshape/qtable_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "rshape/errors.hpp"
#include "rshape/numeric_format.hpp"

namespace rshape {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

long long parse_integer(std::string_view text, const std::string& source, std::size_t line,
                        const char* what) {
  long long value = 0;
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw FormatError(source, line, std::string("expected integer ") + what + ", got '" +
                                        std::string(text) + "'");
  }
  return value;
}

}  // namespace

void write_qtable(std::ostream& out, const QTable& q) {
  const GridConfig& grid = q.grid();
  out << grid.width << ',' << grid.height << ',' << kActionCount << '\n';
  for (std::size_t s = 0; s < q.state_count(); ++s) {
    out << s;
    for (const double v : q.row(s)) out << ',' << format_double(v);
    out << '\n';
  }
}

void save_qtable(const std::filesystem::path& path, const QTable& q) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  write_qtable(out, q);
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

QTable read_qtable(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError(source, line_no, "missing header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  if (header.size() != 3) {
    throw FormatError(source, line_no, "header must be 'width,height,actions'");
  }
  const auto width = parse_integer(header[0], source, line_no, "width");
  const auto height = parse_integer(header[1], source, line_no, "height");
  const auto actions = parse_integer(header[2], source, line_no, "action count");
  if (actions != kActionCount) {
    throw FormatError(source, line_no, "action count must be 4, got " + std::to_string(actions));
  }
  GridConfig grid{static_cast<int>(width), static_cast<int>(height)};
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(source, line_no, e.what());
  }

  QTable q(grid);
  const std::size_t rows = q.state_count();
  for (std::size_t s = 0; s < rows; ++s) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw FormatError(source, line_no,
                        "expected " + std::to_string(rows) + " state rows, file ends after " +
                            std::to_string(s));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.size() != 1 + kActionCount) {
      throw FormatError(source, line_no, "expected 5 comma-separated fields, got " +
                                             std::to_string(fields.size()));
    }
    const auto index = parse_integer(fields[0], source, line_no, "state index");
    if (index < 0 || static_cast<std::size_t>(index) != s) {
      throw FormatError(source, line_no, "expected state index " + std::to_string(s) + ", got " +
                                             std::string(fields[0]));
    }
    for (const Action a : kAllActions) {
      const auto text = fields[1 + action_code(a)];
      const auto value = parse_double(text);
      if (!value || !std::isfinite(*value)) {
        throw FormatError(source, line_no, "malformed Q value '" + std::string(text) + "'");
      }
      q.at(s, a) = *value;
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line != "\r") {
      throw FormatError(source, line_no, "unexpected trailing content");
    }
  }
  return q;
}

QTable load_qtable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return read_qtable(in, path.string());
}

}  // namespace rshape
