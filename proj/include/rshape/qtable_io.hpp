#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rshape/qlearn.hpp"

namespace rshape {

// Text format:
//   width,height,actions
//   state_index,q0,q1,q2,q3      (one line per state index, in order)
// Numbers use the shortest round-trip decimal form.

void write_qtable(std::ostream& out, const QTable& q);
void save_qtable(const std::filesystem::path& path, const QTable& q);

/// Throws FormatError naming the offending line.
QTable read_qtable(std::istream& in, const std::string& source_name);
/// Throws IoError when the file cannot be opened.
QTable load_qtable(const std::filesystem::path& path);

}  // namespace rshape
