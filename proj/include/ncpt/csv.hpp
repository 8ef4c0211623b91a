#pragma once

#include <string>
#include <vector>

#include "ncpt/scan.hpp"

// CSV output: header row, 12-significant-digit floats with '.' decimal point,
// LF-terminated records, RFC-4180 quoting. Provenance travels in leading
// '#' comment lines so the body stays bit-identical across platforms and
// worker counts.

namespace ncpt::csv {

std::string format_number(double value);
std::string quote(const std::string& field);

struct Document {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

// Parses emitted text back (comments skipped); quoted fields unescaped.
Document parse(const std::string& text);

// column layouts of the tool outputs
Document plan_table(const std::vector<std::pair<std::string, Setup>>& entries);
Document trajectory_table(const Trajectory& trajectory);
Document sweep_table(const std::vector<SweepRow>& rows);
Document detuning_table(const DetuningCurve& curve);
Document mismatch_table(const MismatchSurface& surface);

}  // namespace ncpt::csv
