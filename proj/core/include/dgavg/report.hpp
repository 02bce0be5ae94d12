#pragma once

// CSV and key=value summary writers. Every file starts with the effective
// configuration and the library version as '#' comment lines.

#include <dgavg/analysis.hpp>
#include <dgavg/probes.hpp>

#include <string>
#include <utility>
#include <vector>

namespace dgavg {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip representation; "nan" and "inf" for non-finite values.
std::string format_number(double v);

/// Columns kind, n, h, dofs, then one per metric. Rows of kind "mesh" carry
/// measurements; rows of kind "eoc" carry the order between a mesh and the
/// previous one (in the columns of the error metrics only).
std::string study_csv(const StudyReport& report, const KeyValues& config);

std::string probe_csv(const ProbeResult& result, const KeyValues& config);

/// Generic table with the same header convention.
std::string table_csv(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
                      const KeyValues& config);

/// key=value lines, config first under a "config." prefix.
std::string summary_text(const KeyValues& entries, const KeyValues& config);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace dgavg
