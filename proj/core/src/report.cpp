#include <dgavg/config.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/report.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dgavg {

namespace {

void header(std::ostringstream& out, const KeyValues& config) {
  out << "# dgavg " << version() << '\n';
  for (const auto& [key, value] : config) out << "# " << key << '=' << value << '\n';
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string study_csv(const StudyReport& report, const KeyValues& config) {
  std::vector<std::string> columns{"kind", "n", "h", "dofs"};
  columns.insert(columns.end(), report.metrics.begin(), report.metrics.end());
  std::vector<std::vector<std::string>> rows;
  for (const StudyRow& r : report.rows) {
    std::vector<std::string> row{"mesh", std::to_string(r.n), format_number(r.h), std::to_string(r.dofs)};
    for (double v : r.values) row.push_back(format_number(v));
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < report.eoc.size(); ++i) {
    const StudyRow& fine = report.rows[i + 1];
    std::vector<std::string> row{"eoc", std::to_string(fine.n), format_number(fine.h), std::to_string(fine.dofs)};
    for (const std::string& metric : report.metrics) {
      std::string cell;
      for (std::size_t c = 0; c < report.eoc_metrics.size(); ++c) {
        if (report.eoc_metrics[c] == metric) cell = format_number(report.eoc[i][c]);
      }
      row.push_back(cell);
    }
    rows.push_back(std::move(row));
  }
  return table_csv(columns, rows, config);
}

std::string probe_csv(const ProbeResult& result, const KeyValues& config) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : result.rows) {
    std::vector<std::string> row;
    for (double v : r) row.push_back(format_number(v));
    rows.push_back(std::move(row));
  }
  return table_csv(result.columns, rows, config);
}

std::string table_csv(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
                      const KeyValues& config) {
  std::ostringstream out;
  header(out, config);
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

std::string summary_text(const KeyValues& entries, const KeyValues& config) {
  std::ostringstream out;
  out << "version=" << version() << '\n';
  for (const auto& [key, value] : config) out << "config." << key << '=' << value << '\n';
  for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed to write '" + path + "'");
}

}  // namespace dgavg
