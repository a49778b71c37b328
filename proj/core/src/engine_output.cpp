#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>

#include "synthhome/error.hpp"
#include "synthhome/simulate.hpp"
#include "synthhome/util.hpp"

namespace synthhome {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

using TableKey = std::pair<std::string, std::string>;  // (report, title)

bool blank(const std::vector<std::string>& row) {
  return std::all_of(row.begin(), row.end(), [](const std::string& c) { return trim(c).empty(); });
}

std::map<TableKey, Table> collect_tables(std::string_view csv) {
  const auto rows = parse_csv(csv);
  std::map<TableKey, Table> tables;
  std::string report;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.empty() || blank(row)) continue;
    const std::string first = trim(row[0]);
    if (first == "REPORT:") {
      report = row.size() > 1 ? trim(row[1]) : "";
      continue;
    }
    if (first.empty() || first.back() == ':') continue;
    const bool lone_title = std::all_of(row.begin() + 1, row.end(), [](const std::string& c) { return trim(c).empty(); });
    if (!lone_title) continue;

    std::size_t j = i + 1;
    while (j < rows.size() && blank(rows[j])) ++j;
    if (j >= rows.size()) break;
    // Table headers start with an empty label cell; anything else is a note.
    if (rows[j].empty() || !trim(rows[j][0]).empty()) continue;
    Table t;
    t.header = rows[j];
    for (++j; j < rows.size() && !blank(rows[j]); ++j) t.rows.push_back(rows[j]);
    tables.emplace(TableKey{report, first}, std::move(t));
    i = j - 1;
  }
  return tables;
}

// "Natural Gas [kWh]" -> ("Natural Gas", kWh per unit) for energy units.
std::optional<std::pair<std::string, double>> energy_column(const std::string& header) {
  const auto open = header.rfind('[');
  const auto close = header.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
  const std::string unit = trim(std::string_view(header).substr(open + 1, close - open - 1));
  static const std::map<std::string, double> kToKwh{
      {"kWh", 1.0}, {"GJ", 1e9 / 3.6e6}, {"MJ", 1e6 / 3.6e6}, {"J", 1.0 / 3.6e6}, {"kBtu", 0.29307107017}};
  auto it = kToKwh.find(unit);
  if (it == kToKwh.end()) return std::nullopt;
  return std::make_pair(trim(std::string_view(header).substr(0, open)), it->second);
}

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

double cell_number(const std::string& cell, const std::string& where) {
  const std::string t = trim(cell);
  if (t.empty()) return 0.0;
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("non-numeric cell \"" + t + "\" in " + where);
  }
}

const Table& require_table(const std::map<TableKey, Table>& tables, const std::string& report, const std::string& title) {
  auto it = tables.find({report, title});
  if (it == tables.end()) throw ParseError("engine output lacks table \"" + title + "\" in report \"" + report + "\"");
  return it->second;
}

const std::vector<std::string>& require_row(const Table& t, const std::string& label, const std::string& title) {
  for (const auto& row : t.rows) {
    if (row.size() > 1 && trim(row[1]) == label) return row;
  }
  throw ParseError("table \"" + title + "\" lacks row \"" + label + "\"");
}

}  // namespace

SimulationResult parse_engine_table(std::string_view csv) {
  const auto tables = collect_tables(csv);
  SimulationResult result;
  result.engine = EngineKind::external;

  const std::string end_uses_title = "End Uses";
  const Table& end_uses = require_table(tables, "Annual Building Utility Performance Summary", end_uses_title);
  double hvac = 0.0;
  for (const std::string label : {"Heating", "Cooling"}) {
    const auto& row = require_row(end_uses, label, end_uses_title);
    for (std::size_t c = 2; c < row.size() && c < end_uses.header.size(); ++c) {
      auto col = energy_column(end_uses.header[c]);
      if (!col) continue;
      const double kwh = cell_number(row[c], end_uses_title) * col->second;
      result.raw_outputs["end_uses." + slug(label) + "." + slug(col->first) + "_kwh"] = kwh;
      hvac += kwh;
    }
  }

  const std::string gains_title = "Annual Building Sensible Heat Gain Components";
  const Table& gains = require_table(tables, "Sensible Heat Gain Summary", gains_title);
  const auto& facility = require_row(gains, "Total Facility", gains_title);
  double envelope = 0.0;
  int envelope_columns = 0;
  for (std::size_t c = 2; c < facility.size() && c < gains.header.size(); ++c) {
    auto col = energy_column(gains.header[c]);
    if (!col) continue;
    const double kwh = cell_number(facility[c], gains_title) * col->second;
    result.raw_outputs["sensible." + slug(col->first) + "_kwh"] = kwh;
    const std::string& name = col->first;
    if (name.starts_with("Opaque Surface Conduction") || name.starts_with("Window Heat") ||
        name.starts_with("Infiltration Heat")) {
      envelope += std::fabs(kwh);
      ++envelope_columns;
    }
  }
  if (envelope_columns == 0) throw ParseError("table \"" + gains_title + "\" has no envelope columns");

  result.hvac_energy_kwh = hvac;
  result.envelope_load_kwh = envelope;
  return result;
}

}  // namespace synthhome
