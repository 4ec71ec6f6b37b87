#include "rydsim/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "rydsim/errors.hpp"

namespace rydsim::output {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw DimensionError("table row has " + std::to_string(row.size()) + " cells, header has " +
                         std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
  return buf;
}

double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
  return std::strtod(buf, nullptr);
}

Json round_numbers(const Json& j) {
  if (j.is_number_float()) return round_significant(j.get<double>());
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& e : j) out.push_back(round_numbers(e));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [k, v] : j.items()) out[k] = round_numbers(v);
    return out;
  }
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + csv_field(t.columns[k]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      if (const double* x = std::get_if<double>(&row[k])) {
        out += format_number(*x);
      } else {
        out += csv_field(std::get<std::string>(row[k]));
      }
    }
    out += '\n';
  }
  return out;
}

Json to_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::array();
    for (const auto& cell : row) {
      if (const double* x = std::get_if<double>(&cell)) {
        r.push_back(std::isfinite(*x) ? Json(round_significant(*x)) : Json(nullptr));
      } else {
        r.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(std::move(r));
  }
  return Json{{"columns", t.columns}, {"rows", std::move(rows)}};
}

Table table_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("columns") || !j.contains("rows")) {
    throw ConfigError("table JSON needs 'columns' and 'rows'");
  }
  Table t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& cell : r) {
      if (cell.is_null()) {
        row.emplace_back(std::numeric_limits<double>::quiet_NaN());
      } else if (cell.is_number()) {
        row.emplace_back(cell.get<double>());
      } else if (cell.is_string()) {
        row.emplace_back(cell.get<std::string>());
      } else {
        throw ConfigError("table cells must be numbers, strings or null");
      }
    }
    t.add_row(std::move(row));
  }
  return t;
}

std::string dump(const Json& j) { return round_numbers(j).dump(2) + "\n"; }

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw ConfigError("failed writing " + path.string());
}

void emit_outputs(const Table& t, Format format, const std::filesystem::path& path, std::string_view schema,
                  const Json& metadata) {
  if (format == Format::kCsv) {
    write_text(path, "# schema_version: " + std::string(schema) + "\n" + to_csv(t));
    return;
  }
  Json doc = to_json(t);
  doc["schema_version"] = schema;
  if (!metadata.is_null()) doc["metadata"] = metadata;
  write_text(path, dump(doc));
}

Table timeseries_table(const TimeSeries& series, double time_offset) {
  Table t;
  t.columns.push_back("t");
  for (const auto& n : series.names) t.columns.push_back(n);
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    std::vector<Cell> row;
    row.reserve(t.columns.size());
    row.emplace_back(series.times[i] + time_offset);
    for (const auto& col : series.columns) row.emplace_back(col[i]);
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace rydsim::output
