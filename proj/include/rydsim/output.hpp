#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rydsim/dynamics.hpp"

namespace rydsim::output {

using Json = nlohmann::json;

inline constexpr std::string_view kRunSchema = "rydsim-run/1";
inline constexpr std::string_view kTimeseriesSchema = "rydsim-timeseries/1";
inline constexpr std::string_view kGridSchema = "rydsim-grid/1";
inline constexpr int kSignificantDigits = 12;

using Cell = std::variant<double, std::string>;

// Rectangular result table: a header row plus typed cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);  // DimensionError on a width mismatch
  std::size_t cell_count() const { return rows.size() * columns.size(); }
  bool operator==(const Table&) const = default;
};

// "%.12g"; non-finite values print as "nan", "inf", "-inf".
std::string format_number(double x);
double round_significant(double x, int digits = kSignificantDigits);
// Rounds every floating-point number in a document to 12 significant digits.
Json round_numbers(const Json& j);

std::string to_csv(const Table& t);
// {"columns": [...], "rows": [[...], ...]}; NaN is written as null.
Json to_json(const Table& t);
Table table_from_json(const Json& j);

// Stable serialization used for every JSON artifact: 12 significant digits,
// two-space indentation, trailing newline.
std::string dump(const Json& j);

enum class Format { kCsv, kJson };

// Writes the table tagged with `schema`: CSV gets a leading
// "# schema_version: <schema>" line, JSON a "schema_version" field next to
// the table mirror and `metadata`. ConfigError when the path cannot be written.
void emit_outputs(const Table& t, Format format, const std::filesystem::path& path, std::string_view schema,
                  const Json& metadata = {});

void write_text(const std::filesystem::path& path, std::string_view content);
void ensure_directory(const std::filesystem::path& dir);

// t plus one column per observable.
Table timeseries_table(const TimeSeries& series, double time_offset = 0.0);

}  // namespace rydsim::output
