#pragma once

// CSV output with fixed schemas. Reals are written with 17 significant
// digits (shortest-general form, '.' decimal point, no locale), integers as
// plain decimals, rows separated by '\n'. Non-finite reals are refused.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "motility/pde2d.hpp"

namespace motility::io {

enum class ColumnType { Real, Integer };

struct Schema {
  std::string id;
  std::vector<std::string> columns;
  std::vector<ColumnType> types;
  std::string header() const;
};

/// Throws std::invalid_argument for an unknown id.
const Schema& schema(std::string_view id);
std::vector<std::string> schema_ids();

using Cell = std::variant<double, std::int64_t>;
using Row = std::vector<Cell>;

/// Raised on rows that do not fit the schema (width, type, non-finite value).
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string format_csv_real(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view schema_id);
  void row(const Row& cells);
  void close();
  std::size_t rows() const { return rows_; }

 private:
  const Schema* schema_;
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t rows_ = 0;
  std::string line_;
};

/// Whole-file convenience. Validates every row before anything is written.
void write_csv(const std::filesystem::path& path, std::string_view schema_id, const std::vector<Row>& rows);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::size_t index(std::string_view column) const;
  std::vector<double> column(std::string_view name) const;
};

/// Reads a numeric CSV written by this module. With a schema id the header must match exactly.
CsvTable read_csv(const std::filesystem::path& path, std::string_view schema_id = {});

// 2D field snapshot: ASCII header lines terminated by "end\n", then rho, Px, Py
// as little-endian float64, each nx*ny values in row-major order (f[j*nx + i]).
//   motility-field2d 1
//   nx <n>
//   ny <n>
//   dx <real>
//   t <real>
//   eps <real>
//   beta <real>
//   fields rho Px Py
//   end
void write_field_snapshot(const std::filesystem::path& path, const FieldState2D& state);
FieldState2D read_field_snapshot(const std::filesystem::path& path);

}  // namespace motility::io
