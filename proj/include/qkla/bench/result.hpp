#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace qkla::bench {

/// A table cell. monostate is the explicit "no value" marker (written as an
/// empty CSV field and as JSON null).
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  void add_row(std::vector<Value> row);
  std::size_t column(const std::string& name) const;
  const Value& at(std::size_t row, const std::string& column_name) const;
};

/// Bumped whenever a CSV column set changes.
inline constexpr int kSchemaVersion = 1;

struct ExperimentResult {
  std::string experiment;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::vector<Table> tables;
  std::map<std::string, double> fitted_slopes;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> notes;
  double runtime_seconds = 0.0;

  const Table& table(const std::string& name) const;
};

/// Header line "# schema=<v> table=<name>", the column line, then rows.
/// Doubles use %.10g.
std::string to_csv(const Table& table);

std::string format_value(const Value& v);
double as_double(const Value& v);
bool is_null(const Value& v);

nlohmann::json to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const nlohmann::json& doc);

}  // namespace qkla::bench
