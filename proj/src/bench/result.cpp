#include "qkla/bench/result.hpp"

#include <cstdio>
#include <stdexcept>

namespace qkla::bench {

using nlohmann::json;

void Table::add_row(std::vector<Value> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("row width " + std::to_string(row.size()) + " does not match table '" +
                                name + "'");
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& col) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == col) return i;
  }
  throw std::out_of_range("table '" + name + "' has no column '" + col + "'");
}

const Value& Table::at(std::size_t row, const std::string& column_name) const {
  return rows.at(row).at(column(column_name));
}

const Table& ExperimentResult::table(const std::string& name) const {
  for (const Table& t : tables) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("no table named '" + name + "'");
}

std::string format_value(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", d);
      return buf;
    }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

double as_double(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw std::invalid_argument("cell is not numeric");
}

bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

std::string to_csv(const Table& table) {
  std::string out = "# schema=" + std::to_string(kSchemaVersion) + " table=" + table.name + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_value(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

json value_to_json(const Value& v) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(std::int64_t i) const { return i; }
    json operator()(double d) const { return d; }
    json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

Value value_from_json(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw std::invalid_argument("unsupported cell type in results JSON");
}

}  // namespace

json to_json(const ExperimentResult& r) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["experiment"] = r.experiment;
  doc["seed"] = r.seed;
  doc["config"] = r.config;
  doc["fitted_slopes"] = r.fitted_slopes;
  doc["metrics"] = r.metrics;
  doc["notes"] = r.notes;
  doc["runtime_seconds"] = r.runtime_seconds;
  json tables = json::array();
  for (const Table& t : r.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json jr = json::array();
      for (const Value& v : row) jr.push_back(value_to_json(v));
      rows.push_back(jr);
    }
    tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
  }
  doc["tables"] = tables;
  return doc;
}

ExperimentResult result_from_json(const json& doc) {
  if (doc.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::invalid_argument("unsupported results schema version");
  }
  ExperimentResult r;
  r.experiment = doc.at("experiment").get<std::string>();
  r.seed = doc.at("seed").get<std::uint64_t>();
  r.config = doc.at("config");
  r.fitted_slopes = doc.at("fitted_slopes").get<std::map<std::string, double>>();
  r.metrics = doc.at("metrics").get<std::map<std::string, double>>();
  r.notes = doc.at("notes").get<std::map<std::string, std::string>>();
  r.runtime_seconds = doc.at("runtime_seconds").get<double>();
  for (const auto& jt : doc.at("tables")) {
    Table t;
    t.name = jt.at("name").get<std::string>();
    t.columns = jt.at("columns").get<std::vector<std::string>>();
    for (const auto& jr : jt.at("rows")) {
      std::vector<Value> row;
      for (const auto& cell : jr) row.push_back(value_from_json(cell));
      t.add_row(std::move(row));
    }
    r.tables.push_back(std::move(t));
  }
  return r;
}

}  // namespace qkla::bench
