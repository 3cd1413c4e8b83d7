#include "anchor/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "anchor/csv.hpp"

namespace anchor {

namespace {

const std::set<std::string> kRoles = {"x", "y", "a", "w", "z", "group", "drop"};
const std::set<std::string> kTransforms = {"none", "log", "log1p", "standardize", "one_hot"};

ColumnRule rule_from_json(const std::string& column, const nlohmann::json& j) {
  ColumnRule rule;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "role") {
      rule.role = it.value().get<std::string>();
    } else if (it.key() == "transform") {
      rule.transform = it.value().get<std::string>();
    } else if (it.key() == "subtract") {
      rule.subtract = it.value().get<std::string>();
    } else {
      throw std::invalid_argument("ingest schema: column '" + column + "' has unknown key '" +
                                  it.key() + "'");
    }
  }
  if (kRoles.count(rule.role) == 0) {
    throw std::invalid_argument("ingest schema: column '" + column + "' has unknown role '" +
                                rule.role + "'");
  }
  if (kTransforms.count(rule.transform) == 0) {
    throw std::invalid_argument("ingest schema: column '" + column + "' has unknown transform '" +
                                rule.transform + "'");
  }
  if (rule.transform == "one_hot" && rule.role != "x" && rule.role != "drop") {
    throw std::invalid_argument("ingest schema: one_hot applies to x columns, column '" + column +
                                "' has role '" + rule.role + "'");
  }
  if (!rule.subtract.empty() && rule.transform == "one_hot") {
    throw std::invalid_argument("ingest schema: subtract does not combine with one_hot ('" +
                                column + "')");
  }
  return rule;
}

double transform_value(const std::string& column, const std::string& transform, double v) {
  if (transform == "log") {
    if (!(v > 0.0)) {
      throw std::domain_error("ingest: log transform on column '" + column +
                              "' hit a non-positive value");
    }
    return std::log(v);
  }
  if (transform == "log1p") {
    if (!(v > -1.0)) {
      throw std::domain_error("ingest: log1p transform on column '" + column +
                              "' hit a value at or below -1");
    }
    return std::log1p(v);
  }
  return v;
}

void standardize_column(const std::string& column, std::vector<double>* values) {
  const double n = static_cast<double>(values->size());
  double mean = 0.0;
  for (double v : *values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : *values) var += (v - mean) * (v - mean);
  var /= n;
  if (!(var > 0.0)) {
    throw std::domain_error("ingest: standardize on column '" + column +
                            "' needs a nonconstant column");
  }
  const double sd = std::sqrt(var);
  for (double& v : *values) v = (v - mean) / sd;
}

struct NumericColumn {
  std::string name;
  std::string role;
  std::vector<double> values;
};

}  // namespace

IngestSchema IngestSchema::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("ingest schema: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("columns") || !j["columns"].is_object()) {
    throw std::invalid_argument("ingest schema: expected an object with a 'columns' object");
  }
  IngestSchema schema;
  for (auto it = j["columns"].begin(); it != j["columns"].end(); ++it) {
    schema.columns[it.key()] = rule_from_json(it.key(), it.value());
  }
  if (schema.columns.empty()) {
    throw std::invalid_argument("ingest schema: 'columns' is empty");
  }
  return schema;
}

IngestSchema IngestSchema::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("ingest schema: cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

Dataset ingest_csv(const std::string& path, const IngestSchema& schema, IngestReport* report) {
  const RawTable table = read_raw_csv(path);
  IngestReport local_report;
  IngestReport& rep = report != nullptr ? *report : local_report;
  rep = IngestReport{};
  rep.rows_read = static_cast<long>(table.rows.size());

  for (const std::string& name : table.header) {
    if (schema.columns.count(name) == 0) {
      throw std::invalid_argument("ingest: column '" + name +
                                  "' is not mapped in the schema; map it or give it role drop");
    }
  }
  for (const auto& [name, rule] : schema.columns) {
    if (!table.has_column(name)) {
      throw std::invalid_argument("ingest: schema column '" + name + "' is absent from the file");
    }
    if (!rule.subtract.empty() &&
        (schema.columns.count(rule.subtract) == 0 || !table.has_column(rule.subtract))) {
      throw std::invalid_argument("ingest: column '" + name + "' subtracts unknown column '" +
                                  rule.subtract + "'");
    }
  }

  // Missing pass: a row survives only if every non-drop cell is present.
  std::vector<std::size_t> kept;
  kept.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool missing = false;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (schema.columns.at(table.header[c]).role == "drop") continue;
      if (is_missing_token(table.rows[r][c])) {
        missing = true;
        break;
      }
    }
    if (!missing) kept.push_back(r);
  }
  rep.rows_dropped = rep.rows_read - static_cast<long>(kept.size());
  if (kept.empty()) {
    throw std::domain_error("ingest: no rows left after dropping missing data");
  }

  auto raw_numeric = [&](const std::string& name) {
    const std::size_t c = table.column_index(name);
    std::vector<double> values(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      try {
        values[i] = parse_double(table.rows[kept[i]][c]);
      } catch (const std::runtime_error& e) {
        throw std::domain_error("ingest: column '" + name + "', data row " +
                                std::to_string(kept[i] + 1) + ": " + e.what());
      }
    }
    return values;
  };

  // y columns are averaged on the raw scale, then transformed once.
  std::vector<std::string> y_columns;
  std::string y_transform;
  for (const std::string& name : table.header) {
    const ColumnRule& rule = schema.columns.at(name);
    if (rule.role != "y") continue;
    if (y_columns.empty()) {
      y_transform = rule.transform;
    } else if (rule.transform != y_transform) {
      throw std::invalid_argument("ingest: y columns must share one transform");
    }
    if (rule.transform == "one_hot") {
      throw std::invalid_argument("ingest: one_hot cannot be used on the target");
    }
    y_columns.push_back(name);
  }
  if (y_columns.empty()) {
    throw std::invalid_argument("ingest: schema maps no column to role y");
  }

  std::vector<double> y_values(kept.size(), 0.0);
  for (const std::string& name : y_columns) {
    std::vector<double> values = raw_numeric(name);
    const std::string& sub = schema.columns.at(name).subtract;
    if (!sub.empty()) {
      const std::vector<double> other = raw_numeric(sub);
      for (std::size_t i = 0; i < values.size(); ++i) values[i] -= other[i];
    }
    for (std::size_t i = 0; i < values.size(); ++i) y_values[i] += values[i];
  }
  for (double& v : y_values) v /= static_cast<double>(y_columns.size());
  if (y_transform == "standardize") {
    standardize_column(y_columns.front(), &y_values);
  } else {
    for (double& v : y_values) v = transform_value(y_columns.front(), y_transform, v);
  }

  std::vector<NumericColumn> numeric;
  std::vector<std::string> group;
  for (const std::string& name : table.header) {
    const ColumnRule& rule = schema.columns.at(name);
    if (rule.role == "drop" || rule.role == "y") continue;
    if (rule.role == "group") {
      if (!group.empty()) {
        throw std::invalid_argument("ingest: more than one column has role group");
      }
      const std::size_t c = table.column_index(name);
      group.resize(kept.size());
      for (std::size_t i = 0; i < kept.size(); ++i) group[i] = table.rows[kept[i]][c];
      continue;
    }
    if (rule.transform == "one_hot") {
      const std::size_t c = table.column_index(name);
      std::set<std::string> levels;
      for (std::size_t i = 0; i < kept.size(); ++i) levels.insert(table.rows[kept[i]][c]);
      if (levels.size() < 2) {
        throw std::domain_error("ingest: one_hot column '" + name + "' needs at least 2 levels");
      }
      const std::string reference = *levels.begin();
      std::string note = name + ": one_hot levels";
      for (const std::string& level : levels) note += " " + level;
      note += "; reference " + reference;
      rep.notes.push_back(note);
      for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
        NumericColumn col;
        col.name = name + "=" + *it;
        col.role = rule.role;
        col.values.resize(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
          col.values[i] = table.rows[kept[i]][c] == *it ? 1.0 : 0.0;
        }
        numeric.push_back(std::move(col));
      }
      continue;
    }
    NumericColumn col;
    col.name = name;
    col.role = rule.role;
    col.values = raw_numeric(name);
    if (!rule.subtract.empty()) {
      const std::vector<double> other = raw_numeric(rule.subtract);
      for (std::size_t i = 0; i < col.values.size(); ++i) col.values[i] -= other[i];
    }
    if (rule.transform == "standardize") {
      standardize_column(name, &col.values);
    } else {
      for (double& v : col.values) v = transform_value(name, rule.transform, v);
    }
    numeric.push_back(std::move(col));
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  Dataset out;
  out.y = Eigen::Map<const Vector>(y_values.data(), n);
  out.y_name = y_columns.size() == 1 ? y_columns.front() : "y";
  auto block_of = [&](const std::string& role, std::vector<std::string>* names) {
    std::vector<const NumericColumn*> cols;
    for (const NumericColumn& col : numeric) {
      if (col.role == role) cols.push_back(&col);
    }
    Matrix block(n, static_cast<Eigen::Index>(cols.size()));
    names->clear();
    for (std::size_t j = 0; j < cols.size(); ++j) {
      block.col(static_cast<Eigen::Index>(j)) =
          Eigen::Map<const Vector>(cols[j]->values.data(), n);
      names->push_back(cols[j]->name);
    }
    return block;
  };
  out.x = block_of("x", &out.x_names);
  out.a = block_of("a", &out.a_names);
  out.w = block_of("w", &out.w_names);
  out.z = block_of("z", &out.z_names);
  out.group = std::move(group);
  if (out.x.cols() == 0) {
    throw std::invalid_argument("ingest: schema maps no column to role x");
  }
  return out;
}

}  // namespace anchor
