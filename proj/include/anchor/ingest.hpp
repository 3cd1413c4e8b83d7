#pragma once

// Schema-driven CSV ingestion.
//
// A schema maps every column of the input file to a role and an optional
// transform. Roles: x (feature), y (target), a (anchor), w / z (proxies),
// group (fold label), drop. Transforms: none, log, log1p, standardize,
// one_hot. A rule may also name a "subtract" column whose raw values are
// subtracted before the transform (used to decumulate running totals).
//
// Processing order: rows with a missing value in any non-drop column are
// dropped first; then subtractions, then aggregation of multiple y columns
// (row mean of the raw values, transformed once), then per-column transforms.
// one_hot expands a categorical column into indicators for every level except
// the lexicographically smallest, which serves as the reference.

#include <map>
#include <string>
#include <vector>

#include "anchor/dataset.hpp"

namespace anchor {

struct ColumnRule {
  std::string role = "x";
  std::string transform = "none";
  std::string subtract;
};

struct IngestSchema {
  std::map<std::string, ColumnRule> columns;

  // Parses {"columns": {name: {"role": ..., "transform": ..., "subtract": ...}}}.
  // Unknown keys, roles, or transforms raise std::invalid_argument.
  static IngestSchema from_json_text(const std::string& text);
  static IngestSchema from_json_file(const std::string& path);
};

struct IngestReport {
  long rows_read = 0;
  long rows_dropped = 0;
  std::vector<std::string> notes;

  long rows_kept() const { return rows_read - rows_dropped; }
};

// Reads the file, applies the schema, and returns the typed sample. Every
// file column must be mapped and every mapped column must exist; at least one
// x and one y column are required. Throws std::invalid_argument on schema or
// header mismatches and std::domain_error on bad cell values (non-numeric in
// a numeric role, log of a non-positive value, constant column under
// standardize).
Dataset ingest_csv(const std::string& path, const IngestSchema& schema,
                   IngestReport* report = nullptr);

}  // namespace anchor
