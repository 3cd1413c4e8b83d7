#include "anchor/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "anchor/csv.hpp"

namespace anchor {

std::size_t RawTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::runtime_error("csv: no column named '" + name + "'");
}

bool RawTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

RawTable read_raw_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  RawTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size()) {
      throw std::runtime_error("'" + path + "' row " + std::to_string(table.rows.size() + 2) +
                               " has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool is_missing_token(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "NULL";
}

double parse_double(const std::string& cell) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv: cannot parse '" + cell + "' as a number");
  }
}

void Dataset::ensure_names() {
  auto fill = [](std::vector<std::string>& names, Eigen::Index count, const char* prefix) {
    if (static_cast<Eigen::Index>(names.size()) == count) return;
    names.clear();
    for (Eigen::Index i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i + 1));
  };
  fill(x_names, x.cols(), "x");
  fill(a_names, a.cols(), "a");
  fill(w_names, w.cols(), "w");
  fill(z_names, z.cols(), "z");
  if (y_name.empty()) y_name = "y";
}

Dataset Dataset::filter_by_group(const std::string& g, bool keep) const {
  if (!has_group()) throw std::invalid_argument("dataset has no group labels");
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n(); ++i) {
    if ((group[static_cast<std::size_t>(i)] == g) == keep) idx.push_back(i);
  }
  Dataset out;
  auto take = [&idx](const Matrix& m) {
    Matrix r(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) r.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
    return r;
  };
  out.x = take(x);
  out.a = take(a);
  out.w = take(w);
  out.z = take(z);
  out.y.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.y(static_cast<Eigen::Index>(i)) = y(idx[i]);
  out.group.reserve(idx.size());
  for (auto i : idx) out.group.push_back(group[static_cast<std::size_t>(i)]);
  out.x_names = x_names;
  out.a_names = a_names;
  out.w_names = w_names;
  out.z_names = z_names;
  out.y_name = y_name;
  return out;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  Dataset named = data;
  named.ensure_names();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  std::ostringstream header;
  for (const auto& nm : named.x_names) header << nm << ',';
  header << named.y_name;
  for (const auto& nm : named.a_names) header << ',' << nm;
  for (const auto& nm : named.w_names) header << ',' << nm;
  for (const auto& nm : named.z_names) header << ',' << nm;
  if (named.has_group()) header << ",group";
  out << header.str() << '\n';
  for (Eigen::Index i = 0; i < named.n(); ++i) {
    std::string line;
    for (Eigen::Index j = 0; j < named.x.cols(); ++j) line += format_double(named.x(i, j)) + ",";
    line += format_double(named.y(i));
    for (Eigen::Index j = 0; j < named.a.cols(); ++j) line += "," + format_double(named.a(i, j));
    for (Eigen::Index j = 0; j < named.w.cols(); ++j) line += "," + format_double(named.w(i, j));
    for (Eigen::Index j = 0; j < named.z.cols(); ++j) line += "," + format_double(named.z(i, j));
    if (named.has_group()) line += "," + named.group[static_cast<std::size_t>(i)];
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

Dataset read_dataset_csv(const std::string& path) {
  const RawTable table = read_raw_csv(path);
  const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());
  std::vector<std::size_t> xi, ai, wi, zi;
  std::ptrdiff_t yi = -1, gi = -1;
  Dataset out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& h = table.header[c];
    if (h == "y") {
      yi = static_cast<std::ptrdiff_t>(c);
    } else if (h == "group") {
      gi = static_cast<std::ptrdiff_t>(c);
    } else if (h.rfind('x', 0) == 0) {
      xi.push_back(c);
      out.x_names.push_back(h);
    } else if (h.rfind('a', 0) == 0) {
      ai.push_back(c);
      out.a_names.push_back(h);
    } else if (h.rfind('w', 0) == 0) {
      wi.push_back(c);
      out.w_names.push_back(h);
    } else if (h.rfind('z', 0) == 0) {
      zi.push_back(c);
      out.z_names.push_back(h);
    } else {
      throw std::runtime_error("'" + path + "': column '" + h +
                               "' does not match the canonical x*/y/a*/w*/z*/group names; "
                               "use a schema-driven ingest for arbitrary headers");
    }
  }
  if (yi < 0) throw std::runtime_error("'" + path + "' has no y column");
  auto fill = [&table, n](Matrix& m, const std::vector<std::size_t>& cols) {
    m.resize(n, static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        m(i, static_cast<Eigen::Index>(j)) =
            parse_double(table.rows[static_cast<std::size_t>(i)][cols[j]]);
      }
    }
  };
  fill(out.x, xi);
  fill(out.a, ai);
  fill(out.w, wi);
  fill(out.z, zi);
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.y(i) = parse_double(table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(yi)]);
  }
  if (gi >= 0) {
    out.group.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      out.group.push_back(table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(gi)]);
    }
  }
  return out;
}

}  // namespace anchor
