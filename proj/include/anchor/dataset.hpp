#pragma once

#include <string>
#include <vector>

#include "anchor/linalg.hpp"

namespace anchor {

// A rectangular sample. x and y are always present; a (anchors), w, z
// (proxies) and group labels are optional and have zero columns / zero length
// when absent. hidden and noise carry the simulated H block and structural
// noise, are only populated under test-support flags, and are never written
// to CSV.
struct Dataset {
  Matrix x;
  Vector y;
  Matrix a;
  Matrix w;
  Matrix z;
  Matrix hidden;
  Matrix noise;
  std::vector<std::string> group;

  std::vector<std::string> x_names;
  std::vector<std::string> a_names;
  std::vector<std::string> w_names;
  std::vector<std::string> z_names;
  std::string y_name = "y";

  Eigen::Index n() const { return y.size(); }
  bool has_a() const { return a.cols() > 0; }
  bool has_w() const { return w.cols() > 0; }
  bool has_z() const { return z.cols() > 0; }
  bool has_group() const { return !group.empty(); }

  // Fills x1.., y, a1.., w1.., z1.. for any block lacking names.
  void ensure_names();

  // Rows whose group label equals (keep=true) / differs from (keep=false) g.
  Dataset filter_by_group(const std::string& g, bool keep) const;
};

// Writes header + rows. Column order: x, y, a, w, z, group. 17 significant
// digits, so a write/read round trip reproduces the doubles exactly.
void write_dataset_csv(const Dataset& data, const std::string& path);

// Reads a CSV written by write_dataset_csv (or any CSV using the canonical
// x*/y/a*/w*/z*/group header names).
Dataset read_dataset_csv(const std::string& path);

}  // namespace anchor
