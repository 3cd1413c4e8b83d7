#include "anchor/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace anchor {

namespace {

const char* const kE1Json = R"json({
  "note": "three proxied anchors driving a cyclic five-node system; rows of B and M_A follow the ordering field and the loader permutes them to (x.., y, h..)",
  "dims": {"d_x": 3, "d_h": 1, "d_a": 3},
  "ordering": ["y", "x1", "x2", "x3", "h1"],
  "B": [
    [0, -2, 2, 0, 1],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
    [3, 0, 0, 0, 1],
    [0, 0, 0, 0, 0]
  ],
  "M_A": [
    [1, 0, -2],
    [0, 2, 1],
    [-1, 3, 0],
    [2, 2, -3],
    [0, -2, 2]
  ],
  "beta_W": [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1]
  ],
  "beta_Z": [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1]
  ]
})json";

const char* const kE3Json = R"json({
  "note": "x1..x3 are causal children of the first anchor block, x4..x6 anti-causal children of the second; both proxies measure the second block with 9x the noise variance",
  "dims": {"d_x": 6, "d_h": 0, "d_a": 6},
  "ordering": ["x1", "x2", "x3", "x4", "x5", "x6", "y"],
  "B": [
    [0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 4],
    [0, 0, 0, 0, 0, 0, 4],
    [0, 0, 0, 0, 0, 0, 4],
    [0.25, 0.25, 0.25, 0, 0, 0, 0]
  ],
  "M_A": [
    [1, 1, 1, 0, 0, 0],
    [1, 1, 1, 0, 0, 0],
    [1, 1, 1, 0, 0, 0],
    [0, 0, 0, 1, 1, 1],
    [0, 0, 0, 1, 1, 1],
    [0, 0, 0, 1, 1, 1],
    [0, 0, 0, 0, 0, 0]
  ],
  "beta_W": [
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1]
  ],
  "Sigma_epsW": [
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 9, 0, 0],
    [0, 0, 0, 0, 9, 0],
    [0, 0, 0, 0, 0, 9]
  ],
  "beta_Z": [
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1]
  ],
  "Sigma_epsZ": [
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 9, 0, 0],
    [0, 0, 0, 0, 9, 0],
    [0, 0, 0, 0, 0, 9]
  ]
})json";

const char* const kE4Json = R"json({
  "note": "two observed anchors, no proxies; used by the targeted-shift study",
  "dims": {"d_x": 2, "d_h": 1, "d_a": 2},
  "ordering": ["y", "x1", "x2", "h1"],
  "B": [
    [0, -0.06, 0.07, 0.04],
    [0.05, 0, 0.19, 0.03],
    [0.11, -0.11, 0, 0.1],
    [-0.02, 0.02, 0.09, 0]
  ],
  "M_A": [
    [2, 1],
    [0, 1],
    [2, 2],
    [0, 3]
  ]
})json";

const char* const kSuppBJson = R"json({
  "note": "observed covariance of (x, y, w) for the one-dimensional equivalence-family scan",
  "Sigma_XYW": [
    [9, 3, 1],
    [3, 9, 2],
    [1, 2, 9]
  ],
  "lambda": 5
})json";

const std::map<std::string, const char*>& builtin_table() {
  static const std::map<std::string, const char*> table = {
      {"e1", kE1Json}, {"e2", kE1Json}, {"e3", kE3Json}, {"e4", kE4Json}, {"suppB", kSuppBJson}};
  return table;
}

nlohmann::json load_json(const std::string& path_or_builtin, std::string* name) {
  *name = path_or_builtin;
  std::ifstream in(path_or_builtin);
  std::string text;
  if (in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  } else if (is_builtin_config(path_or_builtin)) {
    text = builtin_config_text(path_or_builtin);
  } else {
    std::string known;
    for (const std::string& k : builtin_config_names()) known += (known.empty() ? "" : ", ") + k;
    throw std::invalid_argument("config: '" + path_or_builtin +
                                "' is neither a readable file nor a builtin bundle (" + known +
                                ")");
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config '" + path_or_builtin + "': invalid JSON: " + e.what());
  }
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& key, Eigen::Index rows,
                        Eigen::Index cols) {
  const nlohmann::json& m = j.at(key);
  if (!m.is_array() || static_cast<Eigen::Index>(m.size()) != rows) {
    throw std::invalid_argument("config: '" + key + "' must have " + std::to_string(rows) +
                                " rows");
  }
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const nlohmann::json& row = m[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("config: '" + key + "' row " + std::to_string(r) +
                                  " must have " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const nlohmann::json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) {
        throw std::invalid_argument("config: '" + key + "' has a non-numeric entry");
      }
      out(r, c) = v.get<double>();
    }
  }
  return out;
}

Matrix matrix_or_identity(const nlohmann::json& j, const std::string& key, Eigen::Index dim) {
  if (!j.contains(key)) return Matrix::Identity(dim, dim);
  return matrix_from_json(j, key, dim, dim);
}

// ordering[i] names the variable whose row is printed i-th; returns
// perm[c] = printed row of the c-th canonical variable (x1.., y, h1..).
std::vector<Eigen::Index> ordering_permutation(const nlohmann::json& j, int d_x, int d_h) {
  const int d = d_x + 1 + d_h;
  std::vector<std::string> canonical;
  canonical.reserve(static_cast<std::size_t>(d));
  for (int i = 1; i <= d_x; ++i) canonical.push_back("x" + std::to_string(i));
  canonical.push_back("y");
  for (int i = 1; i <= d_h; ++i) canonical.push_back("h" + std::to_string(i));

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
  if (!j.contains("ordering")) {
    for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
    return perm;
  }
  const nlohmann::json& ord = j.at("ordering");
  if (!ord.is_array() || static_cast<int>(ord.size()) != d) {
    throw std::invalid_argument("config: 'ordering' must list all " + std::to_string(d) +
                                " variables");
  }
  std::map<std::string, Eigen::Index> printed_row;
  for (std::size_t i = 0; i < ord.size(); ++i) {
    const std::string label = ord[i].get<std::string>();
    if (!printed_row.emplace(label, static_cast<Eigen::Index>(i)).second) {
      throw std::invalid_argument("config: 'ordering' repeats label '" + label + "'");
    }
  }
  for (int c = 0; c < d; ++c) {
    const auto it = printed_row.find(canonical[static_cast<std::size_t>(c)]);
    if (it == printed_row.end()) {
      throw std::invalid_argument("config: 'ordering' is missing label '" +
                                  canonical[static_cast<std::size_t>(c)] + "'");
    }
    perm[static_cast<std::size_t>(c)] = it->second;
  }
  return perm;
}

Vector vector_from_json(const nlohmann::json& j) {
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return out;
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_nested(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      out(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> builtin_config_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : builtin_table()) names.push_back(name);
  return names;
}

bool is_builtin_config(const std::string& name) { return builtin_table().count(name) > 0; }

std::string builtin_config_text(const std::string& name) {
  const auto it = builtin_table().find(name);
  if (it == builtin_table().end()) {
    throw std::invalid_argument("config: no builtin bundle named '" + name + "'");
  }
  return it->second;
}

ScmConfig load_scm_config(const std::string& path_or_builtin) {
  ScmConfig out;
  const nlohmann::json j = load_json(path_or_builtin, &out.name);

  static const std::set<std::string> allowed = {"note",    "dims",       "ordering",
                                                "B",       "M_A",        "Sigma_eps",
                                                "Sigma_A", "beta_W",     "Sigma_epsW",
                                                "beta_Z",  "Sigma_epsZ"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.count(it.key()) == 0) {
      throw std::invalid_argument("config '" + out.name + "': unknown key '" + it.key() + "'");
    }
  }
  if (!j.contains("dims")) {
    throw std::invalid_argument("config '" + out.name + "': missing 'dims'");
  }
  const nlohmann::json& dims = j.at("dims");
  LinearScm& scm = out.scm;
  scm.d_x = dims.at("d_x").get<int>();
  scm.d_h = dims.at("d_h").get<int>();
  scm.d_a = dims.at("d_a").get<int>();
  if (scm.d_x < 1 || scm.d_h < 0 || scm.d_a < 1) {
    throw std::invalid_argument("config '" + out.name + "': dims need d_x >= 1, d_h >= 0, d_a >= 1");
  }
  const Eigen::Index d = scm.d();
  const std::vector<Eigen::Index> perm = ordering_permutation(j, scm.d_x, scm.d_h);

  const Matrix b_printed = matrix_from_json(j, "B", d, d);
  const Matrix m_printed = matrix_from_json(j, "M_A", d, scm.d_a);
  const Matrix eps_printed = j.contains("Sigma_eps") ? matrix_from_json(j, "Sigma_eps", d, d)
                                                     : Matrix(Matrix::Identity(d, d));
  scm.b.resize(d, d);
  scm.m_a.resize(d, scm.d_a);
  scm.sigma_eps.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    scm.m_a.row(i) = m_printed.row(perm[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < d; ++k) {
      scm.b(i, k) = b_printed(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
      scm.sigma_eps(i, k) =
          eps_printed(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
    }
  }
  scm.sigma_a = matrix_or_identity(j, "Sigma_A", scm.d_a);

  if (j.contains("beta_W")) {
    ProxyModel proxies;
    const auto d_w = static_cast<Eigen::Index>(j.at("beta_W")[0].size());
    proxies.beta_w = matrix_from_json(j, "beta_W", scm.d_a, d_w);
    proxies.sigma_eps_w = matrix_or_identity(j, "Sigma_epsW", d_w);
    if (j.contains("beta_Z")) {
      const auto d_z = static_cast<Eigen::Index>(j.at("beta_Z")[0].size());
      proxies.beta_z = matrix_from_json(j, "beta_Z", scm.d_a, d_z);
      proxies.sigma_eps_z = matrix_or_identity(j, "Sigma_epsZ", d_z);
    } else if (j.contains("Sigma_epsZ")) {
      throw std::invalid_argument("config '" + out.name + "': Sigma_epsZ without beta_Z");
    }
    out.proxies = std::move(proxies);
  } else if (j.contains("Sigma_epsW") || j.contains("beta_Z") || j.contains("Sigma_epsZ")) {
    throw std::invalid_argument("config '" + out.name + "': proxy noise given without beta_W");
  }

  const ValidationReport report =
      validate_scm(out.scm, out.proxies.has_value() ? &*out.proxies : nullptr);
  if (!report.ok) {
    std::string failed;
    for (const ValidationCheck& check : report.checks) {
      if (!check.passed) failed += "\n  " + check.name + ": " + check.detail;
    }
    throw std::invalid_argument("config '" + out.name + "': model fails validation:" + failed);
  }
  return out;
}

Sigma3Config load_sigma3_config(const std::string& path_or_builtin) {
  std::string name;
  const nlohmann::json j = load_json(path_or_builtin, &name);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "Sigma_XYW" && it.key() != "lambda" && it.key() != "note") {
      throw std::invalid_argument("config '" + name + "': unknown key '" + it.key() + "'");
    }
  }
  Sigma3Config out;
  out.sigma = ObservedCovariance3::from_matrix(matrix_from_json(j, "Sigma_XYW", 3, 3));
  out.sigma.validate();
  if (j.contains("lambda")) out.lambda = j.at("lambda").get<double>();
  return out;
}

std::string predictor_to_json_text(const LinearPredictor& predictor) {
  nlohmann::json j;
  j["method"] = method_name(predictor.method);
  j["gamma"] = vector_to_json(predictor.gamma);
  j["alpha"] = predictor.alpha;
  j["lambda"] = predictor.lambda;  // NaN serializes as null
  j["pseudo_inverse"] = predictor.pseudo_inverse;
  if (predictor.target_mean.size() > 0) j["target_mean"] = vector_to_json(predictor.target_mean);
  if (predictor.target_cov.size() > 0) j["target_cov"] = matrix_to_json(predictor.target_cov);
  if (predictor.standardization.has_value()) {
    const Standardization& s = *predictor.standardization;
    j["standardization"] = nlohmann::json{{"x_mean", vector_to_json(s.x_mean)},
                                          {"x_scale", vector_to_json(s.x_scale)},
                                          {"y_mean", s.y_mean},
                                          {"y_scale", s.y_scale}};
  }
  return j.dump(2) + "\n";
}

void save_predictor(const LinearPredictor& predictor, const std::string& path) {
  std::ofstream outfile(path);
  if (!outfile) {
    throw std::runtime_error("save_predictor: cannot open '" + path + "' for writing");
  }
  outfile << predictor_to_json_text(predictor);
  if (!outfile.good()) {
    throw std::runtime_error("save_predictor: write to '" + path + "' failed");
  }
}

LinearPredictor load_predictor(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_predictor: cannot open '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("load_predictor: '" + path + "' is not valid JSON: " + e.what());
  }
  LinearPredictor out;
  out.method = method_from_name(j.at("method").get<std::string>());
  out.gamma = vector_from_json(j.at("gamma"));
  out.alpha = j.at("alpha").get<double>();
  out.lambda = j.at("lambda").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                        : j.at("lambda").get<double>();
  out.pseudo_inverse = j.value("pseudo_inverse", false);
  if (j.contains("target_mean")) out.target_mean = vector_from_json(j.at("target_mean"));
  if (j.contains("target_cov")) out.target_cov = matrix_from_nested(j.at("target_cov"));
  if (j.contains("standardization")) {
    const nlohmann::json& s = j.at("standardization");
    Standardization std_rec;
    std_rec.x_mean = vector_from_json(s.at("x_mean"));
    std_rec.x_scale = vector_from_json(s.at("x_scale"));
    std_rec.y_mean = s.at("y_mean").get<double>();
    std_rec.y_scale = s.at("y_scale").get<double>();
    out.standardization = std::move(std_rec);
  }
  return out;
}

}  // namespace anchor
