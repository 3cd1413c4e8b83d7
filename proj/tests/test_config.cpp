#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "anchor/config.hpp"
#include "support/oracle.hpp"

using namespace anchor;
namespace ts = anchor::testsupport;

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& content) {
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  out << content;
  REQUIRE(out.good());
  return path;
}

}  // namespace

TEST_CASE("the bundled names are known and nothing else is") {
  const auto names = builtin_config_names();
  for (const char* name : {"e1", "e2", "e3", "e4", "suppB"}) {
    CAPTURE(name);
    CHECK(std::find(names.begin(), names.end(), name) != names.end());
    CHECK(is_builtin_config(name));
  }
  CHECK_FALSE(is_builtin_config("e5"));
  CHECK_THROWS_AS(builtin_config_text("e5"), std::invalid_argument);
}

TEST_CASE("bundled text matches the shipped config files") {
  for (const char* name : {"e1", "e2", "e3", "e4", "suppB"}) {
    CAPTURE(name);
    const nlohmann::json bundled = nlohmann::json::parse(builtin_config_text(name));
    const nlohmann::json on_disk =
        read_json_file(ts::repo_path(std::string("configs/") + name + ".json"));
    CHECK(bundled == on_disk);
  }
}

TEST_CASE("the first bundle permutes its printed matrices into canonical order") {
  const ScmConfig cfg = load_scm_config("e1");
  CHECK(cfg.scm.d_x == 3);
  CHECK(cfg.scm.d_h == 1);
  CHECK(cfg.scm.d_a == 3);
  // printed order is (y, x1, x2, x3, h1); canonically y sits at row 3
  CHECK(cfg.scm.b(3, 0) == -2.0);
  CHECK(cfg.scm.b(3, 1) == 2.0);
  CHECK(cfg.scm.b(3, 2) == 0.0);
  CHECK(cfg.scm.b(3, 4) == 1.0);
  CHECK(cfg.scm.b(2, 3) == 3.0);
  CHECK(cfg.scm.b(2, 4) == 1.0);
  CHECK(cfg.scm.b(0, 0) == 0.0);
  CHECK(cfg.scm.m_a.row(3) == Eigen::RowVector3d(1.0, 0.0, -2.0));
  CHECK(cfg.scm.m_a.row(0) == Eigen::RowVector3d(0.0, 2.0, 1.0));
  CHECK(cfg.scm.m_a.row(1) == Eigen::RowVector3d(-1.0, 3.0, 0.0));
  CHECK(cfg.scm.m_a.row(2) == Eigen::RowVector3d(2.0, 2.0, -3.0));
  CHECK(cfg.scm.m_a.row(4) == Eigen::RowVector3d(0.0, -2.0, 2.0));
  CHECK(cfg.scm.sigma_eps == Matrix::Identity(5, 5));
  CHECK(cfg.scm.sigma_a == Matrix::Identity(3, 3));
  REQUIRE(cfg.proxies.has_value());
  CHECK(cfg.proxies->beta_w == Matrix::Identity(3, 3));
  CHECK(cfg.proxies->has_z());
  CHECK(cfg.proxies->beta_z == Matrix::Identity(3, 3));
}

TEST_CASE("the targeted bundle carries no proxies") {
  const ScmConfig cfg = load_scm_config("e4");
  CHECK(cfg.scm.d_x == 2);
  CHECK(cfg.scm.d_h == 1);
  CHECK(cfg.scm.d_a == 2);
  CHECK_FALSE(cfg.proxies.has_value());
  CHECK(cfg.scm.m_a.row(2) == Eigen::RowVector2d(2.0, 1.0));
}

TEST_CASE("a file path wins over a bundle name and loads identically") {
  const ScmConfig by_name = load_scm_config("e1");
  const ScmConfig by_path = load_scm_config(ts::repo_path("configs/e1.json"));
  CHECK(by_name.scm.b == by_path.scm.b);
  CHECK(by_name.scm.m_a == by_path.scm.m_a);
  CHECK(by_name.scm.sigma_eps == by_path.scm.sigma_eps);
}

TEST_CASE("any row ordering of the printed matrices loads to the same model") {
  const ScmConfig reference = load_scm_config("e1");
  nlohmann::json j;
  j["dims"] = {{"d_x", 3}, {"d_h", 1}, {"d_a", 3}};
  j["ordering"] = {"x1", "x2", "x3", "y", "h1"};
  auto to_nested = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  j["B"] = to_nested(reference.scm.b);
  j["M_A"] = to_nested(reference.scm.m_a);
  j["beta_W"] = to_nested(reference.proxies->beta_w);
  j["beta_Z"] = to_nested(reference.proxies->beta_z);
  const std::string dir = ts::make_temp_dir("config");
  const std::string path = write_file(dir, "canonical.json", j.dump(2));
  const ScmConfig cfg = load_scm_config(path);
  CHECK(cfg.scm.b == reference.scm.b);
  CHECK(cfg.scm.m_a == reference.scm.m_a);
}

TEST_CASE("malformed configs are rejected with specific messages") {
  const std::string dir = ts::make_temp_dir("config");
  CHECK_THROWS_AS(load_scm_config("nonexistent"), std::invalid_argument);

  const std::string unknown_key = write_file(dir, "unknown.json", R"({
    "dims": {"d_x": 1, "d_h": 0, "d_a": 1},
    "B": [[0, 0], [1, 0]], "M_A": [[1], [1]], "Gamma": 3
  })");
  CHECK_THROWS_AS(load_scm_config(unknown_key), std::invalid_argument);

  const std::string bad_order = write_file(dir, "badorder.json", R"({
    "dims": {"d_x": 1, "d_h": 0, "d_a": 1},
    "ordering": ["y", "y"],
    "B": [[0, 0], [1, 0]], "M_A": [[1], [1]]
  })");
  CHECK_THROWS_AS(load_scm_config(bad_order), std::invalid_argument);

  const std::string bad_shape = write_file(dir, "badshape.json", R"({
    "dims": {"d_x": 1, "d_h": 0, "d_a": 1},
    "B": [[0, 0, 0], [1, 0, 0], [0, 0, 0]], "M_A": [[1], [1]]
  })");
  CHECK_THROWS_AS(load_scm_config(bad_shape), std::invalid_argument);

  const std::string z_only = write_file(dir, "zonly.json", R"({
    "dims": {"d_x": 1, "d_h": 0, "d_a": 1},
    "B": [[0, 0], [1, 0]], "M_A": [[1], [1]],
    "Sigma_epsZ": [[1]]
  })");
  CHECK_THROWS_AS(load_scm_config(z_only), std::invalid_argument);

  // structurally cyclic model: Id - B singular, caught by validation
  const std::string cyclic = write_file(dir, "cyclic.json", R"({
    "dims": {"d_x": 1, "d_h": 0, "d_a": 1},
    "B": [[0, 1], [1, 0]], "M_A": [[1], [1]]
  })");
  CHECK_THROWS_AS(load_scm_config(cyclic), std::invalid_argument);
}

TEST_CASE("the covariance bundle and overrides") {
  const Sigma3Config cfg = load_sigma3_config("suppB");
  CHECK(cfg.sigma.sxx == 9.0);
  CHECK(cfg.sigma.sxy == 3.0);
  CHECK(cfg.sigma.sxw == 1.0);
  CHECK(cfg.sigma.syy == 9.0);
  CHECK(cfg.sigma.syw == 2.0);
  CHECK(cfg.sigma.sww == 9.0);
  CHECK(cfg.lambda == 5.0);

  const std::string dir = ts::make_temp_dir("config");
  const std::string path = write_file(dir, "sigma.json", R"({
    "Sigma_XYW": [[4, 1, 0.5], [1, 4, 1], [0.5, 1, 4]],
    "lambda": 2.5
  })");
  const Sigma3Config custom = load_sigma3_config(path);
  CHECK(custom.sigma.sxx == 4.0);
  CHECK(custom.lambda == 2.5);

  const std::string bad = write_file(dir, "bad_sigma.json", R"({
    "Sigma_XYW": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
  })");
  // corr(W, X) = 0 is outside the family's assumptions
  CHECK_THROWS_AS(load_sigma3_config(bad), std::invalid_argument);
}

TEST_CASE("predictor records survive a JSON round trip exactly") {
  const std::string dir = ts::make_temp_dir("config");
  LinearPredictor p;
  p.gamma = Vector(3);
  p.gamma << 0.1, -1.0 / 3.0, 2e-17;
  p.alpha = -0.75;
  p.method = Method::kXtar;
  p.lambda = std::numeric_limits<double>::quiet_NaN();
  p.target_mean = Vector(2);
  p.target_mean << 1.0, -2.0;
  p.target_cov = Matrix(2, 2);
  p.target_cov << 2.0, 0.5, 0.5, 1.0;
  Standardization s;
  s.x_mean = Vector(3);
  s.x_mean << 1.0, 2.0, 3.0;
  s.x_scale = Vector(3);
  s.x_scale << 0.5, 1.5, 2.5;
  s.y_mean = 4.0;
  s.y_scale = 0.25;
  p.standardization = s;
  p.pseudo_inverse = true;

  const std::string path = dir + "/pred.json";
  save_predictor(p, path);
  const LinearPredictor q = load_predictor(path);
  CHECK(q.method == Method::kXtar);
  CHECK((q.gamma.array() == p.gamma.array()).all());
  CHECK(q.alpha == p.alpha);
  CHECK(std::isnan(q.lambda));
  CHECK((q.target_mean.array() == p.target_mean.array()).all());
  CHECK((q.target_cov.array() == p.target_cov.array()).all());
  REQUIRE(q.standardization.has_value());
  CHECK((q.standardization->x_mean.array() == s.x_mean.array()).all());
  CHECK((q.standardization->x_scale.array() == s.x_scale.array()).all());
  CHECK(q.standardization->y_mean == s.y_mean);
  CHECK(q.standardization->y_scale == s.y_scale);
  CHECK(q.pseudo_inverse);

  LinearPredictor plain;
  plain.gamma = Vector::Ones(1);
  plain.method = Method::kPar;
  plain.lambda = 5.0;
  const std::string path2 = dir + "/plain.json";
  save_predictor(plain, path2);
  const LinearPredictor r = load_predictor(path2);
  CHECK(r.lambda == 5.0);
  CHECK(r.method == Method::kPar);
  CHECK_FALSE(r.standardization.has_value());
  CHECK(r.target_mean.size() == 0);
  CHECK_FALSE(r.pseudo_inverse);
}
