#pragma once

// JSON configuration loading: structural models, 3x3 observed covariances,
// and fitted-predictor records.
//
// SCM config keys: dims {d_x, d_h, d_a}, ordering (row labels of the printed
// matrices; the loader permutes everything to the canonical (x.., y, h..)
// order), B, M_A, optional Sigma_eps / Sigma_A (default identity), optional
// beta_W / Sigma_epsW / beta_Z / Sigma_epsZ proxy blocks, and a free-text
// "note". Matrices are nested row-major arrays.
//
// A handful of named bundles ship inside the binary (e1, e2, e3, e4 for the
// experiment models, suppB for the 3x3 covariance example); loaders accept
// either a file path or a bundle name.

#include <optional>
#include <string>
#include <vector>

#include "anchor/identifiability.hpp"
#include "anchor/predictor.hpp"
#include "anchor/scm.hpp"

namespace anchor {

struct ScmConfig {
  LinearScm scm;
  std::optional<ProxyModel> proxies;
  std::string name;  // bundle name or file path
};

std::vector<std::string> builtin_config_names();
bool is_builtin_config(const std::string& name);

// Raw JSON text of a builtin bundle; throws std::invalid_argument if unknown.
std::string builtin_config_text(const std::string& name);

// Existing files win over bundle names. The loaded model is validated and an
// std::invalid_argument naming the failed checks is thrown if ill-formed.
ScmConfig load_scm_config(const std::string& path_or_builtin);

struct Sigma3Config {
  ObservedCovariance3 sigma;
  double lambda = 5.0;
};

// Keys: Sigma_XYW (3x3 nested array over (X, Y, W)), optional lambda.
Sigma3Config load_sigma3_config(const std::string& path_or_builtin);

// Predictor records round-trip through JSON exactly (doubles are serialized
// losslessly).
std::string predictor_to_json_text(const LinearPredictor& predictor);
void save_predictor(const LinearPredictor& predictor, const std::string& path);
LinearPredictor load_predictor(const std::string& path);

}  // namespace anchor
