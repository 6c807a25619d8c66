#pragma once

// JSON problem documents:
//   {"name": "...", "mu": [...], "sigma": [[...], ...], "box": [[lo, hi], ...]}
// with "precision" in place of "sigma" when the precision matrix is given.

#include <string>
#include <vector>

#include "boxcftp/gaussian_model.hpp"

namespace boxcftp {

struct LoadedProblem {
  std::string name;
  GaussianSpec spec;
  std::vector<std::string> warnings;
};

/// SchemaError on malformed documents; ConstructionError when the numbers
/// do not describe a valid truncated normal.
LoadedProblem parse_problem(const std::string& json_text);
/// IoError when the file cannot be read.
LoadedProblem load_problem_file(const std::string& path);

/// Document for `spec` using the covariance form.
std::string problem_to_json(const GaussianSpec& spec, const std::string& name);

}  // namespace boxcftp
