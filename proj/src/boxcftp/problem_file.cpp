#include "boxcftp/problem_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "boxcftp/errors.hpp"

namespace boxcftp {
namespace {

using nlohmann::json;

constexpr double kSymmetrizeWarn = 1e-12;
constexpr double kSymmetrizeFail = 1e-9;

double real_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(where + " must be finite");
  return x;
}

Eigen::MatrixXd read_matrix(const json& m, std::size_t d, const std::string& key,
                            std::vector<std::string>& warnings) {
  if (!m.is_array() || m.size() != d)
    throw SchemaError("'" + key + "' must be an array of " + std::to_string(d) + " rows");
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd out(n, n);
  for (std::size_t i = 0; i < d; ++i) {
    if (!m[i].is_array() || m[i].size() != d)
      throw SchemaError("'" + key + "' row " + std::to_string(i + 1) + " must have " +
                        std::to_string(d) + " entries");
    for (std::size_t j = 0; j < d; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          real_at(m[i][j], key + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  const double scale = std::max(1.0, out.cwiseAbs().maxCoeff());
  const double asym = (out - out.transpose()).cwiseAbs().maxCoeff() / scale;
  if (asym > kSymmetrizeFail) {
    std::ostringstream os;
    os << "'" << key << "' is not symmetric (relative asymmetry " << asym << ")";
    throw SchemaError(os.str());
  }
  if (asym > kSymmetrizeWarn) {
    std::ostringstream os;
    os << "'" << key << "' symmetrized (relative asymmetry " << asym << ")";
    warnings.push_back(os.str());
  }
  return 0.5 * (out + out.transpose());
}

}  // namespace

LoadedProblem parse_problem(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("problem file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("problem file must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "mu" && key != "sigma" && key != "precision" && key != "box")
      throw SchemaError("unknown key '" + key + "' in problem file");
  }

  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw SchemaError("'name' must be a string");
    name = doc["name"].get<std::string>();
  }

  if (!doc.contains("mu") || !doc["mu"].is_array() || doc["mu"].empty())
    throw SchemaError("'mu' must be a nonempty array of reals");
  const std::size_t d = doc["mu"].size();
  Eigen::VectorXd mu(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    mu(static_cast<Eigen::Index>(i)) = real_at(doc["mu"][i], "mu[" + std::to_string(i) + "]");

  const bool has_sigma = doc.contains("sigma");
  const bool has_precision = doc.contains("precision");
  if (has_sigma == has_precision)
    throw SchemaError("exactly one of 'sigma' and 'precision' must be given");

  if (!doc.contains("box") || !doc["box"].is_array() || doc["box"].size() != d)
    throw SchemaError("'box' must be an array of " + std::to_string(d) + " [lo, hi] pairs");
  std::vector<Interval> box;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& pair = doc["box"][i];
    const std::string where = "box[" + std::to_string(i) + "]";
    if (!pair.is_array() || pair.size() != 2) throw SchemaError(where + " must be a [lo, hi] pair");
    box.push_back({real_at(pair[0], where + "[0]"), real_at(pair[1], where + "[1]")});
    if (!(box.back().lo < box.back().hi)) throw SchemaError(where + " must satisfy lo < hi");
  }

  std::vector<std::string> warnings;
  const std::string key = has_sigma ? "sigma" : "precision";
  auto matrix = read_matrix(doc[key], d, key, warnings);
  auto spec = has_sigma
                  ? GaussianSpec::from_covariance(std::move(mu), std::move(matrix), std::move(box))
                  : GaussianSpec::from_precision(std::move(mu), std::move(matrix), std::move(box));
  return {std::move(name), std::move(spec), std::move(warnings)};
}

LoadedProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto out = parse_problem(buf.str());
  if (out.name.empty()) out.name = path;
  return out;
}

std::string problem_to_json(const GaussianSpec& spec, const std::string& name) {
  json doc;
  doc["name"] = name;
  const auto d = static_cast<Eigen::Index>(spec.dim());
  doc["mu"] = json::array();
  doc["sigma"] = json::array();
  doc["box"] = json::array();
  for (Eigen::Index i = 0; i < d; ++i) {
    doc["mu"].push_back(spec.mu()(i));
    json row = json::array();
    for (Eigen::Index j = 0; j < d; ++j) row.push_back(spec.covariance()(i, j));
    doc["sigma"].push_back(row);
    const auto& iv = spec.box(static_cast<std::size_t>(i));
    doc["box"].push_back({iv.lo, iv.hi});
  }
  return doc.dump(2) + "\n";
}

}  // namespace boxcftp
