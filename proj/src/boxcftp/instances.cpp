#include "boxcftp/instances.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "boxcftp/errors.hpp"

namespace boxcftp {
namespace {

std::vector<Interval> cube(std::size_t d, double lo, double hi) {
  return std::vector<Interval>(d, Interval{lo, hi});
}

Eigen::MatrixXd ones(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Eigen::MatrixXd::Ones(n, n);
}

Eigen::MatrixXd eye(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd zeros(std::size_t d) { return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)); }

Eigen::MatrixXd table1_covariance() {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, 12.0 / 5.0, 12.0 / 5.0, 9.0;
  return s;
}

std::string fmt_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_real(const std::string& s, const std::string& name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw SchemaError("instance '" + name + "': bad number '" + s + "'");
}

std::size_t parse_dim(const std::string& s, const std::string& name) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || v == 0)
    throw SchemaError("instance '" + name + "': bad dimension '" + s + "'");
  return v;
}

}  // namespace

GaussianSpec table1_instance(double x1, double x2) {
  return GaussianSpec::from_covariance(zeros(2), table1_covariance(),
                                       {{x1, x1 + 1.0}, {x2, x2 + 1.0}});
}

GaussianSpec r_box_instance(int type, double r) {
  if (type != 1 && type != 2) throw DomainError("r_box_instance: type must be 1 or 2");
  if (!(r > 0.0)) throw DomainError("r_box_instance: r must be positive");
  const Interval first = type == 1 ? Interval{0.0, r} : Interval{-r, 0.0};
  return GaussianSpec::from_covariance(zeros(2), table1_covariance(), {first, {0.0, r}});
}

GaussianSpec exchangeable_instance(std::size_t d, bool upper) {
  if (d == 0) throw DomainError("exchangeable_instance: d must be positive");
  // (I/2 + 11'/2)^{-1} = 2I - 2/(1+d) 11' by Sherman-Morrison.
  const Eigen::MatrixXd precision = 0.5 * eye(d) + 0.5 * ones(d);
  const Eigen::MatrixXd covariance = 2.0 * eye(d) - (2.0 / (1.0 + static_cast<double>(d))) * ones(d);
  return GaussianSpec::from_pair(zeros(d), covariance, precision,
                                 upper ? cube(d, 0.5, 1.0) : cube(d, 0.0, 0.5));
}

GaussianSpec neighbor_instance(std::size_t d, double rho) {
  if (d == 0) throw DomainError("neighbor_instance: d must be positive");
  Eigen::MatrixXd precision = eye(d);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const auto a = static_cast<Eigen::Index>(i);
    precision(a, a + 1) = rho;
    precision(a + 1, a) = rho;
  }
  return GaussianSpec::from_precision(zeros(d), precision, cube(d, 0.0, 1.0));
}

GaussianSpec correlated_instance(double eps, std::size_t d) {
  if (d == 0) throw DomainError("correlated_instance: d must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("correlated_instance: eps must lie in (0, 1]");
  const double dd = static_cast<double>(d);
  const Eigen::MatrixXd covariance = eps * eye(d) + (1.0 - eps) * ones(d);
  const Eigen::MatrixXd precision =
      (1.0 / eps) * (eye(d) - ((1.0 - eps) / (eps + (1.0 - eps) * dd)) * ones(d));
  return GaussianSpec::from_pair(zeros(d), covariance, precision, cube(d, 0.0, 1.0));
}

NamedInstance builtin_instance(const std::string& name) {
  const auto parts = split(name, ':');
  const std::string& kind = parts[0];
  auto want = [&](std::size_t n) {
    if (parts.size() != n) throw SchemaError("instance '" + name + "': wrong number of fields");
  };
  if (kind == "table1") {
    want(2);
    const auto xy = split(parts[1], ',');
    if (xy.size() != 2) throw SchemaError("instance '" + name + "': expected table1:X1,X2");
    return {name, table1_instance(parse_real(xy[0], name), parse_real(xy[1], name))};
  }
  if (kind == "r-box") {
    want(3);
    const double type = parse_real(parts[1], name);
    if (type != 1.0 && type != 2.0) throw SchemaError("instance '" + name + "': type must be 1 or 2");
    return {name, r_box_instance(static_cast<int>(type), parse_real(parts[2], name))};
  }
  if (kind == "table2-lower" || kind == "table2-upper") {
    want(2);
    return {name, exchangeable_instance(parse_dim(parts[1], name), kind == "table2-upper")};
  }
  if (kind == "neighbor") {
    want(2);
    return {name, neighbor_instance(parse_dim(parts[1], name))};
  }
  if (kind == "corr") {
    want(3);
    return {name, correlated_instance(parse_real(parts[1], name), parse_dim(parts[2], name))};
  }
  throw SchemaError("unknown built-in instance '" + name + "'");
}

std::vector<NamedInstance> bench_instances(const std::string& selector) {
  std::vector<NamedInstance> out;
  auto add = [&](const std::string& name) { out.push_back(builtin_instance(name)); };
  if (selector == "table1") {
    for (int x2 = 0; x2 <= 4; ++x2)
      for (int x1 = -4; x1 <= 4; ++x1) add("table1:" + std::to_string(x1) + "," + std::to_string(x2));
  } else if (selector == "fig-r-boxes") {
    for (int type = 1; type <= 2; ++type)
      for (double r : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0})
        add("r-box:" + std::to_string(type) + ":" + fmt_number(r));
  } else if (selector == "table2") {
    for (int d = 2; d <= 29; ++d) add("table2-lower:" + std::to_string(d));
    for (int d = 2; d <= 14; ++d) add("table2-upper:" + std::to_string(d));
  } else if (selector == "fig-neighbor") {
    for (int d = 2; d <= 30; ++d) add("neighbor:" + std::to_string(d));
  } else {
    std::ostringstream os;
    os << "unknown bench selector '" << selector << "' (known:";
    for (const auto& s : bench_selectors()) os << " " << s;
    os << ")";
    throw SchemaError(os.str());
  }
  return out;
}

std::vector<std::string> bench_selectors() {
  return {"table1", "fig-r-boxes", "table2", "fig-neighbor"};
}

}  // namespace boxcftp
