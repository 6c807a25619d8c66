#pragma once

// Built-in benchmark instances, generated from closed forms.

#include <cstddef>
#include <string>
#include <vector>

#include "boxcftp/gaussian_model.hpp"

namespace boxcftp {

struct NamedInstance {
  std::string id;
  GaussianSpec spec;
};

/// mu = 0, Sigma = [[1, 12/5], [12/5, 9]], box [0,1]^2 + (x1, x2).
GaussianSpec table1_instance(double x1, double x2);
/// Same law on [0,r]^2 (type 1) or [-r,0] x [0,r] (type 2).
GaussianSpec r_box_instance(int type, double r);
/// mu = 0, precision I/2 + 11'/2; box [0,1/2]^d, or [1/2,1]^d when `upper`.
GaussianSpec exchangeable_instance(std::size_t d, bool upper);
/// mu = 0, tridiagonal precision (1 on the diagonal, rho next to it), box [0,1]^d.
GaussianSpec neighbor_instance(std::size_t d, double rho = 0.5);
/// mu = 0, Sigma = eps I + (1 - eps) 11', box [0,1]^d.
GaussianSpec correlated_instance(double eps, std::size_t d);

/// Instance by name: "table1:X1,X2", "r-box:TYPE:R", "table2-lower:D",
/// "table2-upper:D", "neighbor:D", "corr:EPS:D". SchemaError if unknown.
NamedInstance builtin_instance(const std::string& name);

/// Instance family for a bench selector: table1, fig-r-boxes, table2,
/// fig-neighbor. SchemaError if unknown.
std::vector<NamedInstance> bench_instances(const std::string& selector);

std::vector<std::string> bench_selectors();

}  // namespace boxcftp
