#include <doctest.h>

#include <cmath>

#include "boxcftp/cftp.hpp"
#include "boxcftp/instances.hpp"
#include "oracles.hpp"

using namespace boxcftp;

TEST_SUITE("coefficients") {

TEST_CASE("R for the equicorrelated family agrees with the covariance-only oracle") {
  for (double eps : {0.1, 0.01}) {
    for (std::size_t d : {2u, 4u, 8u}) {
      const auto spec = correlated_instance(eps, d);
      const std::vector<double> lo(d, 0.0), hi(d, 1.0);
      const double want = oracle::coupling_coefficient(spec.covariance(), spec.mu(), 0, lo, hi);
      CAPTURE(eps);
      CAPTURE(d);
      CHECK(std::abs(coupling_coefficient(spec, 0) - want) <= 1e-9 * std::max(1e-3, want));
    }
  }
}

TEST_CASE("R for the equicorrelated family matches the published table") {
  const std::size_t dims[] = {2, 4, 8, 16, 32};
  const double coarse[] = {0.5139, 0.3446, 0.2792, 0.2507, 0.2375};
  const double fine[] = {0.8753e-3, 0.3121e-4, 0.5969e-5, 0.2615e-5, 0.1731e-5};
  for (int i = 0; i < 5; ++i) {
    CAPTURE(dims[i]);
    CHECK(std::abs(coupling_coefficient(correlated_instance(0.1, dims[i]), 0) - coarse[i]) <= 5e-4);
    CHECK(std::abs(coupling_coefficient(correlated_instance(0.01, dims[i]), 0) / fine[i] - 1.0) <= 1e-2);
  }
}

TEST_CASE("exchangeable laws give equal coefficients in every coordinate") {
  const auto spec = correlated_instance(0.1, 6);
  const CouplingContext ctx(spec);
  const auto r = ctx.coupling_coefficients();
  for (double v : r) CHECK(std::abs(v - r[0]) < 1e-12);
}

}  // TEST_SUITE
