#include <doctest.h>

#include <cmath>

#include "boxcftp/errors.hpp"
#include "boxcftp/instances.hpp"
#include "boxcftp/problem_file.hpp"

using namespace boxcftp;

TEST_SUITE("instances") {

TEST_CASE("bench selectors expand to the expected families") {
  CHECK(bench_instances("table1").size() == 45);
  CHECK(bench_instances("fig-r-boxes").size() == 14);
  CHECK(bench_instances("table2").size() == 28 + 13);
  CHECK(bench_instances("fig-neighbor").size() == 29);
  CHECK_THROWS_AS(bench_instances("table9"), SchemaError);
  for (const auto& s : bench_selectors()) CHECK_NOTHROW(bench_instances(s));
}

TEST_CASE("names parse into the documented laws") {
  const auto t1 = builtin_instance("table1:-1,2").spec;
  CHECK(t1.box(0).lo == -1.0);
  CHECK(t1.box(1).hi == 3.0);
  CHECK(t1.covariance()(0, 1) == doctest::Approx(2.4));

  const auto ex = builtin_instance("table2-upper:6").spec;
  REQUIRE(ex.dim() == 6);
  CHECK(ex.box(3).lo == 0.5);
  CHECK(ex.precision()(0, 0) == doctest::Approx(1.0));
  CHECK(ex.precision()(0, 5) == doctest::Approx(0.5));
  // Sherman-Morrison against a direct inverse.
  const Eigen::MatrixXd inv = ex.precision().inverse();
  CHECK((inv - ex.covariance()).cwiseAbs().maxCoeff() < 1e-12);

  const auto corr = builtin_instance("corr:0.1:3").spec;
  CHECK(corr.covariance()(0, 0) == doctest::Approx(1.0));
  CHECK(corr.covariance()(0, 2) == doctest::Approx(0.9));
  CHECK((corr.precision() * corr.covariance() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);

  const auto nb = builtin_instance("neighbor:4").spec;
  CHECK(nb.precision()(1, 2) == 0.5);
  CHECK(nb.precision()(0, 2) == 0.0);

  const auto rb = builtin_instance("r-box:2:1.5").spec;
  CHECK(rb.box(0).lo == -1.5);
  CHECK(rb.box(1).hi == 1.5);
}

TEST_CASE("malformed names are schema errors") {
  for (const char* bad : {"table1", "table1:a,b", "neighbor:0", "corr:0.1", "nope:3", "table2-upper:x"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(builtin_instance(bad), SchemaError);
  }
}

}  // TEST_SUITE

TEST_SUITE("problem_file") {

TEST_CASE("covariance and precision documents") {
  const auto p = parse_problem(R"({"name": "t", "mu": [0, 1], "sigma": [[1, 0.5], [0.5, 2]],
                                   "box": [[0, 1], [-1, 2]]})");
  CHECK(p.name == "t");
  CHECK(p.warnings.empty());
  CHECK(p.spec.mu()(1) == 1.0);
  CHECK(p.spec.box(1).lo == -1.0);

  const auto q = parse_problem(R"({"mu": [0], "precision": [[4]], "box": [[0, 1]]})");
  CHECK(q.spec.sigma_hat(0) == doctest::Approx(0.5));
}

TEST_CASE("schema violations") {
  const char* bad[] = {
      R"({"mu": [0], "box": [[0, 1]]})",
      R"({"mu": [0], "sigma": [[1]], "precision": [[1]], "box": [[0, 1]]})",
      R"({"mu": [0], "sigma": [[1]], "box": [[0, 1]], "extra": 1})",
      R"({"mu": [0, 0], "sigma": [[1]], "box": [[0, 1]]})",
      R"({"mu": [0], "sigma": [[1]], "box": [[1, 0]]})",
      R"({"mu": [0], "sigma": [[1]], "box": [[0]]})",
      R"({"mu": "x", "sigma": [[1]], "box": [[0, 1]]})",
      R"([1, 2])",
      R"({"mu": [0], )",
  };
  for (const char* doc : bad) {
    CAPTURE(doc);
    CHECK_THROWS_AS(parse_problem(doc), SchemaError);
  }
}

TEST_CASE("tiny asymmetry is repaired with a warning, larger asymmetry is refused") {
  const auto ok = parse_problem(R"({"mu": [0, 0], "sigma": [[1, 0.5], [0.5000000001, 1]],
                                    "box": [[0, 1], [0, 1]]})");
  CHECK(ok.warnings.size() == 1);
  CHECK(ok.spec.covariance()(0, 1) == ok.spec.covariance()(1, 0));
  CHECK_THROWS_AS(parse_problem(R"({"mu": [0, 0], "sigma": [[1, 0.5], [0.51, 1]],
                                    "box": [[0, 1], [0, 1]]})"),
                  SchemaError);
  CHECK_THROWS_AS(parse_problem(R"({"mu": [0, 0], "sigma": [[1, 2], [2, 1]],
                                    "box": [[0, 1], [0, 1]]})"),
                  ConstructionError);
}

TEST_CASE("emitted documents parse back to the same law") {
  const auto spec = builtin_instance("table2-lower:4").spec;
  const auto back = parse_problem(problem_to_json(spec, "x"));
  CHECK(back.name == "x");
  CHECK(back.spec.covariance() == spec.covariance());
  CHECK(back.spec.mu() == spec.mu());
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(back.spec.box(k).lo == spec.box(k).lo);
    CHECK(back.spec.box(k).hi == spec.box(k).hi);
  }
}

TEST_CASE("missing files are I/O errors") {
  CHECK_THROWS_AS(load_problem_file("/nonexistent/problem.json"), IoError);
}

}  // TEST_SUITE
