#include <doctest.h>

#include <cmath>
#include <string>

#include "boxcftp/cftp.hpp"
#include "boxcftp/errors.hpp"
#include "boxcftp/instances.hpp"
#include "boxcftp/ks.hpp"
#include "boxcftp/normal1d.hpp"
#include "boxcftp/quadrature.hpp"

using namespace boxcftp;

namespace {

bool in_box(const GaussianSpec& spec, const std::vector<double>& x) {
  for (std::size_t k = 0; k < spec.dim(); ++k)
    if (!spec.box(k).contains(x[k])) return false;
  return true;
}

bool same_result(const SampleResult& a, const SampleResult& b) {
  return a.sample == b.sample && a.tau == b.tau && a.n_uniform_uses == b.n_uniform_uses;
}

GaussianSpec one_dim() {
  Eigen::VectorXd mu(1);
  mu << 0.4;
  Eigen::MatrixXd s(1, 1);
  s << 0.25;
  return GaussianSpec::from_covariance(mu, s, {{-1.0, 0.5}});
}

}  // namespace

TEST_SUITE("cftp") {

TEST_CASE("d = 1 is an exact inverse-cdf draw at time 0") {
  const auto spec = one_dim();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = perfect_sample(spec, seed);
    RandomnessTape tape(seed, Schedule::periodic, 1);
    const double want = trunc_quantile({0.4, 0.5, -1.0, 0.5}, tape.peek(0).u);
    CHECK(r.sample[0] == want);
    CHECK(r.tau == 0);
    CHECK(r.n_uniform_uses == 1);
  }
}

TEST_CASE("decrement backoff with the periodic schedule reads (|tau|+1)(|tau|+2)/2 uniforms") {
  const CouplingContext ctx(table1_instance(1.0, 2.0));
  for (bool shortcut : {true, false}) {
    CftpOptions o;
    o.stop_on_agreement = shortcut;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      const auto r = perfect_sample(ctx, seed, o);
      const auto m = static_cast<std::uint64_t>(-r.tau);
      CHECK(r.n_uniform_uses == (m + 1) * (m + 2) / 2);
      CHECK(r.outer_iterations == m + 1);
    }
  }
}

TEST_CASE("ending passes early on agreement changes nothing observable") {
  const std::string names[] = {"table1:-2,1", "table2-upper:6", "neighbor:7", "corr:0.1:3"};
  for (const auto& name : names) {
    const CouplingContext ctx(builtin_instance(name).spec);
    for (Schedule s : {Schedule::periodic, Schedule::random}) {
      for (Backoff b : {Backoff::decrement, Backoff::doubling}) {
        CftpOptions fast;
        fast.schedule = s;
        fast.backoff = b;
        CftpOptions slow = fast;
        slow.stop_on_agreement = false;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
          CAPTURE(name);
          CAPTURE(seed);
          CHECK(same_result(perfect_sample(ctx, seed, fast), perfect_sample(ctx, seed, slow)));
        }
      }
    }
  }
}

TEST_CASE("passes are monotone and pinned values persist; extra passes leave time 0 alone") {
  const std::string names[] = {"table1:0,0", "r-box:2:4", "neighbor:5"};
  for (const auto& name : names) {
    const CouplingContext ctx(builtin_instance(name).spec);
    for (Backoff b : {Backoff::decrement, Backoff::doubling}) {
      CftpOptions plain;
      plain.backoff = b;
      CftpOptions checked = plain;
      checked.check_invariants = true;
      checked.extra_passes = 3;
      checked.stop_on_agreement = false;
      for (std::uint64_t seed = 0; seed < 60; ++seed) {
        CAPTURE(name);
        CAPTURE(seed);
        const auto base = perfect_sample(ctx, seed, plain);
        const auto ext = perfect_sample(ctx, seed, checked);
        CHECK(ext.sample == base.sample);
        CHECK(ext.tau == base.tau);
        CHECK(ext.diagnostics.passes_checked == ext.outer_iterations - 1);
        CHECK(ext.diagnostics.monotonicity_violations == 0);
        CHECK(ext.diagnostics.persistence_violations == 0);
        CHECK(in_box(ctx.spec(), base.sample));
      }
    }
  }
}

TEST_CASE("doubling starts at powers of two") {
  const CouplingContext ctx(exchangeable_instance(8, true));
  CftpOptions o;
  o.backoff = Backoff::doubling;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = perfect_sample(ctx, seed, o);
    const auto m = static_cast<std::uint64_t>(-r.tau);
    CHECK((m == 0 || (m & (m - 1)) == 0));
    CHECK(in_box(ctx.spec(), r.sample));
  }
}

TEST_CASE("samples are reproducible and differ across seeds") {
  const CouplingContext ctx(neighbor_instance(6));
  CftpOptions o;
  o.schedule = Schedule::random;
  CHECK(same_result(perfect_sample(ctx, 17, o), perfect_sample(ctx, 17, o)));
  CHECK(perfect_sample(ctx, 17, o).sample != perfect_sample(ctx, 18, o).sample);
}

TEST_CASE("hitting the start-time cap is a loud failure naming the coupling coefficients") {
  const CouplingContext ctx(correlated_instance(0.01, 4));
  CftpOptions o;
  o.max_abs_start = 20;
  bool thrown = false;
  for (std::uint64_t seed = 0; seed < 5 && !thrown; ++seed) {
    try {
      perfect_sample(ctx, seed, o);
    } catch (const NoCoalescenceError& e) {
      thrown = true;
      CHECK(std::string(e.what()).find("R_k(B)") != std::string::npos);
    }
  }
  CHECK(thrown);
}

TEST_CASE("coupler rules") {
  const CouplingContext ctx(table1_instance(0.0, 0.0));
  const auto full = full_box_state(2);
  const double r1 = ctx.full_envelope(0).r_total();

  SUBCASE("a coordinate already pinned in the previous pass is kept") {
    BoxState xi2 = full;
    xi2[0] = CoordState::point(0.3);
    const auto out = coupler(ctx, full, xi2, 0.999, 0);
    CHECK(out[0] == CoordState::point(0.3));
    CHECK(out[1].is_full_range());
  }
  SUBCASE("uniform above the envelope mass leaves the coordinate free") {
    const auto out = coupler(ctx, full, full, std::min(1.0, r1 + 1e-3), 0);
    CHECK(out[0].is_full_range());
  }
  SUBCASE("without a previous pass, pins come from the envelope quantile") {
    const auto out = coupler_without_previous(ctx, full, 0.5 * r1, 0);
    CHECK(out[0].value() == envelope_quantile(ctx.full_envelope(0), 0.5 * r1));
  }
  SUBCASE("fresh pins under a narrower interval come from the increment D") {
    BoxState xi1 = full;
    xi1[1] = CoordState::point(0.6);
    const double u = 0.5 * (r1 + 1.0);
    const auto out = coupler(ctx, xi1, full, u, 0);
    const Envelope inner = ctx.envelope(0, xi1);
    CHECK(out[0].value() == d_inverse(ctx.full_envelope(0), inner, u));
    CHECK(out[1] == CoordState::point(0.6));
  }
  SUBCASE("a previous pin that the current pass contradicts is an invariant failure") {
    BoxState xi1 = full;
    xi1[1] = CoordState::point(0.6);
    BoxState xi2 = full;
    xi2[1] = CoordState::point(0.7);
    CHECK_THROWS_AS(coupler(ctx, xi1, xi2, 0.1, 0), InvariantError);
  }
  SUBCASE("start pins the scheduled coordinate when the uniform is small enough") {
    RandomnessTape tape(3, Schedule::periodic, 2);
    for (std::int64_t t = 0; t > -40; --t) {
      const auto e = tape.peek(t);
      const auto s = start(ctx, tape, t);
      CHECK(s[e.site].is_point() == (e.u <= ctx.full_envelope(e.site).r_total()));
      CHECK(s[1 - e.site].is_full_range());
    }
  }
}

TEST_CASE("marginals of perfect samples match quadrature, for every schedule and backoff") {
  const std::string names[] = {"table1:-1,0", "neighbor:3"};
  for (const auto& name : names) {
    const auto spec = builtin_instance(name).spec;
    const CouplingContext ctx(spec);
    for (Schedule s : {Schedule::periodic, Schedule::random}) {
      for (Backoff b : {Backoff::decrement, Backoff::doubling}) {
        CftpOptions o;
        o.schedule = s;
        o.backoff = b;
        std::vector<std::vector<double>> xs(spec.dim());
        for (std::uint64_t i = 0; i < 4000; ++i) {
          const auto r = perfect_sample(ctx, mix_seed(99, i), o);
          for (std::size_t k = 0; k < spec.dim(); ++k) xs[k].push_back(r.sample[k]);
        }
        for (std::size_t k = 0; k < spec.dim(); ++k) {
          const MarginalCdf cdf(spec, k);
          const auto ks = ks_one_sample(xs[k], [&](double x) { return cdf(x); });
          CAPTURE(name);
          CAPTURE(k);
          CHECK(ks.statistic < ks.threshold);
        }
      }
    }
  }
}

TEST_CASE("forward Gibbs baseline stays in the box and settles on the same mean") {
  const auto spec = table1_instance(0.0, 0.0);
  const double x0[2] = {0.5, 0.5};
  double mean = 0.0;
  const int chains = 2000;
  for (int i = 0; i < chains; ++i) {
    const auto x = forward_gibbs(spec, x0, 200, static_cast<std::uint64_t>(i));
    CHECK(spec.box(0).contains(x[0]));
    mean += x[0] / chains;
  }
  const MarginalCdf cdf(spec, 0);
  CHECK(std::abs(mean - cdf.mean()) < 0.02);
  const double outside[2] = {2.0, 0.5};
  CHECK_THROWS_AS(forward_gibbs(spec, outside, 1, 0), DomainError);
}

}  // TEST_SUITE
