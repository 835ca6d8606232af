#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "tailfit/numeric.hpp"
#include "tailfit/optimize.hpp"
#include "tailfit/rng.hpp"

using namespace tailfit;

TEST_CASE("Philox4x32-10 known answers") {
  const auto zero = detail::philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  const auto ones = detail::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                          {0xffffffff, 0xffffffff});
  CHECK(ones == std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  const auto pi = detail::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                        {0xa4093822, 0x299f31d0});
  CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
  CHECK(replication_stream(1, 0) != replication_stream(0, 1));
  CHECK(CounterRng(9).split(5).stream() == 5);
}

TEST_CASE("variate generators pass goodness-of-fit tests") {
  CounterRng rng(41);
  std::vector<double> u, e, z, p;
  for (int i = 0; i < 20000; ++i) {
    u.push_back(rng.uniform());
    e.push_back(1.0 - std::exp(-rng.exponential()));
    z.push_back(normal_cdf(rng.normal()));
    p.push_back(1.0 - std::pow(rng.pareto(4.0), -4.0));
  }
  CHECK(tailfit::testing::ks_uniform_pvalue(u) > 1e-3);
  CHECK(tailfit::testing::ks_uniform_pvalue(e) > 1e-3);
  CHECK(tailfit::testing::ks_uniform_pvalue(z) > 1e-3);
  CHECK(tailfit::testing::ks_uniform_pvalue(p) > 1e-3);
}

TEST_CASE("normal distribution helpers") {
  CHECK(normal_cdf(0.5) == doctest::Approx(0.691462461274013103637).epsilon(1e-15));
  CHECK(normal_sf(10.0) == doctest::Approx(7.61985302416052606597e-24).epsilon(1e-13));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.95996398454005423552).epsilon(1e-13));
}

TEST_CASE("Nelder-Mead on a quadratic and the Rosenbrock valley") {
  const Box box{{-2, -2}, {2, 2}};
  const Projector clamp = [&](std::span<const double> x) { return box.clamp(x); };
  const Objective quad = [](std::span<const double> x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + 4 * (x[1] + 0.7) * (x[1] + 0.7);
  };
  const double start[] = {1.5, 1.5};
  const OptimumResult r = nelder_mead(quad, start, box, clamp);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(r.x[1] == doctest::Approx(-0.7).epsilon(1e-3));

  const Objective rosen = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  MultiStartOptions opt;
  opt.seed = 3;
  opt.local.max_evaluations = 10000;
  const MultiStartResult m = minimize_multistart(rosen, box, clamp, opt);
  CHECK(m.best.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(m.local_minimum);
  CHECK(m.restarts_used == 8);
}

TEST_CASE("constrained optimum on the boundary stays feasible") {
  const Box box{{0, 0}, {1, 1}};
  const Projector clamp = [&](std::span<const double> x) { return box.clamp(x); };
  const Objective f = [](std::span<const double> x) { return std::hypot(x[0] - 2, x[1] - 0.5); };
  MultiStartOptions opt;
  const MultiStartResult m = minimize_multistart(f, box, clamp, opt);
  CHECK(m.best.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(m.best.x[1] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("Latin hypercube covers every stratum once") {
  const Box box{{0, 10}, {1, 20}};
  CounterRng rng(42);
  const auto pts = latin_hypercube(box, 8, rng);
  for (std::size_t j = 0; j < 2; ++j) {
    std::set<int> strata;
    for (const auto& p : pts) strata.insert(static_cast<int>((p[j] - box.lo[j]) / (box.hi[j] - box.lo[j]) * 8));
    CHECK(strata.size() == 8);
  }
}

TEST_CASE("quadrature") {
  CHECK(integrate_1d([](double x) { return std::exp(-x * x); }, 0, 3, 1e-12) ==
        doctest::Approx(0.886207348259521).epsilon(1e-12));
  const Rectangle r{0, 2, 0, 2};
  CHECK(integrate_rectangle([](double x, double y) { return std::min(x, y); }, r, 1e-12) ==
        doctest::Approx(8.0 / 3.0).epsilon(1e-11));
}
