#include <cmath>
#include <stdexcept>

#include "cif/model.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace cif;

TEST_SUITE_BEGIN("model");

TEST_CASE("ModelParams::validate accepts defaults and boundary regimes") {
  CHECK_NOTHROW(ModelParams{}.validate());

  ModelParams p;
  p.gamma = 0.0;  // linearized-around-zero regime
  p.delta = 0.0;
  p.mu = 0.0;  // uncontrolled
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("ModelParams::validate rejects out-of-range coefficients") {
  const auto reject = [](auto mutate) {
    ModelParams p;
    mutate(p);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  };
  reject([](ModelParams& p) { p.nu = 0.0; });
  reject([](ModelParams& p) { p.nu = -0.1; });
  reject([](ModelParams& p) { p.gamma = -1.0; });
  reject([](ModelParams& p) { p.delta = -1.0; });
  reject([](ModelParams& p) { p.mu = -1.0; });
  reject([](ModelParams& p) { p.c_p = 0.0; });
}

TEST_CASE("stabilization conditions at the reference operating point") {
  // nu=0.1, gamma=delta=9, mu=20, c_p=1, h=0.01:
  //   nu lower bound: 20*1*1e-4/2 = 1e-3 <= 0.1
  //   mu lower bound: 2*(9 + 0.1)  = 18.2 <= 20
  //   alpha_max = (20 - 18 - 0.2)/2 = 0.9
  //   beta = 2*0.1 - 20*1e-4 = 0.198
  const ModelParams p{0.1, 9.0, 9.0, 20.0, 1.0};
  const ConditionReport c = check_stabilization_conditions(p, 0.01);
  CHECK(c.nu_lower_ok);
  CHECK(c.mu_lower_ok);
  CHECK(c.all_ok());
  CHECK(c.alpha_max == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(c.beta == doctest::Approx(0.198).epsilon(1e-14));
}

TEST_CASE("stabilization conditions report failures without throwing") {
  ModelParams p{0.1, 9.0, 9.0, 20.0, 1.0};

  SUBCASE("observation scale too coarse") {
    const ConditionReport c = check_stabilization_conditions(p, 0.2);
    CHECK_FALSE(c.nu_lower_ok);  // 20*0.04/2 = 0.4 > 0.1
    CHECK(c.mu_lower_ok);
    CHECK_FALSE(c.all_ok());
    CHECK(c.beta == doctest::Approx(2 * 0.1 - 20 * 0.04).epsilon(1e-14));
    CHECK(c.beta < 0.0);
  }

  SUBCASE("gain too small") {
    p.mu = 10.0;  // < 2*(9 + 0.1)
    const ConditionReport c = check_stabilization_conditions(p, 0.01);
    CHECK(c.nu_lower_ok);
    CHECK_FALSE(c.mu_lower_ok);
    CHECK(c.alpha_max == 0.0);  // clamped at zero
  }

  SUBCASE("uncontrolled runs are legitimate") {
    p.mu = 0.0;
    const ConditionReport c = check_stabilization_conditions(p, 0.01);
    CHECK(c.nu_lower_ok);  // 0 <= nu trivially
    CHECK_FALSE(c.mu_lower_ok);
    CHECK(c.alpha_max == 0.0);
  }
}

TEST_CASE("stabilization conditions reject a non-positive scale") {
  CHECK_THROWS_AS(check_stabilization_conditions(ModelParams{}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(check_stabilization_conditions(ModelParams{}, -0.1), std::invalid_argument);
}

TEST_CASE("alpha_max > 0 implies the gain condition holds") {
  testutil::Rng rng(91);
  for (int trial = 0; trial < 200; ++trial) {
    ModelParams p;
    p.nu = rng.uniform(0.01, 2.0);
    p.gamma = rng.uniform(0.0, 20.0);
    p.mu = rng.uniform(0.0, 60.0);
    const ConditionReport c = check_stabilization_conditions(p, 0.01);
    if (c.alpha_max > 0.0) CHECK(c.mu_lower_ok);
    CHECK(c.alpha_max >= 0.0);
    CHECK(c.alpha_max == doctest::Approx(std::max(0.0, (p.mu - 2 * p.gamma - 2 * p.nu) / 2))
                             .epsilon(1e-14));
  }
}

TEST_CASE("Laplacian eigenvalues per boundary condition") {
  const double pi = 3.14159265358979323846;
  CHECK(laplacian_eigenvalue(BoundaryCondition::Mixed, 0) ==
        doctest::Approx(pi * pi / 4).epsilon(1e-15));
  CHECK(laplacian_eigenvalue(BoundaryCondition::Mixed, 2) ==
        doctest::Approx(25 * pi * pi / 4).epsilon(1e-15));
  CHECK(laplacian_eigenvalue(BoundaryCondition::Dirichlet, 1) ==
        doctest::Approx(pi * pi).epsilon(1e-15));
  CHECK(laplacian_eigenvalue(BoundaryCondition::Neumann, 0) == 0.0);
  CHECK(laplacian_eigenvalue(BoundaryCondition::Neumann, 3) ==
        doctest::Approx(9 * pi * pi).epsilon(1e-15));
}

TEST_CASE("eigenvalue index validation matches the first valid mode") {
  CHECK(first_mode_index(BoundaryCondition::Mixed) == 0);
  CHECK(first_mode_index(BoundaryCondition::Dirichlet) == 1);
  CHECK(first_mode_index(BoundaryCondition::Neumann) == 0);

  CHECK_THROWS_AS(laplacian_eigenvalue(BoundaryCondition::Mixed, -1), std::invalid_argument);
  CHECK_THROWS_AS(laplacian_eigenvalue(BoundaryCondition::Dirichlet, 0), std::invalid_argument);
  CHECK_THROWS_AS(laplacian_eigenvalue(BoundaryCondition::Neumann, -1), std::invalid_argument);
}

TEST_CASE("linearized mode rates at the reference operating point") {
  const ModelParams p{0.1, 9.0, 9.0, 20.0, 1.0};
  // rate_n = gamma - nu*((2n+1)pi/2)^2
  CHECK(linearized_mode_rate(p, BoundaryCondition::Mixed, 0) ==
        doctest::Approx(8.753259889972766).epsilon(1e-12));
  CHECK(linearized_mode_rate(p, BoundaryCondition::Mixed, 1) ==
        doctest::Approx(6.779339009754894).epsilon(1e-12));
  CHECK(linearized_mode_rate(p, BoundaryCondition::Mixed, 2) ==
        doctest::Approx(2.831497249319151).epsilon(1e-12));
  CHECK(linearized_mode_rate(p, BoundaryCondition::Mixed, 3) < 0.0);
}

TEST_CASE("unstable mode counts") {
  const ModelParams p{0.1, 9.0, 9.0, 20.0, 1.0};
  CHECK(unstable_mode_count(p, BoundaryCondition::Mixed) == 3);
  // Dirichlet: 0.1*(n*pi)^2 < 9 for n = 1, 2, 3.
  CHECK(unstable_mode_count(p, BoundaryCondition::Dirichlet) == 3);
  // Neumann adds the constant mode n = 0 with rate gamma > 0.
  CHECK(unstable_mode_count(p, BoundaryCondition::Neumann) == 4);

  ModelParams diffusive = p;
  diffusive.gamma = 0.0;
  CHECK(unstable_mode_count(diffusive, BoundaryCondition::Mixed) == 0);
  CHECK(unstable_mode_count(diffusive, BoundaryCondition::Dirichlet) == 0);
  // Neumann n = 0 has rate exactly 0: not strictly positive.
  CHECK(unstable_mode_count(diffusive, BoundaryCondition::Neumann) == 0);
}

TEST_CASE("unstable count equals the number of positive rates") {
  testutil::Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    ModelParams p;
    p.nu = rng.uniform(0.05, 1.5);
    p.gamma = rng.uniform(0.0, 200.0);
    for (auto bc :
         {BoundaryCondition::Mixed, BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
      const int count = unstable_mode_count(p, bc);
      const int n0 = first_mode_index(bc);
      int expected = 0;
      for (int n = n0; n < n0 + count + 8; ++n)
        if (linearized_mode_rate(p, bc, n) > 0.0) ++expected;
      CHECK(count == expected);
      // Rates decrease in n, so the unstable set is exactly the first `count`.
      if (count > 0) CHECK(linearized_mode_rate(p, bc, n0 + count - 1) > 0.0);
      CHECK(linearized_mode_rate(p, bc, n0 + count) <= 0.0);
    }
  }
}

TEST_CASE("spatially constant steady states") {
  const ModelParams p{0.1, 9.0, 9.0, 20.0, 1.0};
  const auto states = steady_states(p);
  REQUIRE(states.size() == 3);
  CHECK(states[0] == 0.0);
  CHECK(states[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(states[2] == doctest::Approx(-1.0).epsilon(1e-15));

  ModelParams q = p;
  q.gamma = 5.0;
  const auto asym = steady_states(q);
  CHECK(asym[1] == doctest::Approx(std::sqrt(5.0 / 9.0)).epsilon(1e-15));

  ModelParams flat = p;
  flat.delta = 0.0;
  CHECK_THROWS_AS(steady_states(flat), std::invalid_argument);
}

TEST_SUITE_END();
