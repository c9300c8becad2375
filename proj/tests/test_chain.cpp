#include <doctest.h>

#include "chain.hpp"

using namespace nhim;

namespace {

Interval I(double v) { return Interval(v); }
Interval frac(long p, long q) { return Interval(p) / Interval(q); }

// linear maps fixed at the origin, one diagonal per step
LocalMapFamily diagonal_family(Signature sig, std::vector<std::vector<Interval>> diags) {
  LocalMapFamily f;
  f.sig = sig;
  f.map = [diags](int from, int, const std::vector<Interval>& q) {
    std::vector<Interval> out;
    for (size_t i = 0; i < q.size(); ++i) out.push_back(diags[static_cast<size_t>(from)][i] * q[i]);
    return out;
  };
  f.bounds = [sig, diags](int from, int) { return BoundMatrix::diagonal(sig, diags[static_cast<size_t>(from)]); };
  return f;
}

ItineraryPlan plan_of(int steps) {
  ItineraryPlan p;
  for (int i = 0; i <= steps; ++i) p.regions.push_back(i);
  return p;
}

}  // namespace

TEST_CASE("example chain") {
  Signature s2{1, 0, 1};
  auto fam = diagonal_family(s2, {{I(0.5), I(2)}, {I(2), I(1)}, {I(5), I(2)}});
  ChainOptions opt;
  opt.ambient = I(10);
  opt.eps = Interval(std::ldexp(1.0, -60));
  ChainCertificate c =
      verify_forward_bounds(fam, plan_of(3), I(1), I(1), Gamma::two(I(1), I(-1)), Gamma::two(frac(1, 4), frac(-3, 8)), opt);
  REQUIRE(c.steps.size() == 4);
  double R[4][2] = {{1, 1}, {0.5, 2}, {1, 2}, {5, 4}};
  for (int m = 0; m < 4; ++m) {
    CHECK(std::fabs(c.steps[static_cast<size_t>(m)].R[0].mid_d() - R[m][0]) < 1e-12);
    CHECK(std::fabs(c.steps[static_cast<size_t>(m)].R[1].mid_d() - R[m][1]) < 1e-12);
  }
  double G[4][2] = {{1, -1}, {4, -0.25}, {1, -0.25}, {0.04, -0.0625}};
  for (int m = 0; m < 4; ++m) {
    CHECK(std::fabs(c.steps[static_cast<size_t>(m)].gamma.a.mid_d() - G[m][0]) < 1e-12);
    CHECK(std::fabs(c.steps[static_cast<size_t>(m)].gamma.c.mid_d() - G[m][1]) < 1e-12);
  }
  CHECK(c.terminal_margin_u.mid_d() > 3.99);
  CHECK(c.verdict);

  // the unit ambient box is too small for the radii of this fixture
  ChainOptions unit = opt;
  unit.ambient = I(1);
  CHECK_FALSE(verify_forward_bounds(fam, plan_of(3), I(1), I(1), Gamma::two(I(1), I(-1)),
                                    Gamma::two(frac(1, 4), frac(-3, 8)), unit)
                  .verdict);
  // literal componentwise terminal rule rejects the worked example
  ChainOptions lit = opt;
  lit.rule = TerminalRule::Literal;
  CHECK_FALSE(verify_forward_bounds(fam, plan_of(3), I(1), I(1), Gamma::two(I(1), I(-1)),
                                    Gamma::two(frac(1, 4), frac(-3, 8)), lit)
                  .verdict);
}

TEST_CASE("identity cannot expand") {
  Signature s2{1, 0, 1};
  auto fam = diagonal_family(s2, {{I(1), I(1)}});
  ChainCertificate c =
      verify_forward_bounds(fam, plan_of(1), I(0.5), I(0.5), Gamma::two(I(1), I(-1)), Gamma::two(I(1), I(-1)));
  CHECK_FALSE(c.verdict);
  CHECK_FALSE(c.terminal_margin_u.strictly_positive());
}

TEST_CASE("radius collapse carries the step") {
  Signature s2{1, 0, 1};
  auto fam = diagonal_family(s2, {{I(2), I(0.5)}, {I(1e-14), I(0.5)}});
  ChainOptions opt;
  opt.eps = I(1e-10);
  try {
    (void)verify_forward_bounds(fam, plan_of(2), I(0.01), I(0.01), Gamma::two(I(1), I(-1)), Gamma::two(I(1), I(-1)),
                                opt);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::RadiusCollapse);
    CHECK(e.step() == 2);
  }
}

TEST_CASE("backward bounds") {
  Signature s3{1, 1, 1};
  // forward fixture: x expands, y contracts
  auto fwd = diagonal_family(s3, {{I(3), I(0.5), I(1)}, {I(3), I(0.5), I(1)}});
  // mirror: swap the x and y roles
  auto mir = diagonal_family(s3, {{I(0.5), I(3), I(1)}, {I(0.5), I(3), I(1)}});
  ChainOptions opt;
  opt.ambient = I(100);
  Gamma g0(I(1), I(-1), I(-1)), g1(I(1), I(-1), I(-1));
  ChainCertificate f = verify_forward_bounds(fwd, plan_of(2), I(0.1), I(0.1), g0, g1, opt);
  ChainCertificate b =
      verify_backward_bounds(mir, plan_of(2), I(0.1), I(0.1), Gamma(I(-1), I(1), I(-1)), Gamma(I(-1), I(1), I(-1)), opt);
  CHECK(f.verdict == b.verdict);
  REQUIRE(f.steps.size() == b.steps.size());
  for (size_t m = 0; m < f.steps.size(); ++m) {
    CHECK(f.steps[m].R[0].mid_d() == doctest::Approx(b.steps[m].R[1].mid_d()));
    CHECK(f.steps[m].R[1].mid_d() == doctest::Approx(b.steps[m].R[0].mid_d()));
    CHECK(f.steps[m].gamma.a.mid_d() == doctest::Approx(b.steps[m].gamma.b.mid_d()));
  }

  // hyperbolic toy diag(1/2, 2, 1): fails as a forward map, passes as the inverse family
  auto toy = diagonal_family(s3, {{I(0.5), I(2), I(1)}});
  CHECK_FALSE(verify_forward_bounds(toy, plan_of(1), I(0.1), I(0.1), g0, g1, opt).verdict);
  ChainCertificate back =
      verify_backward_bounds(toy, plan_of(1), I(0.1), I(0.1), Gamma(I(-1), I(1), I(-1)), Gamma(I(-1), I(1), I(-1)), opt);
  CHECK(back.verdict);

  Signature s2{1, 0, 1};
  try {
    (void)verify_backward_bounds(diagonal_family(s2, {{I(1), I(1)}}), plan_of(1), I(0.1), I(0.1),
                                 Gamma::two(I(-1), I(-1)), Gamma::two(I(-1), I(-1)));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::UnsupportedSignature);
  }
}

TEST_CASE("main inequality") {
  CHECK(check_main_inequality(Gamma(I(1), I(-1), I(-1)), Gamma(I(-0.5), I(2), I(-1))));
  CHECK_FALSE(check_main_inequality(Gamma(I(1), I(-1), I(-1)), Gamma(I(-1), I(1), I(-1))));
  CHECK_FALSE(check_main_inequality(Gamma(I(1), I(-2), I(-1)), Gamma(I(-0.5), I(1), I(-1))));
}

TEST_CASE("composability of split plans") {
  Signature s2{1, 0, 1};
  auto fam = diagonal_family(s2, {{I(0.5), I(2)}, {I(2), I(1)}, {I(5), I(2)}});
  ChainOptions opt;
  opt.ambient = I(10);
  Gamma g0 = Gamma::two(I(1), I(-1)), g1 = Gamma::two(frac(1, 4), frac(-3, 8));
  ChainCertificate whole = verify_forward_bounds(fam, plan_of(3), I(1), I(1), g0, g1, opt);
  ChainCertificate first = verify_forward_bounds(fam, plan_of(1), I(1), I(1), g0, g1, opt);
  // second half starts from the first half's terminal state
  LocalMapFamily shifted = fam;
  shifted.map = [fam](int from, int to, const std::vector<Interval>& q) { return fam.map(from + 1, to + 1, q); };
  shifted.bounds = [fam](int from, int to) { return fam.bounds(from + 1, to + 1); };
  // R carries the two radii separately: run with r = R_u and rho = R_c
  ChainCertificate second = verify_forward_bounds(shifted, plan_of(2), first.steps.back().R[0],
                                                  first.steps.back().R[1], first.steps.back().gamma, g1, opt);
  CHECK(second.steps.back().R[0].contains(whole.steps.back().R[0].mid()));
  CHECK(second.steps.back().R[1].contains(whole.steps.back().R[1].mid()));
  CHECK(std::fabs(second.steps.back().gamma.a.mid_d() - whole.steps.back().gamma.a.mid_d()) < 1e-20);
}
