#include <doctest.h>

#include <cmath>
#include <random>

#include "cones.hpp"

using namespace nhim;

namespace {

const Signature S2{1, 0, 1};
const Signature S3{1, 1, 1};

Interval I(double v) { return Interval(v); }
Interval frac(long p, long q) { return Interval(p) / Interval(q); }

bool near(const Interval& x, double v, double tol = 1e-30) { return std::fabs(x.mid_d() - v) <= tol * (1 + std::fabs(v)); }

BoundMatrix ones3() {
  std::vector<std::vector<double>> one(3, std::vector<double>(3, 1.0));
  return BoundMatrix::from_values(S3, one, one);
}

double qd(double a, double b, double c, const double* q) { return a * q[0] * q[0] + b * q[1] * q[1] + c * q[2] * q[2]; }

}  // namespace

TEST_CASE("q_form") {
  CHECK(q_form(Gamma(I(1), I(-1), I(-1)), {I(0), I(0), I(0)}, S3).contains(0.0));
  CHECK(q_form(Gamma::two(I(1), I(-1)), {I(2), I(1)}, S2).contains(3.0));
  CHECK(q_form(Gamma::two(frac(1, 4), frac(-3, 8)), {I(2), I(2)}, S2).contains(-0.5));
  try {
    (void)q_form(Gamma::two(I(1), I(-1)), {I(1), I(2), I(3)}, S2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::DimensionMismatch);
  }
}

TEST_CASE("T matrix") {
  IntervalMatrix T = t_matrix(BoundMatrix::diagonal(S2, {I(0.5), I(2)}));
  CHECK(T(0, 0).contains(0.5));
  CHECK(T(1, 1).contains(2.0));
  CHECK(T(0, 1).contains(0.0));
  CHECK(T(1, 0).contains(0.0));

  IntervalMatrix U = t_matrix(ones3());
  double want[3][3] = {{1, -1, -1}, {1, 1, 1}, {1, 1, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(U(i, j).contains(want[i][j]));
}

TEST_CASE("C matrix") {
  IntervalMatrix C = c_matrix(BoundMatrix::diagonal(S3, {I(0.5), I(3), I(1.25)}));
  CHECK(C(0, 0).contains(0.25));
  CHECK(C(1, 1).contains(9.0));
  CHECK(C(2, 2).contains(1.5625));
  CHECK(C(0, 1).contains(0.0));
  CHECK(C(2, 0).contains(0.0));

  IntervalMatrix O = c_matrix(ones3());
  CHECK(O(0, 0).contains(-1.0));
  CHECK(O(0, 1).contains(3.0));
  CHECK(O(1, 0).contains(-1.0));
  CHECK(O(1, 1).contains(3.0));

  IntervalMatrix E = c_matrix(BoundMatrix::diagonal(S2, {I(5), I(2)}));
  CHECK(E(0, 0).contains(25.0));
  CHECK(E(1, 1).contains(4.0));
}

TEST_CASE("G matrix") {
  IntervalMatrix G = g_matrix(BoundMatrix::diagonal(S2, {I(0.5), I(2)}));
  CHECK(G(0, 0).contains(4.0));
  CHECK(G(1, 1).contains(0.25));
  CHECK(G(0, 1).contains(0.0));

  IntervalMatrix Id = g_matrix(BoundMatrix::diagonal(S3, {I(1), I(1), I(1)}));
  CHECK(Id.contains(IntervalMatrix::identity(3)));

  // all-ones: C has three equal rows, det = 0
  try {
    (void)g_matrix(ones3());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::SingularOrUnverifiable);
  }
}

TEST_CASE("diagonal closed forms, random") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int n = 0; n < 200; ++n) {
    double d[3] = {u(rng), u(rng), u(rng)};
    BoundMatrix b = BoundMatrix::diagonal(S3, {I(d[0]), I(d[1]), I(d[2])});
    IntervalMatrix C = c_matrix(b), G = g_matrix(b);
    for (int i = 0; i < 3; ++i) {
      CHECK(C(i, i).contains(Interval(d[i]) * Interval(d[i])));
      CHECK(near(G(i, i), 1 / (d[i] * d[i]), 1e-15));
    }
  }
}

TEST_CASE("covering step") {
  Interval eps = Interval(std::ldexp(1.0, -40));
  ChSet N0{S2, {I(0), I(0)}, I(1), I(0), I(1)};
  ChSet N1 = covering_step(N0, BoundMatrix::diagonal(S2, {I(0.5), I(2)}), {I(0), I(0)}, eps, I(10));
  CHECK(N1.ru.contains(I(0.5) - eps));
  CHECK(N1.rc.contains(I(2) + eps));

  // identity, eps = 0: translated copy
  ChSet M{S3, {I(0.1), I(0.2), I(0.3)}, I(0.2), I(0.1), I(0.3)};
  ChSet M2 = covering_step(M, BoundMatrix::diagonal(S3, {I(1), I(1), I(1)}), {I(0.2), I(-0.1), I(0)}, I(0L));
  CHECK(M2.ru.contains(0.2));
  CHECK(M2.rs.contains(0.1));
  CHECK(M2.rc.contains(0.3));
  CHECK(M2.center[0].contains(0.2));

  ChSet tiny{S2, {I(0), I(0)}, eps, I(0), I(0.1)};
  try {
    (void)covering_step(tiny, BoundMatrix::diagonal(S2, {I(0.1), I(1)}), {I(0), I(0)}, eps);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::RadiusCollapse);
  }
  try {
    (void)covering_step(N0, BoundMatrix::diagonal(S2, {I(0.5), I(2)}), {I(0), I(0)}, eps);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::LeftAmbientBox);
  }
}

TEST_CASE("example cone chain") {
  Gamma g = Gamma::two(I(1), I(-1));
  ConeOptions zero;
  g = propagate_cone(g, BoundMatrix::diagonal(S2, {I(0.5), I(2)}), zero);
  CHECK(g.a.contains(4.0));
  CHECK(g.c.contains(-0.25));
  g = propagate_cone(g, BoundMatrix::diagonal(S2, {I(2), I(1)}), zero);
  CHECK(g.a.contains(1.0));
  CHECK(g.c.contains(-0.25));
  g = propagate_cone(g, BoundMatrix::diagonal(S2, {I(5), I(2)}), zero);
  CHECK(near(g.a, 0.04, 1e-35));
  CHECK(near(g.c, -0.0625, 1e-35));

  Gamma g1 = Gamma::two(frac(1, 4), frac(-3, 8));
  CHECK(check_final_cone(Gamma::two(frac(1, 25), frac(-1, 16)), g1, S2));
  CHECK_FALSE(check_final_cone(g1, g1, S2));
  CHECK_FALSE(check_final_cone(Gamma::two(I(2), I(-1)), Gamma::two(I(1), I(-1)), S2));
}

TEST_CASE("cone sign loss") {
  // no expansion: G gamma keeps c = -1, eps pushes it toward zero only slightly; force loss with large eps
  ConeOptions big;
  big.eps = I(2);
  try {
    (void)propagate_cone(Gamma::two(I(1), I(-1)), BoundMatrix::diagonal(S2, {I(1), I(1)}), big);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::ConeSignLoss);
  }
}

TEST_CASE("chart transition") {
  BoundMatrix id = BoundMatrix::diagonal(S2, {I(1), I(1)});
  Gamma g0 = Gamma::two(I(1), I(-1)), g1 = Gamma::two(frac(1, 4), frac(-3, 8));
  CHECK_FALSE(check_chart_transition(id, I(0), I(10), I(1), I(1), g0, g1, I(2)));

  BoundMatrix tr = BoundMatrix::diagonal(S2, {I(1), frac(5, 4)});
  std::vector<Interval> gam = g_matrix(tr).apply(g1.vec(S2));
  CHECK(gam[0].contains(0.25));
  CHECK(near(gam[1], -0.24));
  Gamma g0b = Gamma::two(I(1), frac(-1, 4));
  CHECK(check_chart_transition(tr, I(0), I(10), I(1), I(1), g0b, g1, I(2)));
  CHECK(check_chart_transition(tr, I(0), I(10), I(1), I(1), g0b, g1, I(3.9)));
  CHECK_FALSE(check_chart_transition(tr, I(0), I(10), I(1), I(1), g0b, g1, I(4.1)));
  // rho exactly sqrt(a0/-c0) r + delta = 2*1 + 0.5
  CHECK_FALSE(check_chart_transition(tr, I(0.5), I(2.5), I(1), I(1), g0b, g1, I(2)));
  CHECK(check_chart_transition(tr, I(0.5), I(2.5000001), I(1), I(1), g0b, g1, I(2)));
}

TEST_CASE("Q-form matrix bounds fuzz") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  for (int n = 0; n < 10000; ++n) {
    std::vector<std::vector<double>> up(3, std::vector<double>(3)), lo = up;
    double A[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double hi = (i == j ? 2.5 : 0.4) * u(rng);
        double l = hi * u(rng);
        up[i][j] = hi;
        lo[i][j] = l;
        double mag = l + (hi - l) * u(rng);
        A[i][j] = u(rng) < 0.5 ? -mag : mag;
      }
    BoundMatrix b = BoundMatrix::from_values(S3, up, lo);
    IntervalMatrix C = c_matrix(b);
    double ga = 0.01 + u(rng), gb = -u(rng), gc = -u(rng);
    std::vector<Interval> cg = C.apply({I(ga), I(gb), I(gc)});
    double p[3] = {2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1};
    double Ap[3];
    for (int i = 0; i < 3; ++i) Ap[i] = A[i][0] * p[0] + A[i][1] * p[1] + A[i][2] * p[2];
    double lhs = qd(ga, gb, gc, Ap);
    double rhs = qd(cg[0].mid_d(), cg[1].mid_d(), cg[2].mid_d(), p);
    if (lhs < rhs - 1e-12 * (1 + std::fabs(rhs))) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("propagated cone increases the form") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ConeOptions opt;
  opt.eps = I(1e-6);
  int checked = 0, bad = 0;
  for (int n = 0; n < 4000; ++n) {
    std::vector<std::vector<double>> up(3, std::vector<double>(3)), lo = up;
    double A[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double hi = i == j ? (i == 0 ? 2 + 2 * u(rng) : 0.9 * u(rng) + 0.05) : 0.1 * u(rng);
        double l = i == j ? hi * (0.9 + 0.1 * u(rng)) : 0;
        up[i][j] = hi;
        lo[i][j] = l;
        double mag = l + (hi - l) * u(rng);
        A[i][j] = u(rng) < 0.5 ? -mag : mag;
      }
    BoundMatrix b = BoundMatrix::from_values(S3, up, lo);
    Gamma g(I(0.5 + u(rng)), I(-0.5 - u(rng)), I(-0.5 - u(rng)));
    Gamma gp;
    try {
      gp = propagate_cone(g, b, opt);
    } catch (const Error&) {
      continue;
    }
    double d[3] = {2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1};
    double q0 = qd(g.a.mid_d(), g.b.mid_d(), g.c.mid_d(), d);
    if (q0 < 0) continue;
    double Ad[3];
    for (int i = 0; i < 3; ++i) Ad[i] = A[i][0] * d[0] + A[i][1] * d[1] + A[i][2] * d[2];
    double q1 = qd(gp.a.mid_d(), gp.b.mid_d(), gp.c.mid_d(), Ad);
    ++checked;
    if (!(q1 > q0)) ++bad;
  }
  CHECK(checked > 500);
  CHECK(bad == 0);
}

TEST_CASE("covering fuzz on affine maps") {
  // sampled exit-face points land outside the image ch-set's unstable radius
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Interval eps(std::ldexp(1.0, -40));
  int bad = 0;
  for (int n = 0; n < 2000; ++n) {
    std::vector<std::vector<double>> up(3, std::vector<double>(3)), lo = up;
    double A[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double hi = i == j ? (i == 0 ? 1.5 + u(rng) : 0.2 + 0.5 * u(rng)) : 0.05 * u(rng);
        double l = i == j ? hi * (0.8 + 0.2 * u(rng)) : 0;
        up[i][j] = hi;
        lo[i][j] = l;
        double mag = l + (hi - l) * u(rng);
        A[i][j] = u(rng) < 0.5 ? -mag : mag;
      }
    BoundMatrix b = BoundMatrix::from_values(S3, up, lo);
    ChSet N1{S3, {I(0), I(0), I(0)}, I(0.05), I(0.05), I(0.05)};
    ChSet N2;
    try {
      N2 = covering_step(N1, b, {I(0), I(0), I(0)}, eps);
    } catch (const Error&) {
      continue;
    }
    for (int k = 0; k < 20; ++k) {
      double q[3] = {u(rng) < 0.5 ? -0.05 : 0.05, 0.1 * u(rng) - 0.05, 0.1 * u(rng) - 0.05};
      double fx = A[0][0] * q[0] + A[0][1] * q[1] + A[0][2] * q[2];
      if (!(std::fabs(fx) > N2.ru.mid_d())) ++bad;
      // entry side: images of N1 never leave through the y and theta faces of N2
      double fy = A[1][0] * q[0] + A[1][1] * q[1] + A[1][2] * q[2];
      double ft = A[2][0] * q[0] + A[2][1] * q[1] + A[2][2] * q[2];
      if (std::fabs(fy) > N2.rs.mid_d() || std::fabs(ft) > N2.rc.mid_d()) ++bad;
    }
  }
  CHECK(bad == 0);
}
