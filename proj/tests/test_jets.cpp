#include <doctest.h>

#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <random>

#include "jets.hpp"

using namespace nhim;
using big = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<256>>;

namespace {

Poly poly(std::vector<double> c, double r) {
  Poly p;
  for (double v : c) p.c.emplace_back(v);
  p.r = Interval(r);
  return p;
}

// (upper(p̄(t)), lower(p̱(t))) bracket check for a point value
bool sandwiched(const Poly& lo, const Poly& hi, const Interval& t, const Interval& v) {
  return mpfr_lessequal_p(lo.eval(t).lo(), v.hi()) && mpfr_greaterequal_p(hi.eval(t).hi(), v.lo());
}

const char* kAlpha = "0.0030901699437494742";

std::string inverse_branch() {
  // x-component of the inverse of two forward steps
  std::string a = kAlpha;
  return "-sqrt((1 - sqrt((1 - x)/(1.31 + 0.3*sin2pi(t - " + a + "))))/(1.31 + 0.3*sin2pi(t - 2*" + a + ")))";
}

}  // namespace

TEST_CASE("jet examples") {
  Expr g = Expr::parse("x^2");
  Composition c = jet_of_composition(g, poly({0, 1}, 1), 1, Interval(1L));
  CHECK(c.at0.c[0].contains(0.0));
  CHECK(c.at0.c[1].contains(0.0));
  CHECK(c.rem.value.contains(2.0));

  Composition k = jet_of_composition(Expr::parse("sin2pi(x) + 3*x"), poly({0.3}, 0.2), 4, Interval(0.2));
  for (int j = 1; j <= 4; ++j) CHECK(k.at0.c[static_cast<size_t>(j)].contains(0.0));

  Composition q = jet_of_composition(Expr::parse("1 - 1.31*x^2"), poly({-0.19, 0.5}, 0.01), 2, Interval(0.01));
  long double a = 1.31L, p0 = -0.19L, p1 = 0.5L;
  long double c0 = 1 - a * p0 * p0, c1 = -2 * a * p0 * p1, c2 = -a * p1 * p1;
  CHECK(std::fabs(static_cast<double>(q.at0.c[0].mid_ld() - c0)) < 1e-15);
  CHECK(std::fabs(static_cast<double>(q.at0.c[1].mid_ld() - c1)) < 1e-15);
  CHECK(std::fabs(static_cast<double>(q.at0.c[2].mid_ld() - c2)) < 1e-15);
  CHECK(std::fabs(static_cast<double>(c0) - 0.952709) < 1e-12);
}

TEST_CASE("edge examples") {
  Expr g = Expr::parse("x^2");
  Poly p = poly({0, 1}, 0.5);
  Poly up = edge_upper(g, p, 1, Interval(0.5));
  Poly lo = edge_lower(g, p, 1, Interval(0.5));
  CHECK(up.c[0].contains(0.0));
  CHECK(up.c[1].contains(0.5));
  CHECK(lo.c[0].contains(0.0));
  CHECK(lo.c[1].contains(0.0));

  Poly k = poly({0.25}, 0.1);
  Poly ku = edge_upper(Expr::parse("sqrt(x)"), k, 3, Interval(0.1));
  Poly kl = edge_lower(Expr::parse("sqrt(x)"), k, 3, Interval(0.1));
  CHECK(std::fabs(ku.c[0].mid_d() - 0.5) < 1e-30);
  CHECK(std::fabs(kl.c[0].mid_d() - 0.5) < 1e-30);
}

TEST_CASE("composition domain errors propagate") {
  CHECK_THROWS_AS(jet_of_composition(Expr::parse("sqrt(x)"), poly({-0.01, 1}, 0.1), 3, Interval(0.1)), Error);
}

TEST_CASE("sandwich property, random grammar") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const char* forms[] = {"%g + %g*x + %g*x^2",      "sqrt(%g + x^2 + %g*t) * %g", "sin2pi(%g*t + x) + %g*x*%g",
                         "log(%g + x^2) - %g*t*%g", "1/(%g + x^2) + %g*x*%g",      "cos2pi(t)*x*%g + %g*%g",
                         "-sqrt((1.5 + %g*x)/(1.2 + %g*sin2pi(t))) * %g"};
  int bad = 0, cases = 0;
  for (int n = 0; n < 1000; ++n) {
    char buf[256];
    double k1 = 0.5 + u(rng), k2 = u(rng), k3 = 0.3 + u(rng);
    std::snprintf(buf, sizeof buf, forms[n % 7], k1, k2, k3);
    Expr g = Expr::parse(buf);
    int deg = 1 + static_cast<int>(u(rng) * 9);
    double r = 0.01 + 0.4 * u(rng);
    Poly p = poly({u(rng) - 0.5, u(rng) - 0.5, 0.5 * u(rng) - 0.25}, r);
    Poly hi = edge_upper(g, p, deg, Interval(r));
    Poly lo = edge_lower(g, p, deg, Interval(r));
    ++cases;
    for (int j = 0; j < 50; ++j) {
      Interval t(r * j / 49.0);
      if (j == 49) t = Interval(r);
      Interval v = g.eval(t, p.eval(t));
      if (!sandwiched(lo, hi, t, v)) {
        ++bad;
        MESSAGE("sandwich violated for " << buf << " deg " << deg << " t=" << t.mid_d());
        break;
      }
    }
  }
  CHECK(cases == 1000);
  CHECK(bad == 0);
}

TEST_CASE("jet coefficients agree with finite differences, orders 1-4") {
  Expr g = Expr::parse("sqrt(2 + sin2pi(t)*x) + log(1.5 + x^2)/(1 + t)");
  Poly p = poly({0.2, -0.7, 0.3}, 0.1);
  Interval t0(0.05);
  Composition c = jet_of_composition(g, p.shifted(t0), 4, Interval(0.1), t0);
  auto F = [&](const Interval& s) { return g.eval(s, p.eval(s)); };
  Interval h = Interval::parse("0.001");
  // central differences
  Interval f0 = F(t0), fp = F(t0 + h), fm = F(t0 - h), fp2 = F(t0 + h + h), fm2 = F(t0 - h - h);
  Interval d1 = (fp - fm) / (Interval(2L) * h);
  Interval d2 = (fp - Interval(2L) * f0 + fm) / sqr(h);
  Interval d3 = (fp2 - Interval(2L) * fp + Interval(2L) * fm - fm2) / (Interval(2L) * pow(h, 3));
  Interval d4 = (fp2 - Interval(4L) * fp + Interval(6L) * f0 - Interval(4L) * fm + fm2) / pow(h, 4);
  Interval fd[] = {d1, d2, d3, d4};
  for (int k = 1; k <= 4; ++k) {
    double jet = c.at0.derivative(k).mid_d();
    double tol = 1e-4 * (1 + std::fabs(jet));
    CHECK(std::fabs(jet - fd[k - 1].mid_d()) < tol);
  }
}

TEST_CASE("logistic inverse edge against a 256-bit pointwise oracle") {
  double alpha = std::stod(kAlpha);
  Expr g = Expr::parse(inverse_branch());
  double q = 0.6, r = alpha / 2;
  Poly p = poly({-0.1054, 0.25, 0.1}, r);
  Poly hi = edge_upper(g, p, 9, Interval(r), Interval(q));
  Poly lo = edge_lower(g, p, 9, Interval(r), Interval(q));
  const big pi = boost::multiprecision::acos(big(-1));
  auto a = [&](const big& t) { return big("1.31") + big("0.3") * sin(2 * pi * t); };
  for (int j = 0; j < 10; ++j) {
    big s = big(r) * j / 9;
    big x = big(-0.1054) + big(0.25) * s + big(0.1) * s * s;
    big t = big(q) + s;
    big v = -sqrt((1 - sqrt((1 - x) / a(t - big(kAlpha)))) / a(t - 2 * big(kAlpha)));
    Interval S = Interval::parse(s.str(80, std::ios_base::scientific));
    Interval V = Interval::parse(v.str(80, std::ios_base::scientific));
    Interval L = lo.eval(S), H = hi.eval(S);
    CHECK(mpfr_lessequal_p(L.lo(), V.hi()));
    CHECK(mpfr_greaterequal_p(H.hi(), V.lo()));
    CHECK((V - L).hi_d() < 1e-15);
    CHECK((H - V).hi_d() < 1e-15);
  }
  // higher degree never looser on this analytic edge
  auto spread = [&](int n) {
    Poly h = edge_upper(g, p, n, Interval(r), Interval(q));
    Poly l = edge_lower(g, p, n, Interval(r), Interval(q));
    Poly d = h - l;
    double m = 0;
    for (int k = 0; k < 10; ++k) {
      Interval w = Interval::hull(Interval(r * k / 10), Interval(r * (k + 1) / 10));
      m = std::max(m, d.range(w).hi_d());
    }
    return m;
  };
  CHECK(spread(9) <= spread(3));
}
