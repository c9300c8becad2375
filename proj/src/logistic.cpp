#include "logistic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>

namespace nhim {

namespace {

using boost::multiprecision::acos;
using boost::multiprecision::ceil;
using boost::multiprecision::cos;
using boost::multiprecision::floor;
using boost::multiprecision::log;
using boost::multiprecision::sin;
using boost::multiprecision::sqrt;

Real pi_r() { return boost::math::constants::pi<Real>(); }

// quadrature and root finding run in double: the analytic targets need ~1e-10
double integrate(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0;
  double err;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &err);
}

double root(const std::function<double(double)>& f, double lo, double hi) {
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return (r.first + r.second) / 2;
}

std::function<double(double)> h_double(double a0, double eps) {
  return [a0, eps](double t) {
    double a = a0 + eps * std::sin(2 * M_PI * t);
    if (!(a > 1)) throw Error(Code::DomainViolation, "h undefined where a <= 1");
    return 0.5 * std::log(4 * (a - 1));
  };
}

// raw mpfr orbit state at an exact bit precision
struct MpfrOrbit {
  mpfr_t th, x, a, t, al, a0, ep, tp;
  explicit MpfrOrbit(const DrivenParams& p, int bits, double th0, double x0) {
    mpfr_inits2(bits, th, x, a, t, al, a0, ep, tp, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(th, th0, MPFR_RNDN);
    mpfr_set_d(x, x0, MPFR_RNDN);
    mpfr_set_str(a0, p.a0.c_str(), 10, MPFR_RNDN);
    mpfr_set_str(ep, p.eps.c_str(), 10, MPFR_RNDN);
    mpfr_sqrt_ui(al, 5, MPFR_RNDN);
    mpfr_sub_ui(al, al, 1, MPFR_RNDN);
    mpfr_div_ui(al, al, static_cast<unsigned long>(2 * p.N), MPFR_RNDN);
    mpfr_const_pi(tp, MPFR_RNDN);
    mpfr_mul_2ui(tp, tp, 1, MPFR_RNDN);
  }
  ~MpfrOrbit() { mpfr_clears(th, x, a, t, al, a0, ep, tp, static_cast<mpfr_ptr>(nullptr)); }
  MpfrOrbit(const MpfrOrbit&) = delete;
  MpfrOrbit& operator=(const MpfrOrbit&) = delete;

  void eval_a() {
    mpfr_mul(t, tp, th, MPFR_RNDN);
    mpfr_sin(t, t, MPFR_RNDN);
    mpfr_mul(t, t, ep, MPFR_RNDN);
    mpfr_add(a, a0, t, MPFR_RNDN);
  }
  // returns log|DT| at the current point, then advances
  double advance() {
    eval_a();
    mpfr_mul(t, a, x, MPFR_RNDN);
    double d = 2 * std::fabs(mpfr_get_d(t, MPFR_RNDN));
    mpfr_mul(t, t, x, MPFR_RNDN);
    mpfr_ui_sub(x, 1, t, MPFR_RNDN);
    mpfr_add(th, th, al, MPFR_RNDN);
    if (mpfr_cmp_ui(th, 1) >= 0) mpfr_sub_ui(th, th, 1, MPFR_RNDN);
    return d;
  }
  double theta() const { return mpfr_get_d(th, MPFR_RNDN); }
  double xd() const { return mpfr_get_d(x, MPFR_RNDN); }
};

}  // namespace

AnalyticPrecision::AnalyticPrecision() : saved(Real::default_precision()) {
  Real::default_precision(kAnalyticDigits);
}
AnalyticPrecision::~AnalyticPrecision() { Real::default_precision(saved); }

void DrivenParams::validate() const {
  if (N < 1) throw Error(Code::InvalidArgument, "N must be positive");
  double a = a0_d(), e = eps_d();
  if (!std::isfinite(a) || !std::isfinite(e)) throw Error(Code::InvalidArgument, "parameters must be finite");
  // a(theta) > 1 everywhere, hence 4a - 3 > 0
  if (!(a - std::fabs(e) > 1)) throw Error(Code::InvalidArgument, "a(theta) > 1 fails: a0 - |eps| <= 1");
}

Real DrivenParams::alpha_r() const { return (sqrt(Real(5)) - 1) / (2 * Real(N)); }

Interval DrivenParams::alpha_i() const { return golden_ratio(working_precision()) / Interval(N); }

Interval a_of(const DrivenParams& p, const Interval& theta) { return p.a0_i() + p.eps_i() * sin2pi(theta); }

std::pair<Interval, Interval> step(const DrivenParams& p, const Interval& theta, const Interval& x) {
  return {theta + p.alpha_i(), Interval(1L) - a_of(p, theta) * sqr(x)};
}

std::pair<Real, Real> step(const DrivenParams& p, const Real& theta, const Real& x) {
  Real a = p.a0_r() + p.eps_r() * sin(2 * pi_r() * theta);
  return {theta + p.alpha_r(), 1 - a * x * x};
}

std::pair<Interval, Interval> inverse_t2(const DrivenParams& p, const Interval& theta, const Interval& x, int sign1,
                                         int sign2) {
  Interval al = p.alpha_i();
  Interval r1 = (Interval(1L) - x) / a_of(p, theta - al);
  if (!r1.strictly_positive()) throw Error(Code::DomainViolation, "first radicand not positive: " + r1.str(12));
  Interval y = sqrt(r1);
  if (sign1 < 0) y = -y;
  Interval r2 = (Interval(1L) - y) / a_of(p, theta - al - al);
  if (!r2.strictly_positive()) throw Error(Code::DomainViolation, "second radicand not positive: " + r2.str(12));
  Interval z = sqrt(r2);
  if (sign2 < 0) z = -z;
  if (z.contains_zero() || y.contains_zero())
    throw Error(Code::BranchInconsistent, "preimage sign undetermined");
  return {theta - al - al, z};
}

Expr inverse_t2_expr(const DrivenParams& p) {
  Expr t = Expr::theta(), x = Expr::x();
  Expr al = Expr::constant(p.alpha_i());
  Expr a0 = Expr::constant(p.a0_i()), ep = Expr::constant(p.eps_i());
  Expr a1 = a0 + ep * sin2pi(t - al);
  Expr a2 = a0 + ep * sin2pi(t - al - al);
  return -sqrt((Expr::constant(Interval(1L)) - sqrt((Expr::constant(Interval(1L)) - x) / a1)) / a2);
}

Expr inverse_t2_dx_expr(const DrivenParams& p) {
  // d/dx of -sqrt((1 - sqrt((1-x)/a1))/a2) = -1 / (4 a1 a2 u v), u = sqrt((1-x)/a1), v = sqrt((1-u)/a2)
  Expr t = Expr::theta(), x = Expr::x();
  Expr one = Expr::constant(Interval(1L));
  Expr al = Expr::constant(p.alpha_i());
  Expr a0 = Expr::constant(p.a0_i()), ep = Expr::constant(p.eps_i());
  Expr a1 = a0 + ep * sin2pi(t - al);
  Expr a2 = a0 + ep * sin2pi(t - al - al);
  Expr u = sqrt((one - x) / a1);
  Expr v = sqrt((one - u) / a2);
  return -(one / (Expr::constant(Interval(4L)) * a1 * a2 * u * v));
}

std::pair<Real, Real> frozen_period2(const Real& a) {
  if (!(a > Real(3) / 4)) throw Error(Code::DomainViolation, "period-2 orbit needs a > 3/4");
  Real s = sqrt(4 * a - 3);
  return {(1 - s) / (2 * a), (1 + s) / (2 * a)};
}

Real h_of(const Real& a0, const Real& eps, const Real& theta) {
  Real a = a0 + eps * sin(2 * pi_r() * theta);
  if (!(a > 1)) throw Error(Code::DomainViolation, "h undefined where a <= 1");
  return log(4 * (a - 1)) / 2;
}

Real averaged_lyapunov(const Real& a0, const Real& eps) {
  Real d = a0 - 1;
  if (!(d > abs(eps))) throw Error(Code::DomainViolation, "averaged exponent needs a0 - 1 > |eps|");
  return log(2 * (d + sqrt(d * d - eps * eps))) / 2;
}

Real averaged_lyapunov_quadrature(const Real& a0, const Real& eps) {
  if (!(a0 - 1 > abs(eps))) throw Error(Code::DomainViolation, "averaged exponent needs a0 - 1 > |eps|");
  auto f = h_double(static_cast<double>(a0), static_cast<double>(eps));
  return Real(integrate(f, 0, 0.25) + integrate(f, 0.25, 0.5) + integrate(f, 0.5, 0.75) + integrate(f, 0.75, 1));
}

LyapunovRun lyapunov_sums(const DrivenParams& p, double theta0, double x0, long transient, long iters,
                          int precision_bits, long stride) {
  if (iters < 1) throw Error(Code::InvalidArgument, "iters must be >= 1");
  if (precision_bits < 2) throw Error(Code::InvalidArgument, "precision too small");
  MpfrOrbit o(p, precision_bits, theta0, x0);
  for (long i = 0; i < transient; ++i) o.advance();
  LyapunovRun run;
  run.theta0 = theta0;
  run.x0 = x0;
  run.transient = transient;
  run.iters = iters;
  run.precision = precision_bits;
  run.stride = stride > 0 ? stride : 0;
  double S = 0, Smin = 0, os = 0;
  long double sy = 0, sxy = 0;
  if (run.stride) run.sums.push_back(0);
  for (long j = 0; j < iters; ++j) {
    double n = o.advance();
    if (n == 0) throw Error(Code::DegenerateOrbit, "derivative vanished at step " + std::to_string(j), j);
    S += std::log(n);
    Smin = std::min(Smin, S);
    if (S - Smin > os) {
      os = S - Smin;
      run.os_index = j + 1;
    }
    if (run.stride && (j + 1) % run.stride == 0) run.sums.push_back(S);
    sy += S;
    sxy += static_cast<long double>(j + 1) * S;
  }
  // least-squares slope of S_j over j = 0..iters
  long double n = static_cast<long double>(iters) + 1, m = static_cast<long double>(iters);
  long double sx = m * (m + 1) / 2, sxx = m * (m + 1) * (2 * m + 1) / 6;
  run.lambda = static_cast<double>((n * sxy - sx * sy) / (n * sxx - sx * sx));
  run.lambda_endpoint = S / static_cast<double>(iters);
  run.os = os;
  return run;
}

double frozen_lyapunov(double a, double x0, long transient, long iters) {
  double x = x0, S = 0;
  for (long i = 0; i < transient; ++i) x = 1 - a * x * x;
  for (long i = 0; i < iters; ++i) {
    S += std::log(std::fabs(2 * a * x));
    x = 1 - a * x * x;
  }
  return S / static_cast<double>(iters);
}

OscillationPrediction oscillation_prediction(const DrivenParams& p) {
  Real a0 = p.a0_r(), e = p.eps_r();
  if (!(e > 0)) throw Error(Code::DomainViolation, "oscillation prediction needs eps > 0");
  Real s = (Real(5) / 4 - a0) / e;  // sin(2 pi theta) at the zeros of h
  if (!(abs(s) < 1)) throw Error(Code::DomainViolation, "h has no sign change");
  Real w = acos(-s) / (2 * pi_r());
  OscillationPrediction o;
  o.theta1 = Real("0.75") - w;
  o.theta2 = Real("0.75") + w;
  o.integral = integrate(h_double(p.a0_d(), p.eps_d()), static_cast<double>(o.theta2 - 1), static_cast<double>(o.theta1));
  o.value = o.integral / p.alpha_r();
  return o;
}

int recommended_bits(const DrivenParams& p) {
  AnalyticPrecision ap;
  double os = static_cast<double>(oscillation_prediction(p).value);
  return std::max(128, static_cast<int>(std::ceil(os / std::log(2.0))) + 96);
}

std::pair<Real, Real> h_zeros_numeric(const DrivenParams& p) {
  auto f = h_double(p.a0_d(), p.eps_d());
  return {Real(root(f, 0.5, 0.75)), Real(root(f, 0.75, 1))};
}

std::pair<Real, Real> predict_departure_landing(const DrivenParams& p, double d, double pix) {
  if (!(d >= pix && pix > 0)) throw Error(Code::InvalidArgument, "need d >= p > 0");
  OscillationPrediction o = oscillation_prediction(p);
  double al = static_cast<double>(p.alpha_r());
  auto h = h_double(p.a0_d(), p.eps_d());
  double need_d = (d - pix) * std::log(10.0), need_l = pix * std::log(10.0);
  double t1 = static_cast<double>(o.theta1), t2 = static_cast<double>(o.theta2);
  if (need_d > static_cast<double>(o.value))
    throw Error(Code::NoSolution, "departure needs more growth than the expanding window holds");
  double neg = -integrate(h, t1, t2) / al;
  if (need_l > neg) throw Error(Code::NoSolution, "landing needs more contraction than available");
  double lo = t2 - 1;
  double td = need_d == 0 ? lo : root([&](double t) { return integrate(h, lo, t) / al - need_d; }, lo, t1);
  double tl = root([&](double t) { return -integrate(h, t1, t) / al - need_l; }, t1, t2);
  return {Real(td), Real(tl)};
}

Real g1_of(const DrivenParams& p, const Real& theta) {
  Real e = p.eps_r();
  Real a = p.a0_r() + e * sin(2 * pi_r() * theta);
  if (!(4 * a - 3 > 0)) throw Error(Code::DomainViolation, "4a - 3 <= 0");
  Real num = 3 - 2 * a - (8 * a - 9) / sqrt(4 * a - 3);
  return num / (2 * a * a * (4 * a - 3)) * 2 * pi_r() * e * cos(2 * pi_r() * theta);
}

Real curve_approx(const DrivenParams& p, const Real& theta, int order) {
  if (order != 0 && order != 1) throw Error(Code::InvalidArgument, "order must be 0 or 1");
  Real a = p.a0_r() + p.eps_r() * sin(2 * pi_r() * theta);
  if (!(4 * a - 3 > 0)) throw Error(Code::DomainViolation, "4a - 3 <= 0");
  Real x = frozen_period2(a).first;
  if (order == 1) x += p.alpha_r() * g1_of(p, theta);
  return x;
}

Real invariance_residual(const DrivenParams& p, const std::function<Real(const Real&)>& curve, const Real& theta) {
  Real t = theta, x = curve(theta);
  for (int i = 0; i < 4; ++i) std::tie(t, x) = step(p, t, x);
  return x - curve(t);
}

Real curve_pullback(const DrivenParams& p, const Real& theta) {
  Real al = p.alpha_r();
  Real w = acos((p.a0_r() - Real(5) / 4) / p.eps_r()) / (2 * pi_r());
  Real start = Real("0.75") - w + Real("0.008");
  Real d = theta - start;
  d -= floor(d);
  long K = static_cast<long>(floor(d / al));
  if (K % 2) --K;
  if (K < 2) K += 2 * static_cast<long>(ceil(1 / al / 2));  // go once around if too close
  Real t = theta - K * al, x = curve_approx(p, t, 1);
  for (long i = 0; i < K; ++i) std::tie(t, x) = step(p, t, x);
  return x;
}

std::vector<OrbitPoint> simulate_attractor(const DrivenParams& p, int precision_bits, long transient, long iters,
                                           double theta0, double x0) {
  MpfrOrbit o(p, precision_bits, theta0, x0);
  for (long i = 0; i < transient; ++i) o.advance();
  std::vector<OrbitPoint> out;
  out.reserve(static_cast<size_t>(iters));
  for (long i = 0; i < iters; ++i) {
    out.push_back({o.theta(), o.xd()});
    o.advance();
  }
  return out;
}

ReferenceCurve::ReferenceCurve(const DrivenParams& p, long points, int precision_bits) {
  auto orbit = simulate_attractor(p, precision_bits, 100000, points);
  for (const auto& q : orbit) (q.x < 0.5 ? lo_ : up_).emplace_back(q.theta, q.x);
  std::sort(lo_.begin(), lo_.end());
  std::sort(up_.begin(), up_.end());
}

double ReferenceCurve::interp(const std::vector<std::pair<double, double>>& t, double theta) {
  theta -= std::floor(theta);
  auto it = std::lower_bound(t.begin(), t.end(), std::make_pair(theta, -1e300));
  // periodic neighbours
  const auto& b = it == t.end() ? t.front() : *it;
  const auto& a = it == t.begin() ? t.back() : *(it - 1);
  double ta = a.first, tb = b.first;
  if (it == t.begin()) ta -= 1;
  if (it == t.end()) tb += 1;
  if (tb == ta) return a.second;
  return a.second + (b.second - a.second) * (theta - ta) / (tb - ta);
}

double ReferenceCurve::lower(double theta) const { return interp(lo_, theta); }
double ReferenceCurve::upper(double theta) const { return interp(up_, theta); }
double ReferenceCurve::deviation(double theta, double x) const {
  return std::min(std::fabs(x - lower(theta)), std::fabs(x - upper(theta)));
}

FalseChaosStats false_chaos(const DrivenParams& p, int low_bits, int high_bits, long transient, long iters,
                            const ReferenceCurve& ref) {
  FalseChaosStats st;
  AnalyticPrecision ap;
  OscillationPrediction o = oscillation_prediction(p);
  double start = static_cast<double>(o.theta2) - 1;  // h turns positive here
  double th1 = static_cast<double>(o.theta1);

  std::vector<OrbitPoint> lowo = simulate_attractor(p, low_bits, transient, iters);
  std::vector<double> deps, lands;
  // split into passes through the base circle, measured from `start`
  auto phase = [&](double t) {
    double s = t - start;
    return s - std::floor(s);
  };
  size_t i = 0;
  while (i < lowo.size() && phase(lowo[i].theta) > 0.01) ++i;
  while (i < lowo.size()) {
    size_t j = i + 1;
    while (j < lowo.size() && phase(lowo[j].theta) >= phase(lowo[j - 1].theta)) ++j;
    if (j >= lowo.size()) break;
    double dep = -1, land = -1;
    for (size_t k = i; k < j; ++k) {
      double dev = ref.deviation(lowo[k].theta, lowo[k].x);
      double th = lowo[k].theta;
      if (dep < 0 && dev > 0.05) dep = th;
      if (dep >= 0 && land < 0 && th > th1 - 0.2) {
        bool settled = k + 8 < j;
        for (size_t m = k; settled && m <= k + 8; ++m) settled = ref.deviation(lowo[m].theta, lowo[m].x) < 1e-4;
        if (settled) land = th;
      }
      if (th >= 0.3 && th <= 0.6) st.max_low_in_window = std::max(st.max_low_in_window, dev);
    }
    ++st.cycles;
    if (dep >= 0) deps.push_back(dep);
    if (land >= 0) lands.push_back(land);
    i = j;
  }
  auto median = [](std::vector<double> v) {
    if (v.empty()) return -1.0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  st.departure_median = median(deps);
  st.landing_median = median(lands);
  int inwin = 0;
  for (double d : deps) inwin += (d >= 0.24 && d <= 0.30);
  st.departure_in_window = st.cycles ? static_cast<double>(inwin) / st.cycles : 0;

  std::vector<OrbitPoint> hi = simulate_attractor(p, high_bits, transient, iters);
  for (const auto& q : hi) {
    st.max_dev_precise = std::max(st.max_dev_precise, ref.deviation(q.theta, q.x));
    if (q.x < 0.5 && (q.theta < 0.45 || q.theta > 0.75)) {
      double c = static_cast<double>(curve_approx(p, Real(q.theta), 1));
      st.max_dev_order1 = std::max(st.max_dev_order1, std::fabs(q.x - c));
    }
  }
  return st;
}

}  // namespace nhim
