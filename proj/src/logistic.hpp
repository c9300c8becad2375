#pragma once
#include <boost/multiprecision/mpfr.hpp>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "interval.hpp"
#include "jets.hpp"

namespace nhim {

using Real = boost::multiprecision::mpfr_float;

// analytics run at this many decimal digits
constexpr unsigned kAnalyticDigits = 50;

struct DrivenParams {
  std::string a0 = "1.31";
  std::string eps = "0.3";
  long N = 200;  // alpha = g / N

  void validate() const;
  double a0_d() const { return std::stod(a0); }
  double eps_d() const { return std::stod(eps); }
  Real a0_r() const { return Real(a0); }
  Real eps_r() const { return Real(eps); }
  Real alpha_r() const;
  Interval a0_i() const { return Interval::parse(a0); }
  Interval eps_i() const { return Interval::parse(eps); }
  Interval alpha_i() const;  // at working precision
};

struct AnalyticPrecision {
  unsigned saved;
  AnalyticPrecision();
  ~AnalyticPrecision();
};

Interval a_of(const DrivenParams& p, const Interval& theta);
std::pair<Interval, Interval> step(const DrivenParams& p, const Interval& theta, const Interval& x);
std::pair<Real, Real> step(const DrivenParams& p, const Real& theta, const Real& x);
// preimage under two forward steps; signs choose the square-root branches (first, second)
std::pair<Interval, Interval> inverse_t2(const DrivenParams& p, const Interval& theta, const Interval& x, int sign1 = 1,
                                         int sign2 = -1);
// x-component of inverse_t2 with default branches, as an expression in (t, x)
Expr inverse_t2_expr(const DrivenParams& p);
Expr inverse_t2_dx_expr(const DrivenParams& p);

std::pair<Real, Real> frozen_period2(const Real& a);

Real h_of(const Real& a0, const Real& eps, const Real& theta);  // (1/2) log(4 (a(theta) - 1))
Real averaged_lyapunov(const Real& a0, const Real& eps);
Real averaged_lyapunov_quadrature(const Real& a0, const Real& eps);

struct LyapunovRun {
  double theta0 = 0, x0 = 0.5;
  long transient = 100000, iters = 100000;
  int precision = 128;
  double lambda = 0;           // least-squares slope of the partial sums
  double lambda_endpoint = 0;  // S_n / n
  double os = 0;
  long os_index = 0;
  std::vector<double> sums;  // S_j every `stride` steps
  long stride = 1;
};
LyapunovRun lyapunov_sums(const DrivenParams& p, double theta0, double x0, long transient, long iters, int precision_bits,
                          long stride = 0);
// frozen map (a fixed) variant for the period-2 sanity check
double frozen_lyapunov(double a, double x0, long transient, long iters);

struct OscillationPrediction {
  Real theta1, theta2;
  Real integral;  // over (theta2 - 1, theta1)
  Real value;     // integral / alpha
};
OscillationPrediction oscillation_prediction(const DrivenParams& p);
// enough bits to carry the predicted digit loss of the Lyapunov sums
int recommended_bits(const DrivenParams& p);
std::pair<Real, Real> h_zeros_numeric(const DrivenParams& p);
std::pair<Real, Real> predict_departure_landing(const DrivenParams& p, double d, double pix);

Real curve_approx(const DrivenParams& p, const Real& theta, int order);
Real g1_of(const DrivenParams& p, const Real& theta);
// x-defect of four forward steps along the graph of `curve`
Real invariance_residual(const DrivenParams& p, const std::function<Real(const Real&)>& curve, const Real& theta);

// lower invariant curve by forward pullback: start on the order-1 curve just past theta1 and
// iterate an even number of steps through the attracting arc
Real curve_pullback(const DrivenParams& p, const Real& theta);

struct OrbitPoint {
  double theta, x;
};
std::vector<OrbitPoint> simulate_attractor(const DrivenParams& p, int precision_bits, long transient, long iters,
                                           double theta0 = 0, double x0 = 0.5);

// the attracting period-2 curve pair tabulated from a long high-precision orbit
class ReferenceCurve {
 public:
  ReferenceCurve(const DrivenParams& p, long points = 200000, int precision_bits = 256);
  double lower(double theta) const;
  double upper(double theta) const;
  double deviation(double theta, double x) const;  // distance to the nearer branch

 private:
  std::vector<std::pair<double, double>> lo_, up_;
  static double interp(const std::vector<std::pair<double, double>>& t, double theta);
};

struct FalseChaosStats {
  int cycles = 0;
  double departure_median = 0, landing_median = 0;
  double departure_in_window = 0;  // fraction of cycles departing inside [0.24, 0.30]
  double max_dev_precise = 0;      // high-precision orbit vs reference outside the window
  double max_dev_order1 = 0;       // same orbit vs order-1 curve, information only
  double max_low_in_window = 0;    // max deviation of the low-precision orbit in [0.3, 0.6]
};
FalseChaosStats false_chaos(const DrivenParams& p, int low_bits, int high_bits, long transient, long iters,
                            const ReferenceCurve& ref);

}  // namespace nhim
