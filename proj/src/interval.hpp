#pragma once
#include <mpfr.h>

#include <string>
#include <vector>

#include "errors.hpp"

namespace nhim {

mpfr_prec_t working_precision();
void set_working_precision(mpfr_prec_t p);

// RAII switch of the thread's working precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t p);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Interval {
 public:
  Interval();
  Interval(long v);  // NOLINT
  Interval(int v) : Interval(static_cast<long>(v)) {}  // NOLINT
  Interval(double v);  // NOLINT exact
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  // decimal "x" (outward rounded) or "[lo, hi]"
  static Interval parse(const std::string& s);
  static Interval from_bounds(const mpfr_t lo, const mpfr_t hi);
  static Interval from_doubles(double lo, double hi);
  static Interval hull(const Interval& a, const Interval& b);
  static Interval entire();

  mpfr_prec_t prec() const { return mpfr_get_prec(lo_); }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  mpfr_ptr lo_mut() { return lo_; }
  mpfr_ptr hi_mut() { return hi_; }

  double lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double mid_d() const;
  long double mid_ld() const;
  double width_d() const;

  Interval lower() const;  // degenerate [lo, lo]
  Interval upper() const;  // degenerate [hi, hi]
  Interval mid() const;    // a representable point inside
  Interval width() const;  // enclosure of hi - lo
  Interval mag() const;    // degenerate [max|x|, max|x|]
  Interval mig() const;    // degenerate [min|x|, min|x|]

  bool contains(const Interval& o) const;
  bool contains(const mpfr_t v) const;
  bool contains(double v) const;
  bool contains_zero() const;
  bool strictly_positive() const { return mpfr_sgn(lo_) > 0; }
  bool strictly_negative() const { return mpfr_sgn(hi_) < 0; }
  bool is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
  bool finite() const { return mpfr_number_p(lo_) && mpfr_number_p(hi_); }

  std::string str(int digits = 0) const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a);
  Interval& operator+=(const Interval& b) { return *this = *this + b; }
  Interval& operator-=(const Interval& b) { return *this = *this - b; }
  Interval& operator*=(const Interval& b) { return *this = *this * b; }
  Interval& operator/=(const Interval& b) { return *this = *this / b; }

 private:
  explicit Interval(mpfr_prec_t p, int);
  mpfr_t lo_, hi_;
};

// certainly-true comparisons
inline bool certainly_lt(const Interval& a, const Interval& b) { return mpfr_less_p(a.hi(), b.lo()) != 0; }
inline bool certainly_gt(const Interval& a, const Interval& b) { return certainly_lt(b, a); }
inline bool certainly_le(const Interval& a, const Interval& b) { return mpfr_lessequal_p(a.hi(), b.lo()) != 0; }

Interval sqr(const Interval& x);
Interval sqrt(const Interval& x);
Interval log(const Interval& x);
Interval exp(const Interval& x);
Interval sin2pi(const Interval& x);
Interval cos2pi(const Interval& x);
Interval acos(const Interval& x);
Interval pow(const Interval& x, long n);
Interval pow(const Interval& x, const Interval& y);
Interval abs(const Interval& x);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);

Interval pi_interval(mpfr_prec_t p);
Interval golden_ratio(mpfr_prec_t p);

enum class Kind { Add, Sub, Mul, Div, Sqrt, Log, Sin2pi, Cos2pi, Acos, Pow };
Interval elementary(Kind k, const Interval& x, const Interval& y = Interval(0L));
const char* kind_name(Kind k);

class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  IntervalMatrix(int r, int c) : rows_(r), cols_(c), a_(static_cast<size_t>(r * c), Interval(0L)) {}
  static IntervalMatrix identity(int n);
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Interval& operator()(int i, int j) { return a_[static_cast<size_t>(i * cols_ + j)]; }
  const Interval& operator()(int i, int j) const { return a_[static_cast<size_t>(i * cols_ + j)]; }
  friend IntervalMatrix operator*(const IntervalMatrix& a, const IntervalMatrix& b);
  friend IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b);
  friend IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b);
  std::vector<Interval> apply(const std::vector<Interval>& v) const;
  bool contains(const IntervalMatrix& o) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Interval> a_;
};

// Enclosure of {a^-1 : a in A}; throws SingularOrUnverifiable.
IntervalMatrix mat_inverse_verified(const IntervalMatrix& A);

}  // namespace nhim
