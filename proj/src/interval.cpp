#include "interval.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <memory>

namespace nhim {

namespace {
thread_local mpfr_prec_t g_prec = 128;

void check_same(const Interval& a, const Interval& b) {
  if (a.prec() != b.prec())
    throw Error(Code::PrecisionExhausted, "mixed-precision operands (" + std::to_string(a.prec()) + " vs " +
                                              std::to_string(b.prec()) + " bits)");
}

struct Tmp {
  mpfr_t v;
  explicit Tmp(mpfr_prec_t p) { mpfr_init2(v, p); }
  ~Tmp() { mpfr_clear(v); }
  operator mpfr_ptr() { return v; }
  mpfr_ptr operator->() { return v; }
};

// sin over a short argument interval [ulo, uhi] known to hold no critical point
void sin_endpoint(mpfr_ptr lo, mpfr_ptr hi, mpfr_srcptr ulo, mpfr_srcptr uhi, mpfr_prec_t p) {
  Tmp a(p), b(p);
  mpfr_sin(lo, ulo, MPFR_RNDD);
  mpfr_sin(a, uhi, MPFR_RNDD);
  mpfr_min(lo, lo, a, MPFR_RNDD);
  mpfr_sin(hi, ulo, MPFR_RNDU);
  mpfr_sin(b, uhi, MPFR_RNDU);
  mpfr_max(hi, hi, b, MPFR_RNDU);
}
}  // namespace

mpfr_prec_t working_precision() { return g_prec; }
void set_working_precision(mpfr_prec_t p) {
  if (p < MPFR_PREC_MIN || p > 1 << 20) throw Error(Code::PrecisionExhausted, "unsupported precision");
  g_prec = p;
}
PrecisionScope::PrecisionScope(mpfr_prec_t p) : saved_(g_prec) { set_working_precision(p); }
PrecisionScope::~PrecisionScope() { g_prec = saved_; }

Interval::Interval(mpfr_prec_t p, int) {
  mpfr_init2(lo_, p);
  mpfr_init2(hi_, p);
}
Interval::Interval() : Interval(g_prec, 0) {
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}
Interval::Interval(long v) : Interval(g_prec, 0) {
  mpfr_set_si(lo_, v, MPFR_RNDD);
  mpfr_set_si(hi_, v, MPFR_RNDU);
}
Interval::Interval(double v) : Interval(g_prec, 0) {
  mpfr_set_d(lo_, v, MPFR_RNDD);
  mpfr_set_d(hi_, v, MPFR_RNDU);
}
Interval::Interval(const Interval& o) : Interval(o.prec(), 0) {
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}
Interval::Interval(Interval&& o) noexcept : Interval(o.prec(), 0) {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}
Interval& Interval::operator=(const Interval& o) {
  if (this != &o) {
    mpfr_set_prec(lo_, o.prec());
    mpfr_set_prec(hi_, o.prec());
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}
Interval& Interval::operator=(Interval&& o) noexcept {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  return *this;
}
Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::parse(const std::string& s0) {
  std::string s = s0;
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }), s.end());
  Interval r(g_prec, 0);
  std::string a = s, b = s;
  if (!s.empty() && s.front() == '[') {
    auto comma = s.find(',');
    if (s.back() != ']' || comma == std::string::npos)
      throw Error(Code::InvalidArgument, "malformed interval '" + s0 + "'");
    a = s.substr(1, comma - 1);
    b = s.substr(comma + 1, s.size() - comma - 2);
  }
  if (mpfr_set_str(r.lo_, a.c_str(), 10, MPFR_RNDD) != 0 && !mpfr_number_p(r.lo_) && a != "-inf")
    throw Error(Code::InvalidArgument, "malformed number '" + a + "'");
  if (mpfr_set_str(r.hi_, b.c_str(), 10, MPFR_RNDU) != 0 && !mpfr_number_p(r.hi_) && b != "inf")
    throw Error(Code::InvalidArgument, "malformed number '" + b + "'");
  if (mpfr_nan_p(r.lo_) || mpfr_nan_p(r.hi_)) throw Error(Code::InvalidArgument, "malformed interval '" + s0 + "'");
  if (mpfr_greater_p(r.lo_, r.hi_)) throw Error(Code::InvalidArgument, "interval with lo > hi: '" + s0 + "'");
  return r;
}

Interval Interval::from_bounds(const mpfr_t lo, const mpfr_t hi) {
  if (mpfr_nan_p(lo) || mpfr_nan_p(hi) || mpfr_greater_p(lo, hi))
    throw Error(Code::InvalidArgument, "interval with lo > hi");
  Interval r(g_prec, 0);
  mpfr_set(r.lo_, lo, MPFR_RNDD);
  mpfr_set(r.hi_, hi, MPFR_RNDU);
  return r;
}

Interval Interval::from_doubles(double lo, double hi) {
  if (!(lo <= hi)) throw Error(Code::InvalidArgument, "interval with lo > hi");
  Interval r(g_prec, 0);
  mpfr_set_d(r.lo_, lo, MPFR_RNDD);
  mpfr_set_d(r.hi_, hi, MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
  check_same(a, b);
  Interval r(a.prec(), 0);
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::entire() {
  Interval r(g_prec, 0);
  mpfr_set_inf(r.lo_, -1);
  mpfr_set_inf(r.hi_, 1);
  return r;
}

double Interval::mid_d() const { return static_cast<double>(mid_ld()); }
long double Interval::mid_ld() const {
  return (mpfr_get_ld(lo_, MPFR_RNDN) + mpfr_get_ld(hi_, MPFR_RNDN)) / 2;
}
double Interval::width_d() const { return width().hi_d(); }

Interval Interval::lower() const {
  Interval r(prec(), 0);
  mpfr_set(r.lo_, lo_, MPFR_RNDD);
  mpfr_set(r.hi_, lo_, MPFR_RNDU);
  return r;
}
Interval Interval::upper() const {
  Interval r(prec(), 0);
  mpfr_set(r.lo_, hi_, MPFR_RNDD);
  mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}
Interval Interval::mid() const {
  Interval r(prec(), 0);
  mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(r.lo_, r.lo_, 1, MPFR_RNDN);
  if (mpfr_less_p(r.lo_, lo_)) mpfr_set(r.lo_, lo_, MPFR_RNDN);
  if (mpfr_greater_p(r.lo_, hi_)) mpfr_set(r.lo_, hi_, MPFR_RNDN);
  mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
  return r;
}
Interval Interval::width() const {
  Interval r(prec(), 0);
  mpfr_sub(r.lo_, hi_, lo_, MPFR_RNDD);
  mpfr_sub(r.hi_, hi_, lo_, MPFR_RNDU);
  return r;
}
Interval Interval::mag() const {
  Interval r(prec(), 0);
  if (mpfr_cmpabs(lo_, hi_) > 0)
    mpfr_abs(r.lo_, lo_, MPFR_RNDN);
  else
    mpfr_abs(r.lo_, hi_, MPFR_RNDN);
  mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
  return r;
}
Interval Interval::mig() const {
  Interval r(prec(), 0);
  if (contains_zero())
    mpfr_set_zero(r.lo_, 1);
  else if (mpfr_sgn(lo_) > 0)
    mpfr_set(r.lo_, lo_, MPFR_RNDN);
  else
    mpfr_neg(r.lo_, hi_, MPFR_RNDN);
  mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
  return r;
}

bool Interval::contains(const Interval& o) const {
  return mpfr_lessequal_p(lo_, o.lo_) && mpfr_lessequal_p(o.hi_, hi_);
}
bool Interval::contains(const mpfr_t v) const { return mpfr_lessequal_p(lo_, v) && mpfr_lessequal_p(v, hi_); }
bool Interval::contains(double v) const { return mpfr_cmp_d(lo_, v) <= 0 && mpfr_cmp_d(hi_, v) >= 0; }
bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

std::string Interval::str(int digits) const {
  int n = digits > 0 ? digits : static_cast<int>(mpfr_get_str_ndigits(10, prec()));
  char* a = nullptr;
  char* b = nullptr;
  mpfr_asprintf(&a, "%.*RDe", n - 1, lo_);
  mpfr_asprintf(&b, "%.*RUe", n - 1, hi_);
  std::string s = std::string("[") + a + ", " + b + "]";
  mpfr_free_str(a);
  mpfr_free_str(b);
  return s;
}

Interval operator+(const Interval& a, const Interval& b) {
  check_same(a, b);
  Interval r(a.prec(), 0);
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}
Interval operator-(const Interval& a, const Interval& b) {
  check_same(a, b);
  Interval r(a.prec(), 0);
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}
Interval operator-(const Interval& a) {
  Interval r(a.prec(), 0);
  mpfr_neg(r.lo_, a.hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
  return r;
}
Interval operator*(const Interval& a, const Interval& b) {
  check_same(a, b);
  mpfr_prec_t p = a.prec();
  Interval r(p, 0);
  int sa = mpfr_sgn(a.lo_) >= 0 ? 1 : (mpfr_sgn(a.hi_) <= 0 ? -1 : 0);
  int sb = mpfr_sgn(b.lo_) >= 0 ? 1 : (mpfr_sgn(b.hi_) <= 0 ? -1 : 0);
  if (sa == 1 && sb == 1) {
    mpfr_mul(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_mul(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  Tmp t(p);
  mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  mpfr_set_inf(r.lo_, 1);
  mpfr_set_inf(r.hi_, -1);
  for (auto x : xs)
    for (auto y : ys) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (mpfr_nan_p(t)) mpfr_set_zero(t, 1);
      mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (mpfr_nan_p(t)) mpfr_set_zero(t, 1);
      mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    }
  return r;
}
Interval operator/(const Interval& a, const Interval& b) {
  check_same(a, b);
  if (b.contains_zero()) throw Error(Code::DomainViolation, "division by an interval containing 0: " + b.str(12));
  mpfr_prec_t p = a.prec();
  Interval r(p, 0);
  Tmp t(p);
  mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  mpfr_set_inf(r.lo_, 1);
  mpfr_set_inf(r.hi_, -1);
  for (auto x : xs)
    for (auto y : ys) {
      mpfr_div(t, x, y, MPFR_RNDD);
      mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
      mpfr_div(t, x, y, MPFR_RNDU);
      mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    }
  return r;
}

Interval sqr(const Interval& x) {
  Interval r(x);
  if (mpfr_sgn(x.lo()) >= 0) {
    mpfr_sqr(r.lo_mut(), x.lo(), MPFR_RNDD);
    mpfr_sqr(r.hi_mut(), x.hi(), MPFR_RNDU);
  } else if (mpfr_sgn(x.hi()) <= 0) {
    mpfr_sqr(r.lo_mut(), x.hi(), MPFR_RNDD);
    mpfr_sqr(r.hi_mut(), x.lo(), MPFR_RNDU);
  } else {
    Interval m = x.mag();
    mpfr_set_zero(r.lo_mut(), 1);
    mpfr_sqr(r.hi_mut(), m.hi(), MPFR_RNDU);
  }
  return r;
}

Interval sqrt(const Interval& x) {
  if (mpfr_sgn(x.hi()) < 0) throw Error(Code::DomainViolation, "sqrt of negative interval " + x.str(12));
  Interval r(x);
  if (mpfr_sgn(x.lo()) < 0)
    mpfr_set_zero(r.lo_mut(), 1);
  else
    mpfr_sqrt(r.lo_mut(), x.lo(), MPFR_RNDD);
  mpfr_sqrt(r.hi_mut(), x.hi(), MPFR_RNDU);
  return r;
}

Interval log(const Interval& x) {
  if (mpfr_sgn(x.hi()) <= 0) throw Error(Code::DomainViolation, "log of nonpositive interval " + x.str(12));
  Interval r(x);
  if (mpfr_sgn(x.lo()) <= 0)
    mpfr_set_inf(r.lo_mut(), -1);
  else
    mpfr_log(r.lo_mut(), x.lo(), MPFR_RNDD);
  mpfr_log(r.hi_mut(), x.hi(), MPFR_RNDU);
  return r;
}

Interval exp(const Interval& x) {
  Interval r(x);
  mpfr_exp(r.lo_mut(), x.lo(), MPFR_RNDD);
  mpfr_exp(r.hi_mut(), x.hi(), MPFR_RNDU);
  return r;
}

Interval pi_interval(mpfr_prec_t p) {
  PrecisionScope s(p);
  Interval r;
  mpfr_const_pi(r.lo_mut(), MPFR_RNDD);
  mpfr_const_pi(r.hi_mut(), MPFR_RNDU);
  return r;
}

Interval sin2pi(const Interval& x) {
  mpfr_prec_t p = x.prec();
  PrecisionScope scope(p);
  Interval r(x);
  if (!x.finite() || certainly_le(Interval(1L), x.width())) {
    mpfr_set_si(r.lo_mut(), -1, MPFR_RNDD);
    mpfr_set_si(r.hi_mut(), 1, MPFR_RNDU);
    return r;
  }
  // shift by an integer so the window starts in [0, 1)
  Tmp k(p), t0d(p), t0u(p), t1d(p), t1u(p);
  mpfr_floor(k, x.lo());
  mpfr_sub(t0d, x.lo(), k, MPFR_RNDD);
  mpfr_sub(t0u, x.lo(), k, MPFR_RNDU);
  mpfr_sub(t1d, x.hi(), k, MPFR_RNDD);
  mpfr_sub(t1u, x.hi(), k, MPFR_RNDU);
  Interval twopi = pi_interval(p) * Interval(2L);

  auto endpoint = [&](mpfr_srcptr d, mpfr_srcptr u) {
    Interval t = Interval::from_bounds(d, u);
    Interval uarg = t * twopi;
    Interval e(t);
    sin_endpoint(e.lo_mut(), e.hi_mut(), uarg.lo(), uarg.hi(), p);
    return e;
  };
  r = Interval::hull(endpoint(t0d, t0u), endpoint(t1d, t1u));

  // critical points 1/4 + j/2 within a guard distance of [t0, t1]
  Tmp guard(p), lo(p), hi(p), c(p);
  mpfr_set_ui_2exp(guard, 1, -static_cast<long>(p / 2), MPFR_RNDU);
  mpfr_sub(lo, t0d, guard, MPFR_RNDD);
  mpfr_add(hi, t1u, guard, MPFR_RNDU);
  for (int j = -1; j <= 4; ++j) {
    mpfr_set_si_2exp(c, 1 + 2 * j, -2, MPFR_RNDN);  // exact
    if (mpfr_lessequal_p(lo, c) && mpfr_lessequal_p(c, hi)) {
      if (j % 2 == 0)
        mpfr_set_si(r.hi_mut(), 1, MPFR_RNDU);
      else
        mpfr_set_si(r.lo_mut(), -1, MPFR_RNDD);
    }
  }
  if (mpfr_cmp_si(r.lo(), -1) < 0) mpfr_set_si(r.lo_mut(), -1, MPFR_RNDD);
  if (mpfr_cmp_si(r.hi(), 1) > 0) mpfr_set_si(r.hi_mut(), 1, MPFR_RNDU);
  return r;
}

Interval cos2pi(const Interval& x) {
  PrecisionScope scope(x.prec());
  return sin2pi(x + Interval(0.25));
}

Interval acos(const Interval& x) {
  if (mpfr_cmp_si(x.hi(), -1) < 0 || mpfr_cmp_si(x.lo(), 1) > 0)
    throw Error(Code::DomainViolation, "acos outside [-1,1]: " + x.str(12));
  mpfr_prec_t p = x.prec();
  Tmp a(p), b(p);
  mpfr_set(a, x.lo(), MPFR_RNDD);
  mpfr_set(b, x.hi(), MPFR_RNDU);
  if (mpfr_cmp_si(a, -1) < 0) mpfr_set_si(a, -1, MPFR_RNDD);
  if (mpfr_cmp_si(b, 1) > 0) mpfr_set_si(b, 1, MPFR_RNDU);
  Interval r(x);
  mpfr_acos(r.lo_mut(), b, MPFR_RNDD);
  mpfr_acos(r.hi_mut(), a, MPFR_RNDU);
  return r;
}

Interval abs(const Interval& x) {
  Interval r(x);
  Interval m = x.mag(), n = x.mig();
  mpfr_set(r.lo_mut(), n.lo(), MPFR_RNDD);
  mpfr_set(r.hi_mut(), m.hi(), MPFR_RNDU);
  return r;
}

Interval min(const Interval& a, const Interval& b) {
  check_same(a, b);
  Interval r(a);
  mpfr_min(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_min(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
  return r;
}
Interval max(const Interval& a, const Interval& b) {
  check_same(a, b);
  Interval r(a);
  mpfr_max(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_max(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
  return r;
}

Interval pow(const Interval& x, long n) {
  if (n == 0) {
    PrecisionScope s(x.prec());
    return Interval(1L);
  }
  if (n < 0) {
    PrecisionScope s(x.prec());
    return Interval(1L) / pow(x, -n);
  }
  Interval r(x);
  if (n % 2 == 1) {
    mpfr_pow_si(r.lo_mut(), x.lo(), n, MPFR_RNDD);
    mpfr_pow_si(r.hi_mut(), x.hi(), n, MPFR_RNDU);
    return r;
  }
  Interval m = x.mag(), g = x.mig();
  mpfr_pow_si(r.lo_mut(), g.lo(), n, MPFR_RNDD);
  mpfr_pow_si(r.hi_mut(), m.hi(), n, MPFR_RNDU);
  return r;
}

Interval pow(const Interval& x, const Interval& y) {
  check_same(x, y);
  if (mpfr_sgn(x.hi()) <= 0 || (mpfr_sgn(x.lo()) <= 0 && mpfr_sgn(y.lo()) <= 0))
    throw Error(Code::DomainViolation, "pow base not positive: " + x.str(12));
  mpfr_prec_t p = x.prec();
  Tmp base(p), t(p);
  mpfr_set(base, x.lo(), MPFR_RNDD);
  if (mpfr_sgn(base) < 0) mpfr_set_zero(base, 1);
  mpfr_srcptr xs[2] = {base, x.hi()};
  mpfr_srcptr ys[2] = {y.lo(), y.hi()};
  Interval r(x);
  mpfr_set_inf(r.lo_mut(), 1);
  mpfr_set_inf(r.hi_mut(), -1);
  for (auto a : xs)
    for (auto b : ys) {
      mpfr_pow(t, a, b, MPFR_RNDD);
      mpfr_min(r.lo_mut(), r.lo(), t, MPFR_RNDD);
      mpfr_pow(t, a, b, MPFR_RNDU);
      mpfr_max(r.hi_mut(), r.hi(), t, MPFR_RNDU);
    }
  return r;
}

Interval golden_ratio(mpfr_prec_t p) {
  PrecisionScope s(p);
  Interval five(5L);
  return (sqrt(five) - Interval(1L)) / Interval(2L);
}

Interval elementary(Kind k, const Interval& x, const Interval& y) {
  switch (k) {
    case Kind::Add: return x + y;
    case Kind::Sub: return x - y;
    case Kind::Mul: return x * y;
    case Kind::Div: return x / y;
    case Kind::Sqrt: return sqrt(x);
    case Kind::Log: return log(x);
    case Kind::Sin2pi: return sin2pi(x);
    case Kind::Cos2pi: return cos2pi(x);
    case Kind::Acos: return acos(x);
    case Kind::Pow: return pow(x, y);
  }
  throw Error(Code::InvalidArgument, "unknown kind");
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Add: return "add";
    case Kind::Sub: return "sub";
    case Kind::Mul: return "mul";
    case Kind::Div: return "div";
    case Kind::Sqrt: return "sqrt";
    case Kind::Log: return "log";
    case Kind::Sin2pi: return "sin2pi";
    case Kind::Cos2pi: return "cos2pi";
    case Kind::Acos: return "acos";
    case Kind::Pow: return "pow";
  }
  return "?";
}

IntervalMatrix IntervalMatrix::identity(int n) {
  IntervalMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Interval(1L);
  return m;
}

IntervalMatrix operator*(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(Code::DimensionMismatch, "matrix product shape");
  IntervalMatrix r(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) {
      Interval s(0L);
      for (int k = 0; k < a.cols_; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}
IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(Code::DimensionMismatch, "matrix sum shape");
  IntervalMatrix r(a.rows_, a.cols_);
  for (size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] + b.a_[i];
  return r;
}
IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(Code::DimensionMismatch, "matrix difference shape");
  IntervalMatrix r(a.rows_, a.cols_);
  for (size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] - b.a_[i];
  return r;
}
std::vector<Interval> IntervalMatrix::apply(const std::vector<Interval>& v) const {
  if (static_cast<int>(v.size()) != cols_) throw Error(Code::DimensionMismatch, "matrix-vector shape");
  std::vector<Interval> r;
  for (int i = 0; i < rows_; ++i) {
    Interval s(0L);
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[static_cast<size_t>(j)];
    r.push_back(s);
  }
  return r;
}
bool IntervalMatrix::contains(const IntervalMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return false;
  for (size_t i = 0; i < a_.size(); ++i)
    if (!a_[i].contains(o.a_[i])) return false;
  return true;
}

IntervalMatrix mat_inverse_verified(const IntervalMatrix& A) {
  int n = A.rows();
  if (n != A.cols() || n == 0) throw Error(Code::DimensionMismatch, "inverse of non-square matrix");
  mpfr_prec_t p = A(0, 0).prec();
  PrecisionScope scope(p);
  if (n == 2) {
    // adjugate over determinant keeps entrywise relative accuracy
    Interval det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    if (det.strictly_positive() || det.strictly_negative()) {
      IntervalMatrix R(2, 2);
      R(0, 0) = A(1, 1) / det;
      R(0, 1) = -A(0, 1) / det;
      R(1, 0) = -A(1, 0) / det;
      R(1, 1) = A(0, 0) / det;
      return R;
    }
  }
  // approximate inverse of the midpoint matrix, Gauss-Jordan with partial pivoting
  std::vector<std::vector<Interval>> m(static_cast<size_t>(n)), inv(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m[i].push_back(A(i, j).mid());
      inv[i].push_back(Interval(i == j ? 1L : 0L));
    }
  auto pt = [](const Interval& v) {
    Interval r = v.mid();
    return r;
  };
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (mpfr_cmpabs(m[r][c].lo(), m[piv][c].lo()) > 0) piv = r;
    if (mpfr_zero_p(m[piv][c].lo())) throw Error(Code::SingularOrUnverifiable, "midpoint matrix is singular");
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    Interval d = m[c][c];
    for (int j = 0; j < n; ++j) {
      m[c][j] = pt(m[c][j] / d);
      inv[c][j] = pt(inv[c][j] / d);
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || mpfr_zero_p(m[r][c].lo())) continue;
      Interval f = m[r][c];
      for (int j = 0; j < n; ++j) {
        m[r][j] = pt(m[r][j] - f * m[c][j]);
        inv[r][j] = pt(inv[r][j] - f * inv[c][j]);
      }
    }
  }
  IntervalMatrix R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = inv[i][j];
  IntervalMatrix E = IntervalMatrix::identity(n) - R * A;
  Interval enorm(0L), rnorm(0L);
  for (int i = 0; i < n; ++i) {
    Interval es(0L), rs(0L);
    for (int j = 0; j < n; ++j) {
      es += abs(E(i, j)).upper();
      rs += abs(R(i, j)).upper();
    }
    enorm = max(enorm, es.upper());
    rnorm = max(rnorm, rs.upper());
  }
  if (!certainly_lt(enorm, Interval(1L)))
    throw Error(Code::SingularOrUnverifiable, "inverse not verified: ||I - RA|| >= 1");
  Interval delta = (enorm * rnorm / (Interval(1L) - enorm)).upper();
  IntervalMatrix X(n, n);
  Interval pm = Interval::hull(-delta, delta);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) X(i, j) = R(i, j) + pm;
  return X;
}

const char* code_name(Code c) {
  switch (c) {
    case Code::Ok: return "Ok";
    case Code::DomainViolation: return "DomainViolation";
    case Code::PrecisionExhausted: return "PrecisionExhausted";
    case Code::SingularOrUnverifiable: return "SingularOrUnverifiable";
    case Code::DimensionMismatch: return "DimensionMismatch";
    case Code::RadiusCollapse: return "RadiusCollapse";
    case Code::LeftAmbientBox: return "LeftAmbientBox";
    case Code::ConeSignLoss: return "ConeSignLoss";
    case Code::UnsupportedSignature: return "UnsupportedSignature";
    case Code::GuessOutOfDomain: return "GuessOutOfDomain";
    case Code::MonotonicityUnverified: return "MonotonicityUnverified";
    case Code::GapCollapse: return "GapCollapse";
    case Code::BranchInconsistent: return "BranchInconsistent";
    case Code::NoSolution: return "NoSolution";
    case Code::DegenerateOrbit: return "DegenerateOrbit";
    case Code::InvalidArgument: return "InvalidArgument";
    case Code::CoveringFailed: return "CoveringFailed";
    case Code::CertificateMismatch: return "CertificateMismatch";
  }
  return "Unknown";
}

}  // namespace nhim
