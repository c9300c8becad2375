#include "jets.hpp"

#include <cctype>
#include <sstream>

namespace nhim {

namespace {
void check_order(int n) {
  if (n < 0 || n > kMaxJetOrder + 1) throw Error(Code::InvalidArgument, "jet order out of range");
}
void same_order(const Jet& a, const Jet& b) {
  if (a.c.size() != b.c.size()) throw Error(Code::DimensionMismatch, "jets of different order");
}
Interval factorial(int k) {
  Interval f(1L);
  for (int i = 2; i <= k; ++i) f *= Interval(static_cast<long>(i));
  return f;
}
}  // namespace

Jet::Jet(int order, const Interval& value) {
  check_order(order);
  c.assign(static_cast<size_t>(order + 1), Interval(0L));
  c[0] = value;
}

Jet Jet::variable(int order, const Interval& at) {
  Jet j(order, at);
  if (order >= 1) j.c[1] = Interval(1L);
  return j;
}

Interval Jet::derivative(int k) const { return c.at(static_cast<size_t>(k)) * factorial(k); }

Jet operator+(const Jet& a, const Jet& b) {
  same_order(a, b);
  Jet r = a;
  for (size_t k = 0; k < r.c.size(); ++k) r.c[k] += b.c[k];
  return r;
}
Jet operator-(const Jet& a, const Jet& b) {
  same_order(a, b);
  Jet r = a;
  for (size_t k = 0; k < r.c.size(); ++k) r.c[k] -= b.c[k];
  return r;
}
Jet operator-(const Jet& a) {
  Jet r = a;
  for (auto& v : r.c) v = -v;
  return r;
}
Jet operator*(const Interval& s, const Jet& a) {
  Jet r = a;
  for (auto& v : r.c) v = s * v;
  return r;
}
Jet operator*(const Jet& a, const Jet& b) {
  same_order(a, b);
  size_t n = a.c.size();
  Jet r = a;
  for (size_t k = 0; k < n; ++k) {
    Interval s(0L);
    for (size_t j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
    r.c[k] = s;
  }
  return r;
}
Jet operator/(const Jet& a, const Jet& b) {
  same_order(a, b);
  size_t n = a.c.size();
  Jet r = a;
  for (size_t k = 0; k < n; ++k) {
    Interval s = a.c[k];
    for (size_t j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
    r.c[k] = s / b.c[0];
  }
  return r;
}
Jet sqr(const Jet& a) {
  size_t n = a.c.size();
  Jet r = a;
  for (size_t k = 0; k < n; ++k) {
    Interval s(0L);
    for (size_t j = 0; 2 * j < k; ++j) s += a.c[j] * a.c[k - j];
    s = Interval(2L) * s;
    if (k % 2 == 0) s += sqr(a.c[k / 2]);
    r.c[k] = s;
  }
  return r;
}
Jet sqrt(const Jet& a) {
  if (!a.c[0].strictly_positive())
    throw Error(Code::DomainViolation, "sqrt radicand not strictly positive: " + a.c[0].str(12));
  size_t n = a.c.size();
  Jet r = a;
  r.c[0] = sqrt(a.c[0]);
  Interval two_s0 = Interval(2L) * r.c[0];
  for (size_t k = 1; k < n; ++k) {
    Interval s = a.c[k];
    for (size_t j = 1; j < k; ++j) s -= r.c[j] * r.c[k - j];
    r.c[k] = s / two_s0;
  }
  return r;
}
Jet log(const Jet& a) {
  if (!a.c[0].strictly_positive())
    throw Error(Code::DomainViolation, "log argument not strictly positive: " + a.c[0].str(12));
  size_t n = a.c.size();
  Jet r = a;
  r.c[0] = log(a.c[0]);
  for (size_t k = 1; k < n; ++k) {
    Interval s(0L);
    for (size_t j = 1; j < k; ++j) s += Interval(static_cast<long>(j)) * r.c[j] * a.c[k - j];
    r.c[k] = (a.c[k] - s / Interval(static_cast<long>(k))) / a.c[0];
  }
  return r;
}
namespace {
void sincos2pi(const Jet& a, Jet& s, Jet& c) {
  size_t n = a.c.size();
  Interval twopi = pi_interval(a.c[0].prec()) * Interval(2L);
  s = a;
  c = a;
  s.c[0] = sin2pi(a.c[0]);
  c.c[0] = cos2pi(a.c[0]);
  for (size_t k = 1; k < n; ++k) {
    Interval ss(0L), cc(0L);
    for (size_t j = 1; j <= k; ++j) {
      Interval ju = Interval(static_cast<long>(j)) * a.c[j];
      ss += ju * c.c[k - j];
      cc += ju * s.c[k - j];
    }
    Interval f = twopi / Interval(static_cast<long>(k));
    s.c[k] = f * ss;
    c.c[k] = -(f * cc);
  }
}
}  // namespace
Jet sin2pi(const Jet& a) {
  Jet s, c;
  sincos2pi(a, s, c);
  return s;
}
Jet cos2pi(const Jet& a) {
  Jet s, c;
  sincos2pi(a, s, c);
  return c;
}

// ---- expressions

struct Expr::Node {
  Op op;
  Interval value;
  std::shared_ptr<const Node> a, b;
};

Expr Expr::make(Op op, const Expr& a, const Expr& b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = a.node_;
  n->b = b.node_;
  return Expr(n);
}
Expr Expr::constant(const Interval& v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return Expr(n);
}
Expr Expr::theta() {
  auto n = std::make_shared<Node>();
  n->op = Op::Theta;
  return Expr(n);
}
Expr Expr::x() {
  auto n = std::make_shared<Node>();
  n->op = Op::X;
  return Expr(n);
}
Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::make(Expr::Op::Neg, a); }
Expr sqr(const Expr& a) { return Expr::make(Expr::Op::Sqr, a); }
Expr sqrt(const Expr& a) { return Expr::make(Expr::Op::Sqrt, a); }
Expr log(const Expr& a) { return Expr::make(Expr::Op::Log, a); }
Expr sin2pi(const Expr& a) { return Expr::make(Expr::Op::Sin2pi, a); }
Expr cos2pi(const Expr& a) { return Expr::make(Expr::Op::Cos2pi, a); }

namespace {
template <class V>
struct Leaf;
template <>
struct Leaf<Interval> {
  static Interval constant(const Interval& v, const Interval&) { return v; }
};
template <>
struct Leaf<Jet> {
  static Jet constant(const Interval& v, const Jet& like) { return Jet(like.order(), v); }
};

}  // namespace

namespace {
template <class V, class N>
V walk(const N* n, const V& t, const V& x) {
  using Op = Expr::Op;
  switch (n->op) {
    case Op::Const: return Leaf<V>::constant(n->value, t);
    case Op::Theta: return t;
    case Op::X: return x;
    case Op::Add: return walk(n->a.get(), t, x) + walk(n->b.get(), t, x);
    case Op::Sub: return walk(n->a.get(), t, x) - walk(n->b.get(), t, x);
    case Op::Mul: {
      if (n->a->op == Op::Const) {
        if constexpr (std::is_same_v<V, Jet>) return n->a->value * walk(n->b.get(), t, x);
      }
      return walk(n->a.get(), t, x) * walk(n->b.get(), t, x);
    }
    case Op::Div: return walk(n->a.get(), t, x) / walk(n->b.get(), t, x);
    case Op::Neg: return -walk(n->a.get(), t, x);
    case Op::Sqr: return sqr(walk(n->a.get(), t, x));
    case Op::Sqrt: {
      V v = walk(n->a.get(), t, x);
      if constexpr (std::is_same_v<V, Interval>) {
        if (!v.strictly_positive())
          throw Error(Code::DomainViolation, "sqrt radicand not strictly positive: " + v.str(12));
      }
      return sqrt(v);
    }
    case Op::Log: return log(walk(n->a.get(), t, x));
    case Op::Sin2pi: return sin2pi(walk(n->a.get(), t, x));
    case Op::Cos2pi: return cos2pi(walk(n->a.get(), t, x));
  }
  throw Error(Code::InvalidArgument, "bad expression node");
}

template <class N>
std::string show(const N* n) {
  using Op = Expr::Op;
  switch (n->op) {
    case Op::Const: {
      if (n->value.is_point()) {
        char* s = nullptr;
        mpfr_asprintf(&s, "%.20Rg", n->value.lo());
        std::string r(s);
        mpfr_free_str(s);
        return r;
      }
      return n->value.str(20);
    }
    case Op::Theta: return "t";
    case Op::X: return "x";
    case Op::Add: return "(" + show(n->a.get()) + " + " + show(n->b.get()) + ")";
    case Op::Sub: return "(" + show(n->a.get()) + " - " + show(n->b.get()) + ")";
    case Op::Mul: return show(n->a.get()) + "*" + show(n->b.get());
    case Op::Div: return show(n->a.get()) + "/" + show(n->b.get());
    case Op::Neg: return "-" + show(n->a.get());
    case Op::Sqr: return "sqr(" + show(n->a.get()) + ")";
    case Op::Sqrt: return "sqrt(" + show(n->a.get()) + ")";
    case Op::Log: return "log(" + show(n->a.get()) + ")";
    case Op::Sin2pi: return "sin2pi(" + show(n->a.get()) + ")";
    case Op::Cos2pi: return "cos2pi(" + show(n->a.get()) + ")";
  }
  return "?";
}
}  // namespace

Interval Expr::eval(const Interval& t, const Interval& x) const {
  if (!node_) throw Error(Code::InvalidArgument, "empty expression");
  return walk(node_.get(), t, x);
}
Jet Expr::eval(const Jet& t, const Jet& x) const {
  if (!node_) throw Error(Code::InvalidArgument, "empty expression");
  same_order(t, x);
  return walk(node_.get(), t, x);
}
Interval Expr::d_dx(const Interval& t, const Interval& x) const {
  return eval(Jet(1, t), Jet::variable(1, x)).c[1];
}
Interval Expr::d_dt(const Interval& t, const Interval& x) const {
  return eval(Jet::variable(1, t), Jet(1, x)).c[1];
}
std::string Expr::str() const { return node_ ? show(node_.get()) : std::string("<empty>"); }

// grammar: expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)* ;
// unary := '-' unary | power ; power := atom ('^' 2)? ; atom := number | t | x | fn '(' expr ')' | '(' expr ')'
namespace {
struct Parser {
  std::string s;
  size_t i = 0;
  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& m) {
    throw Error(Code::InvalidArgument, "expression parse error at " + std::to_string(i) + ": " + m);
  }
  Expr expr() {
    Expr e = term();
    for (;;) {
      if (eat('+'))
        e = e + term();
      else if (eat('-'))
        e = e - term();
      else
        return e;
    }
  }
  Expr term() {
    Expr e = unary();
    for (;;) {
      if (eat('*'))
        e = e * unary();
      else if (eat('/'))
        e = e / unary();
      else
        return e;
    }
  }
  Expr unary() {
    if (eat('-')) return -unary();
    return power();
  }
  Expr power() {
    Expr a = atom();
    if (eat('^')) {
      ws();
      if (i < s.size() && s[i] == '2') {
        ++i;
        return sqr(a);
      }
      fail("only ^2 is supported");
    }
    return a;
  }
  Expr atom() {
    ws();
    if (i >= s.size()) fail("unexpected end");
    if (eat('(')) {
      Expr e = expr();
      if (!eat(')')) fail("missing )");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == '[') {
      size_t j = i;
      if (s[i] == '[') {
        j = s.find(']', i);
        if (j == std::string::npos) fail("missing ]");
        ++j;
      } else {
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.' || s[j] == 'e' ||
                                s[j] == 'E' || ((s[j] == '-' || s[j] == '+') && (s[j - 1] == 'e' || s[j - 1] == 'E'))))
          ++j;
      }
      Interval v = Interval::parse(s.substr(i, j - i));
      i = j;
      return Expr::constant(v);
    }
    size_t j = i;
    while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
    std::string id = s.substr(i, j - i);
    i = j;
    if (id == "t" || id == "theta") return Expr::theta();
    if (id == "x") return Expr::x();
    if (id == "pi") return Expr::constant(pi_interval(working_precision()));
    Expr (*fn)(const Expr&) = nullptr;
    if (id == "sqrt") fn = sqrt;
    if (id == "sqr") fn = sqr;
    if (id == "log") fn = log;
    if (id == "sin2pi") fn = sin2pi;
    if (id == "cos2pi") fn = cos2pi;
    if (!fn) fail("unknown identifier '" + id + "'");
    if (!eat('(')) fail("expected (");
    Expr e = expr();
    if (!eat(')')) fail("missing )");
    return fn(e);
  }
};
}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p{text};
  Expr e = p.expr();
  p.ws();
  if (p.i != text.size()) p.fail("trailing input");
  return e;
}

// ---- polynomials

Interval Poly::eval(const Interval& s) const {
  Interval v(0L);
  for (size_t k = c.size(); k-- > 0;) v = v * s + c[k];
  return v;
}

Jet Poly::jet_at(const Interval& s, int order) const {
  // coefficients of p(s + h) in h
  Jet j(order, Interval(0L));
  std::vector<Interval> b = c;
  int d = degree();
  for (int k = 0; k <= order && k <= d; ++k) {
    // synthetic division by (h - s): value of the current quotient at s
    Interval v(0L);
    for (int m = static_cast<int>(b.size()) - 1; m >= 0; --m) v = v * s + b[static_cast<size_t>(m)];
    j.c[static_cast<size_t>(k)] = v;
    // derivative / (k+1) step: b_m <- (m) b_m shifted, tracked as Taylor coefficients
    std::vector<Interval> nb;
    for (size_t m = 1; m < b.size(); ++m) nb.push_back(Interval(static_cast<long>(m)) * b[m]);
    for (auto& e : nb) e /= Interval(static_cast<long>(k + 1));
    b = nb;
  }
  return j;
}

Interval Poly::range(const Interval& s) const {
  Jet j = jet_at(s.lower(), degree());
  Interval h = s - s.lower();
  Interval lo_h(0L);
  h = Interval::hull(lo_h, h.upper());
  Interval v(0L);
  for (size_t k = j.c.size(); k-- > 0;) v = v * h + j.c[k];
  return v;
}

Poly Poly::shifted(const Interval& d) const {
  Jet j = jet_at(d, degree());
  Poly p;
  p.c = j.c;
  p.r = r;
  return p;
}

std::string Poly::str() const {
  std::ostringstream o;
  o << "r=" << r.str() << " c=[";
  for (size_t k = 0; k < c.size(); ++k) o << (k ? "; " : "") << c[k].str();
  o << "]";
  return o.str();
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly p;
  p.r = a.r;
  size_t n = std::max(a.c.size(), b.c.size());
  for (size_t k = 0; k < n; ++k) {
    Interval x = k < a.c.size() ? a.c[k] : Interval(0L);
    Interval y = k < b.c.size() ? b.c[k] : Interval(0L);
    p.c.push_back(x - y);
  }
  return p;
}

namespace {
Interval remainder_over(const Expr& g, const Poly& p, int n, const Interval& a, const Interval& b, const Interval& t0,
                        int pieces) {
  if (pieces < 1) throw Error(Code::InvalidArgument, "remainder pieces must be positive");
  Interval out;
  Interval len = b - a;
  for (int k = 0; k < pieces; ++k) {
    Interval lo = k == 0 ? a : a + len * Interval(k) / Interval(pieces);
    Interval hi = k == pieces - 1 ? b : a + len * Interval(k + 1) / Interval(pieces);
    Interval w = Interval::hull(lo.lower(), hi.upper());
    Jet over = g.eval(Jet::variable(n + 2, t0 + w), p.jet_at(w, n + 2));
    Interval c = over.c[static_cast<size_t>(n + 1)];
    // mean value form around the piece midpoint, intersected with the direct bound
    Interval m = w.mid();
    Jet at = g.eval(Jet::variable(n + 1, t0 + m), p.jet_at(m, n + 1));
    Interval mv = at.c[static_cast<size_t>(n + 1)] + Interval(n + 2) * over.c[static_cast<size_t>(n + 2)] * (w - m);
    mpfr_srcptr l = mpfr_greater_p(mv.lo(), c.lo()) ? mv.lo() : c.lo();
    mpfr_srcptr h = mpfr_less_p(mv.hi(), c.hi()) ? mv.hi() : c.hi();
    c = Interval::from_bounds(l, h);
    out = k ? Interval::hull(out, c) : c;
  }
  return out;
}

void check_degree(int n) {
  if (n < 0 || n > kMaxJetOrder - 1) throw Error(Code::InvalidArgument, "degree out of range");
}
}  // namespace

Composition jet_of_composition(const Expr& g, const Poly& p, int n, const Interval& r, const Interval& t0,
                               int remainder_pieces) {
  check_degree(n);
  if (mpfr_sgn(r.lo()) < 0) throw Error(Code::InvalidArgument, "negative window");
  Composition out;
  out.at0 = g.eval(Jet::variable(n, t0), p.jet_at(Interval(0L), n));
  out.rem.scaled = remainder_over(g, p, n, Interval(0L), r, t0, remainder_pieces);
  out.rem.value = out.rem.scaled * factorial(n + 1);
  return out;
}

Composition jet_of_composition_centered(const Expr& g, const Poly& p, int n, const Interval& half, const Interval& t0,
                                        int remainder_pieces) {
  check_degree(n);
  if (mpfr_sgn(half.lo()) < 0) throw Error(Code::InvalidArgument, "negative window");
  Composition out;
  out.at0 = g.eval(Jet::variable(n, t0), p.jet_at(Interval(0L), n));
  out.rem.scaled = remainder_over(g, p, n, -half, half, t0, remainder_pieces);
  out.rem.value = out.rem.scaled * factorial(n + 1);
  return out;
}

Poly point_enclosure(const Poly& p, const Interval& rho, bool upper) {
  Poly out;
  out.r = p.r;
  Interval extra(0L), pw(1L);
  for (size_t j = 0; j < p.c.size(); ++j) {
    Interval m = p.c[j].mid();
    out.c.push_back(m);
    extra = extra + (p.c[j] - m).mag() * pw;
    pw = pw * rho.upper();
  }
  if (out.c.empty()) out.c.push_back(Interval(0L));
  out.c[0] = upper ? (out.c[0] + extra.upper()).upper() : (out.c[0] - extra.upper()).lower();
  return out;
}

namespace {
Poly edge_centered(const Expr& g, const Poly& p, int n, const Interval& half, const Interval& t0, bool upper,
                   int pieces) {
  Composition cmp = jet_of_composition_centered(g, p, n, half, t0, pieces);
  // u^{n+1} over [-half, half]
  Interval hp = pow(half.upper(), static_cast<long>(n + 1));
  Interval un = (n + 1) % 2 ? Interval::hull(-hp, hp) : Interval::hull(Interval(0L), hp);
  Poly e;
  e.r = half * Interval(2L);
  e.c = cmp.at0.c;
  e.c[0] = e.c[0] + cmp.rem.scaled * un;
  return point_enclosure(e, half, upper);
}
}  // namespace

Poly edge_upper_centered(const Expr& g, const Poly& p, int n, const Interval& half, const Interval& t0, int pieces) {
  return edge_centered(g, p, n, half, t0, true, pieces);
}
Poly edge_lower_centered(const Expr& g, const Poly& p, int n, const Interval& half, const Interval& t0, int pieces) {
  return edge_centered(g, p, n, half, t0, false, pieces);
}

namespace {
Poly edge(const Expr& g, const Poly& p, int n, const Interval& r, const Interval& t0, bool upper, int pieces) {
  Composition cmp = jet_of_composition(g, p, n, r, t0, pieces);
  Interval w = Interval::hull(Interval(0L), r.upper());
  Poly e;
  e.r = r;
  for (int j = 0; j <= n; ++j) {
    Interval cj = cmp.at0.c[static_cast<size_t>(j)];
    if (j == n) cj = cj + cmp.rem.scaled * w;
    e.c.push_back(upper ? cj.upper() : cj.lower());
  }
  return e;
}
}  // namespace

Poly edge_upper(const Expr& g, const Poly& p, int n, const Interval& r, const Interval& t0, int pieces) {
  return edge(g, p, n, r, t0, true, pieces);
}
Poly edge_lower(const Expr& g, const Poly& p, int n, const Interval& r, const Interval& t0, int pieces) {
  return edge(g, p, n, r, t0, false, pieces);
}

}  // namespace nhim
