#pragma once
#include <memory>
#include <string>
#include <vector>

#include "interval.hpp"

namespace nhim {

constexpr int kMaxJetOrder = 11;

// Truncated Taylor series, c[k] = f^(k)(t0)/k!
struct Jet {
  std::vector<Interval> c;

  Jet() = default;
  Jet(int order, const Interval& value);
  static Jet variable(int order, const Interval& at);
  int order() const { return static_cast<int>(c.size()) - 1; }
  Interval derivative(int k) const;  // raw k-th derivative enclosure
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator*(const Interval& s, const Jet& a);
Jet sqr(const Jet& a);
Jet sqrt(const Jet& a);
Jet log(const Jet& a);
Jet sin2pi(const Jet& a);
Jet cos2pi(const Jet& a);

// Expressions g(t, x) over the closed grammar used by the driven map and its inverse.
class Expr {
 public:
  enum class Op { Const, Theta, X, Add, Sub, Mul, Div, Neg, Sqr, Sqrt, Log, Sin2pi, Cos2pi };

  static Expr constant(const Interval& v);
  static Expr theta();
  static Expr x();
  static Expr parse(const std::string& text);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr sqr(const Expr& a);
  friend Expr sqrt(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr sin2pi(const Expr& a);
  friend Expr cos2pi(const Expr& a);

  Interval eval(const Interval& t, const Interval& x) const;
  Jet eval(const Jet& t, const Jet& x) const;
  // enclosures of dg/dx and dg/dt over a box
  Interval d_dx(const Interval& t, const Interval& x) const;
  Interval d_dt(const Interval& t, const Interval& x) const;
  std::string str() const;
  bool valid() const { return node_ != nullptr; }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, const Expr& a, const Expr& b = Expr());
  std::shared_ptr<const Node> node_;

 public:
  Expr() = default;
};

// Polynomial sum c_j s^j on the window s in [0, r].
struct Poly {
  std::vector<Interval> c;
  Interval r;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  Interval eval(const Interval& s) const;          // Horner
  Interval range(const Interval& s) const;         // Taylor form at s.lo, tighter on short pieces
  Poly shifted(const Interval& d) const;           // s -> p(s + d)
  Jet jet_at(const Interval& s, int order) const;  // Taylor coefficients of p at s (interval s allowed)
  std::string str() const;
};
Poly operator-(const Poly& a, const Poly& b);

struct RemainderBound {
  Interval value;   // encloses the (n+1)-st derivative of g o p over [0, r]
  Interval scaled;  // value / (n+1)!
};

struct Composition {
  Jet at0;
  RemainderBound rem;
};

// g(t0 + s, p(s)) expanded at s = 0; remainder from the jet evaluated at s in [0, r]
// remainder_pieces > 1 splits [0, r] and hulls the pieces (tighter, same enclosure)
Composition jet_of_composition(const Expr& g, const Poly& p, int n, const Interval& r,
                               const Interval& t0 = Interval(0L), int remainder_pieces = 1);
Poly edge_upper(const Expr& g, const Poly& p, int n, const Interval& r, const Interval& t0 = Interval(0L),
                int remainder_pieces = 1);
Poly edge_lower(const Expr& g, const Poly& p, int n, const Interval& r, const Interval& t0 = Interval(0L),
                int remainder_pieces = 1);

// centred form: p is a polynomial in u with |u| <= half, theta = t0 + u; remainder over [-half, half]
Composition jet_of_composition_centered(const Expr& g, const Poly& p, int n, const Interval& half, const Interval& t0,
                                        int remainder_pieces = 1);
// edges with point coefficients; remainder and coefficient widths go into the constant term
Poly edge_upper_centered(const Expr& g, const Poly& p, int n, const Interval& half, const Interval& t0,
                         int remainder_pieces = 1);
Poly edge_lower_centered(const Expr& g, const Poly& p, int n, const Interval& half, const Interval& t0,
                         int remainder_pieces = 1);
// point-coefficient bound of an interval polynomial for |u| <= rho
Poly point_enclosure(const Poly& p, const Interval& rho, bool upper);

}  // namespace nhim
