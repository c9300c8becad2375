#pragma once
#include <string>
#include <vector>

#include "interval.hpp"

namespace nhim {

// block dimensions (u, s, c); s == 0 elides the y block
struct Signature {
  int u = 1, s = 1, c = 1;
  int blocks() const { return s > 0 ? 3 : 2; }
  int dim() const { return u + s + c; }
  int theta_block() const { return blocks() - 1; }
};

struct Gamma {
  Interval a, b, c;
  Gamma() = default;
  Gamma(const Interval& a_, const Interval& b_, const Interval& c_) : a(a_), b(b_), c(c_) {}
  static Gamma two(const Interval& a_, const Interval& c_) { return Gamma(a_, Interval(0L), c_); }
  // components in block order for the signature
  std::vector<Interval> vec(const Signature& sig) const;
  static Gamma from_vec(const std::vector<Interval>& v, const Signature& sig);
  std::string str(const Signature& sig) const;
};

struct BoundMatrix {
  Signature sig;
  IntervalMatrix upper;  // block norm upper bounds
  IntervalMatrix lower;  // block norm lower bounds
  static BoundMatrix from_values(const Signature& sig, const std::vector<std::vector<double>>& up,
                                 const std::vector<std::vector<double>>& lo);
  static BoundMatrix diagonal(const Signature& sig, const std::vector<Interval>& d);
  // interval derivative enclosure in coordinates; blocks bounded by verified norms
  static BoundMatrix from_derivative(const Signature& sig, const IntervalMatrix& A);
  int n() const { return sig.blocks(); }
  Interval up(int i, int j) const { return upper(i, j).upper(); }
  Interval lo(int i, int j) const { return lower(i, j).lower(); }
};

struct ChSet {
  Signature sig;
  std::vector<Interval> center;  // length u + s + c, ordered (x, y, theta)
  Interval ru, rs, rc;
};

struct ConeOptions {
  Interval eps = Interval(0L);
  bool relative = false;  // eps scales with each component's magnitude
};

Interval q_form(const Gamma& g, const std::vector<Interval>& q, const Signature& sig);
IntervalMatrix t_matrix(const BoundMatrix& b);
IntervalMatrix c_matrix(const BoundMatrix& b);
IntervalMatrix g_matrix(const BoundMatrix& b);

// N2 with N1 => N2; throws RadiusCollapse / LeftAmbientBox
ChSet covering_step(const ChSet& N1, const BoundMatrix& b, const std::vector<Interval>& q2, const Interval& eps,
                    const Interval& ambient = Interval(1L));
// radii only, T R + (-eps, eps, eps) with directed selection
std::vector<Interval> radii_step(const std::vector<Interval>& R, const BoundMatrix& b, const Interval& eps);

Gamma propagate_cone(const Gamma& g, const BoundMatrix& b, const ConeOptions& opt);
Gamma propagate_cone(const Gamma& g, const BoundMatrix& b, const Interval& eps);

bool check_final_cone(const Gamma& gn, const Gamma& g1, const Signature& sig);
bool check_chart_transition(const BoundMatrix& b_trans, const Interval& delta, const Interval& rho, const Interval& R,
                            const Interval& r, const Gamma& g0, const Gamma& g1, const Interval& m,
                            bool dom_cond = true, bool image_cond = true);

}  // namespace nhim
