#include "cones.hpp"

#include <sstream>

namespace nhim {

std::vector<Interval> Gamma::vec(const Signature& sig) const {
  if (sig.s > 0) return {a, b, c};
  return {a, c};
}

Gamma Gamma::from_vec(const std::vector<Interval>& v, const Signature& sig) {
  if (static_cast<int>(v.size()) != sig.blocks()) throw Error(Code::DimensionMismatch, "cone vector length");
  if (sig.s > 0) return Gamma(v[0], v[1], v[2]);
  return Gamma::two(v[0], v[1]);
}

std::string Gamma::str(const Signature& sig) const {
  std::ostringstream o;
  o << "(" << a.str(17);
  if (sig.s > 0) o << ", " << b.str(17);
  o << ", " << c.str(17) << ")";
  return o.str();
}

BoundMatrix BoundMatrix::from_values(const Signature& sig, const std::vector<std::vector<double>>& up,
                                     const std::vector<std::vector<double>>& lo) {
  int n = sig.blocks();
  if (static_cast<int>(up.size()) != n || static_cast<int>(lo.size()) != n)
    throw Error(Code::DimensionMismatch, "bound matrix size");
  BoundMatrix b{sig, IntervalMatrix(n, n), IntervalMatrix(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double u = up[i].at(j), l = lo[i].at(j);
      if (!(l >= 0 && l <= u)) throw Error(Code::InvalidArgument, "bound matrix requires 0 <= lower <= upper");
      b.upper(i, j) = Interval(u);
      b.lower(i, j) = Interval(l);
    }
  return b;
}

BoundMatrix BoundMatrix::diagonal(const Signature& sig, const std::vector<Interval>& d) {
  int n = sig.blocks();
  if (static_cast<int>(d.size()) != n) throw Error(Code::DimensionMismatch, "diagonal length");
  BoundMatrix b{sig, IntervalMatrix(n, n), IntervalMatrix(n, n)};
  for (int i = 0; i < n; ++i) {
    b.upper(i, i) = abs(d[i]).upper();
    b.lower(i, i) = abs(d[i]).lower();
  }
  return b;
}

BoundMatrix BoundMatrix::from_derivative(const Signature& sig, const IntervalMatrix& A) {
  if (A.rows() != sig.dim() || A.cols() != sig.dim()) throw Error(Code::DimensionMismatch, "derivative size");
  std::vector<int> start, len;
  start.push_back(0);
  len.push_back(sig.u);
  if (sig.s > 0) {
    start.push_back(sig.u);
    len.push_back(sig.s);
  }
  start.push_back(sig.u + sig.s);
  len.push_back(sig.c);
  int n = sig.blocks();
  BoundMatrix b{sig, IntervalMatrix(n, n), IntervalMatrix(n, n)};
  for (int I = 0; I < n; ++I)
    for (int J = 0; J < n; ++J) {
      int r0 = start[I], c0 = start[J], nr = len[I], nc = len[J];
      if (nr == 1 && nc == 1) {
        b.upper(I, J) = A(r0, c0).mag();
        b.lower(I, J) = A(r0, c0).mig();
        continue;
      }
      // sqrt(||B||_1 ||B||_inf) >= ||B||_2
      Interval n1(0L), ninf(0L);
      for (int j = 0; j < nc; ++j) {
        Interval s(0L);
        for (int i = 0; i < nr; ++i) s += A(r0 + i, c0 + j).mag();
        n1 = max(n1, s.upper());
      }
      for (int i = 0; i < nr; ++i) {
        Interval s(0L);
        for (int j = 0; j < nc; ++j) s += A(r0 + i, c0 + j).mag();
        ninf = max(ninf, s.upper());
      }
      b.upper(I, J) = sqrt(n1 * ninf).upper();
      Interval low(0L);
      if (I == J && nr == nc) {
        // sigma_min >= min_i |b_ii| - (row_i + col_i)/2
        Interval best(0L);
        bool first = true;
        for (int i = 0; i < nr; ++i) {
          Interval rs(0L), cs(0L);
          for (int j = 0; j < nc; ++j)
            if (j != i) {
              rs += A(r0 + i, c0 + j).mag();
              cs += A(r0 + j, c0 + i).mag();
            }
          Interval v = (A(r0 + i, c0 + i).mig() - (rs + cs) / Interval(2L)).lower();
          best = first ? v : min(best, v);
          first = false;
        }
        if (best.strictly_positive()) low = best;
      }
      b.lower(I, J) = low;
    }
  return b;
}

Interval q_form(const Gamma& g, const std::vector<Interval>& q, const Signature& sig) {
  if (static_cast<int>(q.size()) != sig.dim())
    throw Error(Code::DimensionMismatch, "q has " + std::to_string(q.size()) + " components, signature needs " +
                                             std::to_string(sig.dim()));
  Interval nx(0L), ny(0L), nt(0L);
  int k = 0;
  for (int i = 0; i < sig.u; ++i) nx += sqr(q[static_cast<size_t>(k++)]);
  for (int i = 0; i < sig.s; ++i) ny += sqr(q[static_cast<size_t>(k++)]);
  for (int i = 0; i < sig.c; ++i) nt += sqr(q[static_cast<size_t>(k++)]);
  Interval v = g.a * nx + g.c * nt;
  if (sig.s > 0) v += g.b * ny;
  return v;
}

IntervalMatrix t_matrix(const BoundMatrix& b) {
  int n = b.n();
  IntervalMatrix T(n, n);
  for (int j = 0; j < n; ++j) T(0, j) = j == 0 ? b.lo(0, 0) : -b.up(0, j);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < n; ++j) T(i, j) = b.up(i, j);
  return T;
}

IntervalMatrix c_matrix(const BoundMatrix& b) {
  // row i: coefficient of ||p_i||^2; column j: cone component (a, [b,] c)
  int n = b.n();
  IntervalMatrix C(n, n);
  for (int i = 0; i < n; ++i) {
    Interval s(0L);
    for (int k = 0; k < n; ++k)
      if (k != i) s += b.up(0, i) * b.up(0, k);
    C(i, 0) = sqr(b.lo(0, i)) - s;
    for (int j = 1; j < n; ++j) {
      Interval t(0L);
      for (int k = 0; k < n; ++k) t += b.up(j, i) * b.up(j, k);
      C(i, j) = t;
    }
  }
  return C;
}

IntervalMatrix g_matrix(const BoundMatrix& b) { return mat_inverse_verified(c_matrix(b)); }

std::vector<Interval> radii_step(const std::vector<Interval>& R, const BoundMatrix& b, const Interval& eps) {
  IntervalMatrix T = t_matrix(b);
  std::vector<Interval> v = T.apply(R);
  std::vector<Interval> out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i == 0)
      out.push_back((v[i] - eps).lower());
    else
      out.push_back((v[i] + eps).upper());
  }
  return out;
}

ChSet covering_step(const ChSet& N1, const BoundMatrix& b, const std::vector<Interval>& q2, const Interval& eps,
                    const Interval& ambient) {
  const Signature& sig = N1.sig;
  if (static_cast<int>(q2.size()) != sig.dim()) throw Error(Code::DimensionMismatch, "image centre dimension");
  if (!eps.strictly_positive() && !(eps.is_point() && mpfr_zero_p(eps.lo())))
    throw Error(Code::InvalidArgument, "eps must be positive");
  std::vector<Interval> R1{N1.ru};
  if (sig.s > 0) R1.push_back(N1.rs);
  R1.push_back(N1.rc);
  std::vector<Interval> R2 = radii_step(R1, b, eps);

  // centre uncertainty: recentre at the midpoint and pay its radius
  ChSet N2;
  N2.sig = sig;
  std::vector<Interval> rad(3, Interval(0L));
  Interval nx(0L), ny(0L), nt(0L);
  int k = 0;
  auto block = [&](int cnt, Interval& norm2, Interval& radb) {
    Interval r2(0L);
    for (int i = 0; i < cnt; ++i, ++k) {
      const Interval& c = q2[static_cast<size_t>(k)];
      N2.center.push_back(c.mid());
      Interval rr = (c - c.mid()).mag();
      r2 += sqr(rr);
      norm2 += sqr(abs(c).upper());
    }
    radb = sqrt(r2).upper();
  };
  block(sig.u, nx, rad[0]);
  block(sig.s, ny, rad[1]);
  block(sig.c, nt, rad[2]);
  N2.ru = (R2[0] - rad[0]).lower();
  size_t ic = sig.s > 0 ? 2 : 1;
  N2.rs = sig.s > 0 ? (R2[1] + rad[1]).upper() : Interval(0L);
  N2.rc = (R2[ic] + rad[2]).upper();

  if (!N2.ru.strictly_positive() || !N2.rc.strictly_positive() || (sig.s > 0 && !N2.rs.strictly_positive()))
    throw Error(Code::RadiusCollapse, "radius not positive after step: r_u=" + N2.ru.str(12));
  if (!certainly_le(sqrt(nx) + N2.ru, ambient) || !certainly_le(sqrt(nt) + N2.rc, ambient) ||
      (sig.s > 0 && !certainly_le(sqrt(ny) + N2.rs, ambient)))
    throw Error(Code::LeftAmbientBox, "image ch-set leaves the ambient box");
  return N2;
}

Gamma propagate_cone(const Gamma& g, const BoundMatrix& b, const ConeOptions& opt) {
  const Signature& sig = b.sig;
  std::vector<Interval> gv = g.vec(sig);
  if (!gv[0].strictly_positive()) throw Error(Code::ConeSignLoss, "input cone has a <= 0");
  for (size_t i = 1; i < gv.size(); ++i)
    if (!(mpfr_sgn(gv[i].hi()) <= 0)) throw Error(Code::ConeSignLoss, "input cone has a positive b/c component");
  IntervalMatrix G = g_matrix(b);
  std::vector<Interval> h = G.apply(gv);
  if (mpfr_sgn(h[0].lo()) < 0) throw Error(Code::ConeSignLoss, "G gamma has a possibly negative a: " + h[0].str(12));
  std::vector<Interval> out;
  for (size_t i = 0; i < h.size(); ++i) {
    Interval e = opt.relative ? (opt.eps * h[i].mag()).upper() : opt.eps;
    out.push_back((h[i].upper() + e).upper());
  }
  if (!out[0].strictly_positive()) throw Error(Code::ConeSignLoss, "propagated cone lost a > 0: " + out[0].str(12));
  for (size_t i = 1; i < out.size(); ++i)
    if (!out[i].strictly_negative())
      throw Error(Code::ConeSignLoss, "propagated cone lost negativity: " + out[i].str(12));
  return Gamma::from_vec(out, sig);
}

Gamma propagate_cone(const Gamma& g, const BoundMatrix& b, const Interval& eps) {
  ConeOptions o;
  o.eps = eps;
  return propagate_cone(g, b, o);
}

bool check_final_cone(const Gamma& gn, const Gamma& g1, const Signature& sig) {
  if (!gn.a.strictly_positive() || !g1.a.strictly_positive()) return false;
  if (!certainly_gt(g1.a, gn.a)) return false;
  if (sig.s > 0 && !certainly_gt(g1.b / g1.a, gn.b / gn.a)) return false;
  return certainly_gt(g1.c / g1.a, gn.c / gn.a);
}

bool check_chart_transition(const BoundMatrix& b_trans, const Interval& delta, const Interval& rho, const Interval& R,
                            const Interval& r, const Gamma& g0, const Gamma& g1, const Interval& m, bool dom_cond,
                            bool image_cond) {
  if (!certainly_gt(m, Interval(1L))) throw Error(Code::InvalidArgument, "m must exceed 1");
  if (!g0.c.strictly_negative()) return false;
  (void)R;  // enters only through the externally verified image condition
  if (!dom_cond || !image_cond) return false;
  Interval need = sqrt(g0.a / (-g0.c)) * r + delta;
  if (!certainly_gt(rho, need)) return false;
  const Signature& sig = b_trans.sig;
  std::vector<Interval> gam = g_matrix(b_trans).apply(g1.vec(sig));
  std::vector<Interval> g0v = g0.vec(sig);
  for (size_t i = 0; i < gam.size(); ++i)
    if (!certainly_gt(g0v[i], m * gam[i])) return false;
  return true;
}

}  // namespace nhim
