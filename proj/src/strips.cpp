#include "strips.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace nhim {

namespace {

Interval piece(const Interval& w, int j, int n) {
  Interval a = j == 0 ? Interval(0L) : w * Interval(j) / Interval(n);
  Interval b = j == n - 1 ? w : w * Interval(j + 1) / Interval(n);
  return Interval::hull(a.lower(), b.upper());
}

// same piece in the centred variable u = s - w/2
Interval upiece(const Interval& w, int j, int n) { return piece(w, j, n) - w / Interval(2L); }

Interval point_of(const Real& v) { return Interval::parse(v.str(60, std::ios_base::scientific)).mid(); }

Real real_of(const Interval& v) {
  Real r;
  mpfr_set(r.backend().data(), v.lo(), MPFR_RNDN);
  Real h;
  mpfr_set(h.backend().data(), v.hi(), MPFR_RNDN);
  return (r + h) / 2;
}

bool sgn_ge0(mpfr_srcptr v) { return mpfr_sgn(v) >= 0; }

// |d f2/dx| of the inverse of two steps, plain double
double expansion_at(const DrivenParams& p, double th, double x) {
  double al = static_cast<double>(p.alpha_r());
  double a1 = p.a0_d() + p.eps_d() * std::sin(2 * M_PI * (th - al));
  double a2 = p.a0_d() + p.eps_d() * std::sin(2 * M_PI * (th - 2 * al));
  double u = std::sqrt((1 - x) / a1), v = std::sqrt((1 - u) / a2);
  return 1 / (4 * a1 * a2 * u * v);
}

double domain_gap(const DrivenParams& p, double th, double x) {
  double al = static_cast<double>(p.alpha_r());
  return x - (1 - (p.a0_d() + p.eps_d() * std::sin(2 * M_PI * (th - al))));
}

std::string istr(const Interval& v) { return v.str(12); }

}  // namespace

Interval StripGeometry::offset(long a, long b) const {
  Interval d = Interval(a - b) * w;
  double m = std::round(d.mid_d());
  return d - Interval(m);
}

Interval CurveStrip::gap_lower_bound(int pieces) const {
  Poly d = up - lo;
  Interval best;
  for (int j = 0; j < pieces; ++j) {
    Interval g = d.range(upiece(lo.r, j, pieces));
    if (j == 0 || mpfr_less_p(g.lo(), best.lo())) best = g.lower();
  }
  return best;
}

Interval CurveStrip::gap_enclosure(int pieces) const {
  Poly d = up - lo;
  Interval lo_b, hi_b;
  for (int j = 0; j < pieces; ++j) {
    Interval s = upiece(lo.r, j, pieces);
    Interval g = d.range(s);
    // a point value bounds the minimum from above
    Interval at = d.eval(s.lower());
    if (j == 0 || mpfr_less_p(g.lo(), lo_b.lo())) lo_b = g.lower();
    if (j == 0 || mpfr_less_p(at.hi(), hi_b.hi())) hi_b = at.upper();
  }
  Interval e = d.eval((lo.r / Interval(2L)).upper());
  if (mpfr_less_p(e.hi(), hi_b.hi())) hi_b = e.upper();
  return Interval::hull(lo_b, hi_b);
}

Poly fit_guess(const CurveGuess& guess, const StripGeometry& geo, long idx, int degree) {
  int n = std::max(degree, 1);
  Real q = real_of(geo.base(idx));
  Real w = real_of(geo.w);
  Real pi = boost::math::constants::pi<Real>();
  std::vector<Real> u(static_cast<size_t>(n + 1)), y(static_cast<size_t>(n + 1));
  for (int j = 0; j <= n; ++j) {
    u[static_cast<size_t>(j)] = -cos(pi * (2 * j + 1) / (2 * (n + 1))) / 2;
    y[static_cast<size_t>(j)] = guess(q + w / 2 + w * u[static_cast<size_t>(j)]);
  }
  // Vandermonde solve in u in [-1/2, 1/2]
  std::vector<std::vector<Real>> A(static_cast<size_t>(n + 1), std::vector<Real>(static_cast<size_t>(n + 2)));
  for (int i = 0; i <= n; ++i) {
    Real v = 1;
    for (int j = 0; j <= n; ++j) {
      A[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
      v *= u[static_cast<size_t>(i)];
    }
    A[static_cast<size_t>(i)][static_cast<size_t>(n + 1)] = y[static_cast<size_t>(i)];
  }
  for (int c = 0; c <= n; ++c) {
    int piv = c;
    for (int r = c + 1; r <= n; ++r)
      if (abs(A[static_cast<size_t>(r)][static_cast<size_t>(c)]) > abs(A[static_cast<size_t>(piv)][static_cast<size_t>(c)]))
        piv = r;
    std::swap(A[static_cast<size_t>(c)], A[static_cast<size_t>(piv)]);
    for (int r = 0; r <= n; ++r) {
      if (r == c) continue;
      Real f = A[static_cast<size_t>(r)][static_cast<size_t>(c)] / A[static_cast<size_t>(c)][static_cast<size_t>(c)];
      for (int k = c; k <= n + 1; ++k)
        A[static_cast<size_t>(r)][static_cast<size_t>(k)] -= f * A[static_cast<size_t>(c)][static_cast<size_t>(k)];
    }
  }
  Poly p;
  p.r = geo.w;
  Real wp = 1;
  for (int j = 0; j <= n; ++j) {
    Real cj = A[static_cast<size_t>(j)][static_cast<size_t>(n + 1)] / A[static_cast<size_t>(j)][static_cast<size_t>(j)];
    p.c.push_back(point_of(cj / wp));
    wp *= w;
  }
  return p;
}

std::vector<CurveStrip> build_initial_strips(const CurveGuess& guess, const StripGeometry& geo, const StripMap& map,
                                             long first, int count, const std::vector<double>& half_heights,
                                             int degree) {
  if (count < 1) throw Error(Code::InvalidArgument, "strip count must be positive");
  if (static_cast<int>(half_heights.size()) != count)
    throw Error(Code::DimensionMismatch, "one half height per strip expected");
  std::vector<CurveStrip> out;
  for (int k = 0; k < count; ++k) {
    double h = half_heights[static_cast<size_t>(k)];
    if (!(h > 0)) throw Error(Code::InvalidArgument, "degenerate strip: half height must be positive", k);
    CurveStrip s;
    s.idx = first + k;
    Poly c = fit_guess(guess, geo, s.idx, degree);
    s.lo = c;
    s.up = c;
    s.lo.c[0] = (c.c[0] - Interval(h)).lower();
    s.up.c[0] = (c.c[0] + Interval(h)).upper();
    for (const StripBox& b : strip_boxes(s, geo, 10)) {
      try {
        map.domain(b.theta, b.x);
      } catch (const Error& e) {
        throw Error(Code::GuessOutOfDomain, "strip " + std::to_string(s.idx) + " leaves the map domain: " + e.what(), k);
      }
    }
    if (!s.gap_lower_bound(10).strictly_positive())
      throw Error(Code::GapCollapse, "initial strip edges not separated", k);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CurveStrip> build_initial_strips(const CurveGuess& guess, const StripGeometry& geo, const StripMap& map,
                                             long first, int count, double half_height, int degree) {
  return build_initial_strips(guess, geo, map, first, count,
                              std::vector<double>(static_cast<size_t>(std::max(count, 0)), half_height), degree);
}

std::vector<StripBox> strip_boxes(const CurveStrip& s, const StripGeometry& geo, int pieces) {
  std::vector<StripBox> out;
  Interval q = geo.base(s.idx);
  for (int j = 0; j < pieces; ++j) {
    Interval sj = piece(geo.w, j, pieces), uj = upiece(geo.w, j, pieces);
    out.push_back({q + sj, Interval::hull(s.lo.range(uj), s.up.range(uj))});
  }
  return out;
}

CurveStrip image_strip(const CurveStrip& s, const StripGeometry& geo, const StripMap& map, const ImageOptions& opt) {
  try {
    for (const StripBox& b : strip_boxes(s, geo, opt.subdivisions)) {
      map.domain(b.theta, b.x);
      Interval d = map.f2.d_dx(b.theta, b.x);
      if (!d.strictly_negative())
        throw Error(Code::MonotonicityUnverified, "df2/dx not certainly negative: " + istr(d));
    }
    Interval q = geo.base(s.idx);
    CurveStrip m;
    m.idx = s.idx + map.window_shift;
    // f reverses orientation: the lower edge goes on top
    Interval half = geo.w / Interval(2L);
    if (opt.centered) {
      m.up = edge_lower_centered(map.f2, s.lo, opt.degree, half, q + half, opt.remainder_pieces);
      m.lo = edge_upper_centered(map.f2, s.up, opt.degree, half, q + half, opt.remainder_pieces);
    } else {
      // expansion at the left end of the window, then back to the centred variable
      Poly a = edge_lower(map.f2, s.lo.shifted(-half), opt.degree, geo.w, q, opt.remainder_pieces);
      Poly b = edge_upper(map.f2, s.up.shifted(-half), opt.degree, geo.w, q, opt.remainder_pieces);
      m.up = point_enclosure(a.shifted(half), half, false);
      m.lo = point_enclosure(b.shifted(half), half, true);
    }
    m.up.r = geo.w;
    m.lo.r = geo.w;
    if (!m.gap_lower_bound(opt.subdivisions).strictly_positive())
      throw Error(Code::GapCollapse, "image strip edges not separated, gap " + istr(m.gap_enclosure(opt.subdivisions)));
    return m;
  } catch (const Error& e) {
    throw e.at_step(opt.step);
  }
}

CoveringResult check_strip_covering(const CurveStrip& M, const std::vector<CurveStrip>& targets,
                                    const StripGeometry& geo, int subdivisions) {
  CoveringResult r;
  if (targets.empty()) {
    r.reason = "no targets";
    return r;
  }
  for (size_t i = 1; i < targets.size(); ++i)
    if (targets[i].idx != targets[i - 1].idx + 1) {
      r.reason = "targets not consecutive";
      return r;
    }
  // theta nesting of the window in the union
  if (!sgn_ge0(geo.offset(M.idx, targets.front().idx).lo()) || mpfr_sgn(geo.offset(M.idx, targets.back().idx).hi()) > 0) {
    r.reason = "window not inside the targets";
    return r;
  }
  // edges compared in the target's local coordinates: difference polynomials in M's variable u
  Interval half = geo.w / Interval(2L);
  std::vector<Poly> du, dl;
  std::vector<Interval> off;
  for (const CurveStrip& T : targets) {
    Interval d = geo.offset(M.idx, T.idx);
    off.push_back(d);
    du.push_back(M.up - T.up.shifted(d));
    dl.push_back(T.lo.shifted(d) - M.lo);
  }
  bool first = true;
  for (int j = 0; j < subdivisions; ++j) {
    Interval uj = upiece(geo.w, j, subdivisions);
    for (size_t t = 0; t < targets.size(); ++t) {
      // part of the piece inside the target window: u + d in [-w/2, w/2]
      Interval a = -half - off[t], b = half - off[t];
      mpfr_srcptr lo = mpfr_greater_p(uj.lo(), a.lo()) ? uj.lo() : a.lo();
      mpfr_srcptr hi = mpfr_less_p(uj.hi(), b.hi()) ? uj.hi() : b.hi();
      if (mpfr_greater_p(lo, hi)) continue;
      Interval clip = Interval::from_bounds(lo, hi);
      Interval mup = du[t].range(clip).lower(), mlo = dl[t].range(clip).lower();
      if (first || mpfr_less_p(mup.lo(), r.margin_up.lo())) r.margin_up = mup;
      if (first || mpfr_less_p(mlo.lo(), r.margin_lo.lo())) r.margin_lo = mlo;
      first = false;
      // exit edges beyond the target edges; the target midline then lies inside M
      if (!mup.strictly_positive() || !mlo.strictly_positive()) {
        if (r.failing_piece < 0) {
          r.failing_piece = j;
          r.failing_target = targets[t].idx;
          r.reason = !mup.strictly_positive() ? "upper edge inside target" : "lower edge inside target";
        }
      }
    }
  }
  r.ok = r.failing_piece < 0 && !first;
  if (first) r.reason = "no overlap";
  return r;
}

BoundMatrix strip_bound_matrix(const StripMap& map, const std::vector<StripBox>& boxes, const Interval& h_src,
                               const Interval& h_dst, const Interval& beta) {
  Interval fx, ft;
  for (size_t i = 0; i < boxes.size(); ++i) {
    Interval a = map.f2.d_dx(boxes[i].theta, boxes[i].x), b = map.f2.d_dt(boxes[i].theta, boxes[i].x);
    fx = i ? Interval::hull(fx, a) : a;
    ft = i ? Interval::hull(ft, b) : b;
  }
  Interval s = h_src / h_dst;
  BoundMatrix B;
  B.sig = Signature{1, 0, 1};
  B.upper = IntervalMatrix(2, 2);
  B.lower = IntervalMatrix(2, 2);
  B.upper(0, 0) = (s * fx.mag()).upper();
  B.lower(0, 0) = (s * fx.mig()).lower();
  B.upper(0, 1) = (s * ft.mag() / beta).upper();
  B.lower(0, 1) = Interval(0L);
  B.upper(1, 0) = Interval(0L);
  B.lower(1, 0) = Interval(0L);
  B.upper(1, 1) = s.upper();
  B.lower(1, 1) = s.lower();
  return B;
}

ConeItineraryResult verify_cone_itinerary(const StripMap& map, const std::vector<ConeLeg>& legs, const Gamma& g0,
                                          const ConeStepOptions& opt) {
  ConeItineraryResult r;
  Signature sig{1, 0, 1};
  Gamma g = g0;
  for (size_t m = 0; m < legs.size(); ++m) {
    try {
      g = propagate_cone(g, strip_bound_matrix(map, legs[m].boxes, legs[m].h_src, legs[m].h_dst, opt.beta), opt.cone);
    } catch (const Error& e) {
      r.failure = "leg " + std::to_string(m) + " (" + std::to_string(legs[m].from) + " -> " +
                  std::to_string(legs[m].to) + "): " + e.what();
      r.steps = static_cast<int>(m) + 1;
      return r;
    }
    if (check_final_cone(g, g0, sig)) {
      r.ok = true;
      r.steps = static_cast<int>(m) + 1;
      r.terminal = g;
      r.margin_a = (g0.a - g.a).lower();
      r.margin_c = (g0.c / g0.a - g.c / g.a).lower();
      return r;
    }
  }
  r.steps = static_cast<int>(legs.size());
  r.terminal = g;
  r.failure = "cone never dominates gamma0 along the itinerary";
  return r;
}

ConeCoverResult verify_cones_on_cover(const StripMap& map, const std::vector<ConeRegion>& regions,
                                      const std::vector<std::pair<int, int>>& pairs, const Gamma& g0,
                                      const ConeStepOptions& opt) {
  ConeCoverResult res;
  bool first = true;
  for (auto [i, j] : pairs) {
    const ConeRegion& src = regions.at(static_cast<size_t>(i));
    const ConeRegion& dst = regions.at(static_cast<size_t>(j));
    ConeLeg leg{src.boxes, src.h, dst.h, src.id, dst.id};
    ConeItineraryResult r = verify_cone_itinerary(map, {leg}, g0, opt);
    if (!r.ok)
      throw Error(Code::ConeSignLoss, "cone condition fails for region pair (" + std::to_string(src.id) + ", " +
                                          std::to_string(dst.id) + "): " + r.failure);
    ++res.checked;
    if (first || mpfr_less_p(r.margin_a.lo(), res.worst_margin_a.lo())) res.worst_margin_a = r.margin_a;
    if (first || mpfr_less_p(r.margin_c.lo(), res.worst_margin_c.lo())) res.worst_margin_c = r.margin_c;
    first = false;
  }
  return res;
}

StripMap logistic_strip_map(const DrivenParams& p, const StripGeometry&) {
  StripMap m;
  m.f2 = inverse_t2_expr(p);
  m.window_shift = -4;
  m.domain = [p](const Interval& t, const Interval& x) { (void)inverse_t2(p, t, x); };
  return m;
}

StripGeometry logistic_geometry(const DrivenParams& p, const std::string& theta_left) {
  StripGeometry g;
  g.theta0 = Interval::parse(theta_left).mid();
  g.w = p.alpha_i() / Interval(2L);
  return g;
}

StripPlan plan_strips(const DrivenParams& p, const ProofConfig& cfg, const CurveGuess& guess) {
  StripPlan plan;
  const int n = cfg.strips;
  double w = static_cast<double>(p.alpha_r()) / 2;
  double t0 = std::stod(cfg.theta_left);
  auto at = [&](double th) { return static_cast<double>(guess(Real(th))); };
  auto window_dist = [&](double q) {
    double m = 1e300;
    for (int j = 0; j <= 4; ++j) {
      double th = q + w * j / 4;
      m = std::min(m, domain_gap(p, th, at(th)));
    }
    return m;
  };
  std::vector<double> cap(static_cast<size_t>(n)), E(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    double q = t0 + k * w, th = q + w / 2;
    E[static_cast<size_t>(k)] = expansion_at(p, th, at(th));
    cap[static_cast<size_t>(k)] = std::min(cfg.h_max, cfg.domain_fraction * window_dist(q));
  }
  plan.expansion = E;

  // landing windows of the long chains (0-based strip numbers)
  std::set<long> land;
  for (int i = 0; i < cfg.reentry; ++i) {
    double eff = i - 4.0 * cfg.chain_length + 1.0 / w;
    long j0 = static_cast<long>(std::floor(eff));
    land.insert(j0);
    land.insert(j0 + 1);
  }

  std::vector<double> h = cap;
  for (int iter = 0; iter < 4; ++iter) {
    // non-rigorous chain gaps from the products of expansion factors, trimmed to V
    double land_gap = 1e300, min_gap = 1e300;
    for (int i = 0; i < cfg.reentry; ++i) {
      double g = h[static_cast<size_t>(i)], q = t0 + i * w;
      double mg = g;
      for (int m = 1; m <= cfg.chain_length; ++m) {
        double th = q + w / 2;
        g *= expansion_at(p, th, at(th));
        q -= 4 * w;
        if (m < cfg.chain_length) g = std::min(g, cfg.v_fraction * window_dist(q));
        mg = std::min(mg, g);
      }
      land_gap = std::min(land_gap, g);
      min_gap = std::min(min_gap, mg);
    }
    plan.predicted_land_gap = 2 * land_gap;
    plan.predicted_min_gap = 2 * min_gap;
    double hl = cfg.land_factor * land_gap;
    std::vector<double> nh = cap;
    for (long k : land) nh[static_cast<size_t>(k)] = std::min(cap[static_cast<size_t>(k)], hl);
    long kmin = *land.begin(), kmax = *land.rbegin();
    for (long k = kmax; k - 4 >= 0; --k) {
      if (k - 4 > kmax) continue;
      double v = cfg.step_factor * E[static_cast<size_t>(k)] * nh[static_cast<size_t>(k)];
      if (k > kmax && !land.count(k)) continue;
      nh[static_cast<size_t>(k - 4)] = std::min(nh[static_cast<size_t>(k - 4)], v);
    }
    for (long k = kmin + 4; k < n; ++k) {
      if (land.count(k)) continue;
      double need = nh[static_cast<size_t>(k - 4)] / (cfg.step_factor * E[static_cast<size_t>(k)]);
      nh[static_cast<size_t>(k)] = std::min(cap[static_cast<size_t>(k)], 16 * need);
    }
    h = nh;
  }
  plan.half_heights = h;
  for (long k : land) plan.landing.push_back(k);
  return plan;
}

int ProofCertificate::single_ok() const {
  int c = 0;
  for (const auto& r : coverings) c += (r.kind == "single" && r.ok);
  return c;
}
int ProofCertificate::chain_ok() const {
  int c = 0;
  for (const auto& r : coverings) c += (r.kind == "chain" && r.ok);
  return c;
}
int ProofCertificate::cone_ok() const {
  int c = 0;
  for (const auto& r : cones) c += r.ok;
  return c;
}

namespace {

Poly offset_poly(const Poly& c, double off) {
  Poly p = c;
  Interval o(off);
  p.c[0] = off >= 0 ? (c.c[0] + o).upper() : (c.c[0] + o).lower();
  return p;
}

Interval range_over(const Poly& d, int pieces) {
  Interval r;
  for (int j = 0; j < pieces; ++j) {
    Interval g = d.range(upiece(d.r, j, pieces));
    r = j ? Interval::hull(r, g) : g;
  }
  return r;
}

bool certainly_below(const Poly& a, const Poly& b, int pieces) {
  Poly d = b - a;
  for (int j = 0; j < pieces; ++j)
    if (!d.range(upiece(a.r, j, pieces)).strictly_positive()) return false;
  return true;
}

std::vector<long> overlapping(const StripGeometry& geo, long idx, long lo_k, long hi_k) {
  std::vector<long> out;
  for (long k = lo_k; k <= hi_k; ++k) {
    Interval d = geo.offset(idx, k);
    // windows [0, w] and [d, d + w] meet unless certainly apart
    if (mpfr_greaterequal_p(d.lo(), geo.w.hi()) || mpfr_lessequal_p(d.hi(), Interval(-(geo.w)).lo())) continue;
    out.push_back(k);
  }
  return out;
}

}  // namespace

ProofCertificate run_full_proof(const DrivenParams& p, const ProofConfig& cfg, ProofArtifacts* art) {
  auto t_start = std::chrono::steady_clock::now();
  ProofCertificate cert;
  cert.params = p;
  cert.config = cfg;
  p.validate();
  if (cfg.precision < 24) throw Error(Code::PrecisionExhausted, "precision below 24 bits");
  if (cfg.degree < 1 || cfg.degree >= kMaxJetOrder) throw Error(Code::InvalidArgument, "degree out of range");
  if (cfg.subdivisions < 1 || cfg.strips <= cfg.reentry || cfg.reentry < 1 || cfg.chain_length < 1)
    throw Error(Code::InvalidArgument, "bad strip configuration");
  PrecisionScope ps(cfg.precision);
  AnalyticPrecision ap;

  StripGeometry geo = logistic_geometry(p, cfg.theta_left);
  StripMap map = logistic_strip_map(p, geo);
  cert.alpha_enclosure = p.alpha_i().str();
  CurveGuess guess = [p](const Real& t) { return curve_pullback(p, t); };

  const int n = cfg.strips;
  std::string stage = "plan";
  long cur_strip = -1;
  ImageOptions io;
  io.degree = cfg.degree;
  io.subdivisions = cfg.subdivisions;
  io.remainder_pieces = cfg.remainder_pieces;
  io.centered = cfg.centered_edges;
  std::vector<CurveStrip> N;
  std::vector<std::vector<CurveStrip>> chains;
  StripPlan plan;
  bool first_gap = true;
  try {
    plan = plan_strips(p, cfg, guess);
    stage = "build";
    N = build_initial_strips(guess, geo, map, 0, n, plan.half_heights, cfg.degree);

    // long chains from the re-entry strips
    stage = "chain";
    for (int i = 0; i < cfg.reentry; ++i) {
      cur_strip = i + 1;
      CoveringRecord rec;
      rec.kind = "chain";
      rec.source = i + 1;
      std::vector<CurveStrip> ch{N[static_cast<size_t>(i)]};
      bool fg = true;
      for (int m = 1; m <= cfg.chain_length; ++m) {
        io.step = m;
        CurveStrip M = image_strip(ch.back(), geo, map, io);
        if (m < cfg.chain_length) {
          // keep M_m inside V: trim to the guess +- v_fraction * (distance to the domain edge)
          double q = geo.base(M.idx).mid_d();
          double wd = geo.w.mid_d(), dist = 1e300;
          for (int j = 0; j <= 4; ++j) {
            double th = q + wd * j / 4;
            dist = std::min(dist, domain_gap(p, th, static_cast<double>(guess(Real(th)))));
          }
          double rho = cfg.v_fraction * dist;
          Poly fit = fit_guess(guess, geo, M.idx, 2);
          Interval du = range_over(M.up - fit, cfg.subdivisions), dl = range_over(M.lo - fit, cfg.subdivisions);
          bool trim = false;
          if (!certainly_below(M.up, offset_poly(fit, rho), cfg.subdivisions)) {
            double uL = du.lo_d(), lH = dl.hi_d();
            double ru = std::min(rho, uL - 1e-6 * std::fabs(uL - lH));
            Poly e = offset_poly(fit, ru);
            if (!certainly_below(e, M.up, cfg.subdivisions)) throw Error(Code::LeftAmbientBox, "cannot trim chain strip into V", m);
            M.up = e;
            trim = true;
          }
          if (!certainly_below(offset_poly(fit, -rho), M.lo, cfg.subdivisions)) {
            double uL = du.lo_d(), lH = dl.hi_d();
            double rl = std::max(-rho, lH + 1e-6 * std::fabs(uL - lH));
            Poly e = offset_poly(fit, rl);
            if (!certainly_below(M.lo, e, cfg.subdivisions)) throw Error(Code::LeftAmbientBox, "cannot trim chain strip into V", m);
            M.lo = e;
            trim = true;
          }
          rec.trimmed += trim;
        }
        Interval g = M.gap_enclosure(cfg.subdivisions);
        if (fg || mpfr_less_p(g.hi(), rec.min_gap.hi())) {
          rec.min_gap = g;
          rec.min_gap_step = m;
          fg = false;
        }
        ch.push_back(std::move(M));
      }
      const CurveStrip& last = ch.back();
      std::vector<long> tk = overlapping(geo, last.idx, cfg.reentry, n - 1);
      std::vector<CurveStrip> targets;
      for (long k : tk) {
        targets.push_back(N[static_cast<size_t>(k)]);
        rec.targets.push_back(k + 1);
      }
      CoveringResult cr = check_strip_covering(last, targets, geo, cfg.subdivisions);
      rec.ok = cr.ok;
      rec.failing_piece = cr.failing_piece;
      rec.margin = targets.empty() ? Interval(0L) : min(cr.margin_up, cr.margin_lo);
      if (first_gap || mpfr_less_p(rec.min_gap.hi(), cert.min_gap.hi())) {
        cert.min_gap = rec.min_gap;
        cert.min_gap_chain = i + 1;
        cert.min_gap_step = rec.min_gap_step;
        first_gap = false;
      }
      cert.coverings.push_back(rec);
      if (!cr.ok)
        throw Error(Code::CoveringFailed, "chain landing covering fails (" + cr.reason + ") on piece " +
                                              std::to_string(cr.failing_piece),
                    cfg.chain_length);
      chains.push_back(std::move(ch));
    }

    // single-step coverings N_k => N_{k-4}
    stage = "single";
    for (int k = cfg.reentry + 1; k <= n; ++k) {
      cur_strip = k;
      io.step = 1;
      CurveStrip M = image_strip(N[static_cast<size_t>(k - 1)], geo, map, io);
      CoveringResult cr = check_strip_covering(M, {N[static_cast<size_t>(k - 1 - cfg.reentry)]}, geo, cfg.subdivisions);
      CoveringRecord rec;
      rec.kind = "single";
      rec.source = k;
      rec.targets = {k - cfg.reentry};
      rec.ok = cr.ok;
      rec.failing_piece = cr.failing_piece;
      rec.margin = min(cr.margin_up, cr.margin_lo);
      cert.coverings.push_back(rec);
      if (!cr.ok)
        throw Error(Code::CoveringFailed, "covering N_" + std::to_string(k) + " => N_" + std::to_string(k - cfg.reentry) +
                                              " fails (" + cr.reason + ") on piece " + std::to_string(cr.failing_piece),
                    1);
    }

    // cone conditions
    stage = "cones";
    cur_strip = -1;
    ConeStepOptions co;
    co.beta = pow(Interval(2L), static_cast<long>(cfg.beta_log2));
    co.cone.eps = pow(Interval(2L), static_cast<long>(cfg.eps_log2));
    co.cone.relative = true;
    Gamma g0 = Gamma::two(Interval(1L), Interval(-1L));
    std::vector<ConeRegion> regions;
    for (int k = 0; k < n; ++k)
      regions.push_back({strip_boxes(N[static_cast<size_t>(k)], geo, cfg.subdivisions),
                         Interval(plan.half_heights[static_cast<size_t>(k)]), k + 1});
    for (int k = cfg.reentry; k < n; ++k) {
      cur_strip = k + 1;
      ConeRecord rec;
      rec.kind = "single";
      rec.source = k + 1;
      ConeCoverResult cc = verify_cones_on_cover(map, regions, {{k, k - cfg.reentry}}, g0, co);
      rec.ok = cc.ok;
      rec.steps = 1;
      rec.margin_a = cc.worst_margin_a;
      rec.margin_c = cc.worst_margin_c;
      cert.cones.push_back(rec);
    }
    for (int i = 0; i < cfg.reentry; ++i) {
      cur_strip = i + 1;
      const auto& ch = chains[static_cast<size_t>(i)];
      auto half = [&](const CurveStrip& s) {
        if (s.idx >= 0 && s.idx < n && &s == &ch.front()) return Interval(plan.half_heights[static_cast<size_t>(s.idx)]);
        Interval g = (s.up - s.lo).eval(Interval(0L));
        return Interval(g.mid_d() / 2);
      };
      std::vector<ConeLeg> base;
      for (size_t m = 0; m + 2 < ch.size(); ++m)
        base.push_back({strip_boxes(ch[m], geo, cfg.subdivisions), half(ch[m]), half(ch[m + 1]), static_cast<long>(m),
                        static_cast<long>(m + 1)});
      ConeRecord rec;
      rec.kind = "chain";
      rec.source = i + 1;
      rec.ok = true;
      bool firstm = true;
      const CurveStrip& pen = ch[ch.size() - 2];
      for (long k : overlapping(geo, ch.back().idx, cfg.reentry, n - 1)) {
        std::vector<ConeLeg> legs = base;
        legs.push_back({strip_boxes(pen, geo, cfg.subdivisions), half(pen),
                        regions[static_cast<size_t>(k)].h, static_cast<long>(ch.size() - 2), k + 1});
        for (long j = k; j - cfg.reentry >= 0; j -= cfg.reentry)
          legs.push_back({regions[static_cast<size_t>(j)].boxes, regions[static_cast<size_t>(j)].h,
                          regions[static_cast<size_t>(j - cfg.reentry)].h, j + 1, j + 1 - cfg.reentry});
        ConeItineraryResult r = verify_cone_itinerary(map, legs, g0, co);
        if (!r.ok) {
          rec.ok = false;
          cert.cones.push_back(rec);
          throw Error(Code::ConeSignLoss, "chain cone from N_" + std::to_string(i + 1) + ": " + r.failure, r.steps);
        }
        rec.steps = std::max(rec.steps, r.steps);
        if (firstm || mpfr_less_p(r.margin_a.lo(), rec.margin_a.lo())) rec.margin_a = r.margin_a;
        if (firstm || mpfr_less_p(r.margin_c.lo(), rec.margin_c.lo())) rec.margin_c = r.margin_c;
        firstm = false;
      }
      cert.cones.push_back(rec);
    }

    stage = "oracle";
    for (int i = 0; i < cfg.reentry; ++i) {
      OracleRecord o = edge_orbit_oracle(p, geo, chains[static_cast<size_t>(i)], cfg.oracle_points, cfg.oracle_bits);
      o.chain = i + 1;
      cert.oracle.push_back(o);
    }
    cert.verdict = cert.single_ok() == n - cfg.reentry && cert.chain_ok() == cfg.reentry &&
                   cert.cone_ok() == n;
  } catch (const Error& e) {
    cert.failure.failed = true;
    cert.failure.stage = stage;
    cert.failure.code = e.code();
    cert.failure.step = e.step();
    cert.failure.strip = cur_strip;
    cert.failure.message = e.what();
    cert.verdict = false;
  }
  if (art) {
    art->strips = N;
    art->chains = chains;
  }
  cert.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return cert;
}

OracleRecord edge_orbit_oracle(const DrivenParams& p, const StripGeometry& geo, const std::vector<CurveStrip>& chain,
                               int points, int bits) {
  OracleRecord o;
  o.points = points;
  if (chain.empty() || points < 1) return o;
  unsigned saved = Real::default_precision();
  Real::default_precision(static_cast<unsigned>(bits * 0.30103) + 5);
  Real al = p.alpha_r();
  Real a0 = p.a0_r(), ep = p.eps_r();
  Real tpi = 2 * boost::math::constants::pi<Real>();
  auto a_of_r = [&](const Real& t) { return a0 + ep * sin(tpi * t); };
  const CurveStrip& N = chain.front();
  Interval q = geo.base(N.idx);
  for (int j = 0; j < points; ++j) {
    Interval s = points == 1 ? Interval(0L) : geo.w * Interval(j) / Interval(points - 1);
    s = s.mid();
    Real t = real_of(q + s);
    Interval u = s - geo.w / Interval(2L);
    Real x = real_of(N.up.eval(u));
    for (size_t m = 1; m < chain.size(); ++m) {
      Real y = sqrt((1 - x) / a_of_r(t - al));
      x = -sqrt((1 - y) / a_of_r(t - 2 * al));
      t -= 2 * al;
      const CurveStrip& M = chain[m];
      ++o.checks;
      // image of the upper edge: below p^d after odd steps, above p^u after even ones
      if (m % 2) {
        Real e = real_of(M.lo.eval(u).upper());
        if (x > e) {
          ++o.violations;
          o.max_excess = std::max(o.max_excess, static_cast<double>(x - e));
        }
      } else {
        Real e = real_of(M.up.eval(u).lower());
        if (x < e) {
          ++o.violations;
          o.max_excess = std::max(o.max_excess, static_cast<double>(e - x));
        }
      }
    }
  }
  Real::default_precision(saved);
  return o;
}

std::string certificate_text(const ProofCertificate& c, bool with_timing) {
  std::ostringstream o;
  const ProofConfig& g = c.config;
  o << "nhim-certificate 1\n";
  o << "param a0 " << c.params.a0 << "\n";
  o << "param eps " << c.params.eps << "\n";
  o << "param N " << c.params.N << "\n";
  o << "param alpha " << c.alpha_enclosure << "\n";
  o << "config precision " << g.precision << "\n";
  o << "config degree " << g.degree << "\n";
  o << "config subdivisions " << g.subdivisions << "\n";
  o << "config strips " << g.strips << "\n";
  o << "config reentry " << g.reentry << "\n";
  o << "config chain_length " << g.chain_length << "\n";
  o << "config theta_left " << g.theta_left << "\n";
  o << std::setprecision(17);
  o << "config h_max " << g.h_max << "\n";
  o << "config domain_fraction " << g.domain_fraction << "\n";
  o << "config v_fraction " << g.v_fraction << "\n";
  o << "config land_factor " << g.land_factor << "\n";
  o << "config step_factor " << g.step_factor << "\n";
  o << "config beta_log2 " << g.beta_log2 << "\n";
  o << "config eps_log2 " << g.eps_log2 << "\n";
  o << "config oracle_points " << g.oracle_points << "\n";
  o << "config oracle_bits " << g.oracle_bits << "\n";
  for (const auto& r : c.coverings) {
    o << "covering " << r.kind << " " << r.source << " ->";
    for (long t : r.targets) o << " " << t;
    o << (r.ok ? " ok" : " FAIL") << " margin " << r.margin.str(6);
    if (r.kind == "chain")
      o << " min_gap " << r.min_gap.str(6) << " at " << r.min_gap_step << " trimmed " << r.trimmed;
    if (!r.ok) o << " piece " << r.failing_piece;
    o << "\n";
  }
  for (const auto& r : c.cones)
    o << "cone " << r.kind << " " << r.source << (r.ok ? " ok" : " FAIL") << " steps " << r.steps << " margin_a "
      << r.margin_a.str(6) << " margin_c " << r.margin_c.str(6) << "\n";
  for (const auto& r : c.oracle)
    o << "oracle chain " << r.chain << " points " << r.points << " checks " << r.checks << " violations "
      << r.violations << "\n";
  if (!c.coverings.empty()) o << "min_gap " << c.min_gap.str(6) << " chain " << c.min_gap_chain << " step " << c.min_gap_step << "\n";
  if (c.failure.failed)
    o << "failure stage " << c.failure.stage << " code " << code_name(c.failure.code) << " step " << c.failure.step
      << " strip " << c.failure.strip << " message " << c.failure.message << "\n";
  o << "summary single " << c.single_ok() << " chain " << c.chain_ok() << " cone " << c.cone_ok() << "\n";
  o << "verdict " << (c.verdict ? "true" : "false") << "\n";
  if (with_timing) o << "seconds " << std::fixed << std::setprecision(2) << c.seconds << "\n";
  return o.str();
}

}  // namespace nhim
