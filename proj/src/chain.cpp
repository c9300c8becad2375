#include "chain.hpp"

#include <sstream>

namespace nhim {

namespace {

struct Blocks {
  Interval x, y, t;  // euclidean norms, upper bounds
};

Blocks block_norms(const std::vector<Interval>& q, const Signature& sig) {
  Interval nx(0L), ny(0L), nt(0L);
  int k = 0;
  for (int i = 0; i < sig.u; ++i) nx += sqr(abs(q[static_cast<size_t>(k++)]).upper());
  for (int i = 0; i < sig.s; ++i) ny += sqr(abs(q[static_cast<size_t>(k++)]).upper());
  for (int i = 0; i < sig.c; ++i) nt += sqr(abs(q[static_cast<size_t>(k++)]).upper());
  return {sqrt(nx).upper(), sqrt(ny).upper(), sqrt(nt).upper()};
}

Interval radius_margin(const std::vector<Interval>& R, const std::vector<Interval>& q, const Signature& sig,
                       const Interval& ambient) {
  Blocks n = block_norms(q, sig);
  Interval worst = (R[0] + n.x).upper();
  if (sig.s > 0) worst = max(worst, (R[1] + n.y).upper());
  worst = max(worst, (R.back() + n.t).upper());
  return ambient - worst;
}

}  // namespace

std::string ChainCertificate::str() const {
  std::ostringstream o;
  o << "chain steps=" << steps.size() << " verdict=" << (verdict ? "true" : "false") << "\n";
  for (const auto& s : steps) {
    o << "  step " << s.step << " " << s.from << "->" << s.to << " R=(";
    for (size_t i = 0; i < s.R.size(); ++i) o << (i ? ", " : "") << s.R[i].str(17);
    o << ") gamma=" << s.gamma.str(sig) << " margin=" << s.margin.str(12) << (s.ok ? "" : " FAIL") << "\n";
  }
  o << "  terminal_u=" << terminal_margin_u.str(12);
  if (sig.s > 0) o << " terminal_s=" << terminal_margin_s.str(12);
  o << " cone=" << (cone_ok ? "ok" : "fail");
  if (!failure.empty()) o << " failure=" << failure;
  o << "\n";
  return o.str();
}

ChainCertificate verify_forward_bounds(const LocalMapFamily& maps, const ItineraryPlan& plan, const Interval& r,
                                       const Interval& rho, const Gamma& g0, const Gamma& g1,
                                       const ChainOptions& opt) {
  const Signature& sig = maps.sig;
  if (plan.regions.size() < 2) throw Error(Code::InvalidArgument, "itinerary needs at least one step");
  ChainCertificate cert;
  cert.sig = sig;

  std::vector<Interval> q = plan.start_center;
  if (q.empty()) q.assign(static_cast<size_t>(sig.dim()), Interval(0L));
  if (static_cast<int>(q.size()) != sig.dim()) throw Error(Code::DimensionMismatch, "start centre dimension");
  std::vector<Interval> R{r};
  if (sig.s > 0) R.push_back(r);
  R.push_back(rho);
  Gamma g = g0;

  ConeOptions co;
  co.eps = opt.eps;
  co.relative = opt.relative_eps;

  bool all_ok = true;
  StepRecord s0;
  s0.from = s0.to = plan.regions[0];
  s0.q = q;
  s0.R = R;
  s0.gamma = g;
  s0.margin = radius_margin(R, q, sig, opt.ambient);
  s0.ok = s0.margin.strictly_positive();
  all_ok = all_ok && s0.ok;
  cert.steps.push_back(s0);

  for (size_t m = 1; m < plan.regions.size(); ++m) {
    int from = plan.regions[m - 1], to = plan.regions[m];
    try {
      q = maps.map(from, to, q);
      if (static_cast<int>(q.size()) != sig.dim()) throw Error(Code::DimensionMismatch, "map image dimension");
      BoundMatrix b = maps.bounds(from, to);
      R = radii_step(R, b, opt.eps);
      for (const auto& ri : R)
        if (!ri.strictly_positive()) throw Error(Code::RadiusCollapse, "radius collapsed: " + ri.str(12));
      g = propagate_cone(g, b, co);
    } catch (const Error& e) {
      throw e.at_step(static_cast<long>(m));
    }
    StepRecord rec;
    rec.step = static_cast<int>(m);
    rec.from = from;
    rec.to = to;
    rec.q = q;
    rec.R = R;
    rec.gamma = g;
    rec.margin = radius_margin(R, q, sig, opt.ambient);
    rec.ok = rec.margin.strictly_positive();
    if (!rec.ok && cert.failure.empty()) cert.failure = "radius bound at step " + std::to_string(m);
    all_ok = all_ok && rec.ok;
    cert.steps.push_back(rec);
  }

  Blocks n = block_norms(q, sig);
  cert.terminal_margin_u = R[0] - (r + n.x);
  bool term = cert.terminal_margin_u.strictly_positive();
  if (sig.s > 0) {
    cert.terminal_margin_s = r - (R[1] + n.y);
    term = term && cert.terminal_margin_s.strictly_positive();
  }
  if (!term && cert.failure.empty()) cert.failure = "terminal radius bound";

  if (opt.rule == TerminalRule::Ratio) {
    cert.cone_ok = check_final_cone(g, g1, sig);
  } else {
    cert.cone_ok = certainly_gt(g.a, g1.a) && certainly_gt(g.c, g1.c) && (sig.s == 0 || certainly_gt(g.b, g1.b));
  }
  if (!cert.cone_ok && cert.failure.empty()) cert.failure = "terminal cone";
  cert.verdict = all_ok && term && cert.cone_ok;
  return cert;
}

namespace {

std::vector<Interval> swap_xy(const std::vector<Interval>& q, const Signature& sig) {
  // (x[u], y[s], t[c]) -> (y, x, t)
  std::vector<Interval> out;
  out.insert(out.end(), q.begin() + sig.u, q.begin() + sig.u + sig.s);
  out.insert(out.end(), q.begin(), q.begin() + sig.u);
  out.insert(out.end(), q.begin() + sig.u + sig.s, q.end());
  return out;
}

BoundMatrix swap_bounds(const BoundMatrix& b) {
  BoundMatrix o = b;
  std::swap(o.sig.u, o.sig.s);
  int p[3] = {1, 0, 2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      o.upper(i, j) = b.upper(p[i], p[j]);
      o.lower(i, j) = b.lower(p[i], p[j]);
    }
  return o;
}

Gamma swap_gamma(const Gamma& g) { return Gamma(g.b, g.a, g.c); }

}  // namespace

ChainCertificate verify_backward_bounds(const LocalMapFamily& inverse_maps, const ItineraryPlan& plan,
                                        const Interval& r, const Interval& rho, const Gamma& g0_back,
                                        const Gamma& g1_back, const ChainOptions& opt) {
  const Signature orig = inverse_maps.sig;
  if (orig.s == 0) throw Error(Code::UnsupportedSignature, "backward bounds need a stable block (s > 0)");
  Signature sw = orig;
  std::swap(sw.u, sw.s);

  LocalMapFamily fam;
  fam.sig = sw;
  fam.map = [&](int from, int to, const std::vector<Interval>& q) {
    return swap_xy(inverse_maps.map(from, to, swap_xy(q, sw)), orig);
  };
  fam.bounds = [&](int from, int to) { return swap_bounds(inverse_maps.bounds(from, to)); };

  ItineraryPlan p = plan;
  if (!p.start_center.empty()) p.start_center = swap_xy(p.start_center, orig);

  ChainCertificate c = verify_forward_bounds(fam, p, r, rho, swap_gamma(g0_back), swap_gamma(g1_back), opt);
  c.sig = orig;
  for (auto& s : c.steps) {
    s.q = swap_xy(s.q, sw);
    std::swap(s.R[0], s.R[1]);
    s.gamma = swap_gamma(s.gamma);
  }
  std::swap(c.terminal_margin_u, c.terminal_margin_s);
  return c;
}

bool check_main_inequality(const Gamma& g0_f, const Gamma& g0_b) {
  return certainly_gt(abs(g0_f.a), abs(g0_b.a)) && certainly_lt(abs(g0_f.b), abs(g0_b.b));
}

}  // namespace nhim
