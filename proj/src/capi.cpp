#include "nhim/nhim.h"

#include <mpfr.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "strips.hpp"

using namespace nhim;

namespace {

thread_local std::string g_last_error;

struct KeyInfo {
  const char* key;
  const char* def;
  const char* kind;  // int, real, bool, decimal, text
  const char* help;
};

const KeyInfo kKeys[] = {
    {"a0", "1.31", "decimal", "mean of a(theta)"},
    {"eps", "0.3", "decimal", "amplitude of a(theta)"},
    {"N", "200", "int", "alpha = g / N"},
    {"precision", "128", "int", "working precision in bits (prove, simulate, lyapunov)"},
    {"degree", "9", "int", "edge polynomial degree"},
    {"subdivisions", "10", "int", "pieces per strip for coverings and cones"},
    {"remainder_pieces", "8", "int", "pieces for the Taylor remainder"},
    {"centered_edges", "true", "bool", "expand edge images at the window centre"},
    {"strips", "168", "int", "number of strips"},
    {"reentry", "4", "int", "strips re-entering through long chains"},
    {"chain_length", "128", "int", "steps per long chain"},
    {"theta_left", "0.615", "decimal", "left end of the first strip"},
    {"h_max", "1e-3", "real", "strip half height cap"},
    {"domain_fraction", "0.5", "real", "half height vs distance to the domain edge"},
    {"v_fraction", "0.5", "real", "chain strip trimming fraction"},
    {"land_factor", "0.1", "real", "landing strip heights vs predicted chain gap"},
    {"step_factor", "0.5", "real", "height profile step factor"},
    {"beta_log2", "200", "int", "log2 of the theta rescaling in cones"},
    {"eps_log2", "-40", "int", "log2 of the relative cone inflation"},
    {"oracle_points", "10", "int", "edge points per chain for the orbit oracle"},
    {"oracle_bits", "256", "int", "oracle precision"},
    {"theta0", "0", "real", "orbit seed theta"},
    {"x0", "0.5", "real", "orbit seed x"},
    {"transient", "100000", "int", "discarded iterates"},
    {"iters", "100000", "int", "recorded iterates"},
    {"stride", "100", "int", "lyapunov: keep every stride-th partial sum"},
    {"d", "16", "real", "predict: digits lost before departure"},
    {"p", "4", "real", "predict: digits printed"},
    {"grid", "1000", "int", "theta grid size (predict, curve)"},
    {"strip_grid", "21", "int", "theta points per strip in the strip csv"},
    {"out_dir", "", "text", "output directory (default from NHIM_OUT_DIR, else .)"},
};

const KeyInfo* find_key(const std::string& k) {
  for (const auto& ki : kKeys)
    if (k == ki.key) return &ki;
  return nullptr;
}

nhim_status fail(nhim_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

nhim_status from_error(const Error& e) {
  std::string m = e.what();
  if (e.step() >= 0) m += " (step " + std::to_string(e.step()) + ")";
  return fail(static_cast<nhim_status>(static_cast<int>(e.code())), m);
}

template <class F>
nhim_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const Error& e) {
    return from_error(e);
  } catch (const std::bad_alloc&) {
    return fail(NHIM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NHIM_INTERNAL, e.what());
  }
}

long as_long(const std::string& k, const std::string& v) {
  size_t pos = 0;
  long r = 0;
  try {
    r = std::stol(v, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw Error(Code::InvalidArgument, k + ": not an integer '" + v + "'");
  return r;
}

double as_double(const std::string& k, const std::string& v) {
  size_t pos = 0;
  double r = 0;
  try {
    r = std::stod(v, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || !std::isfinite(r)) throw Error(Code::InvalidArgument, k + ": not a number '" + v + "'");
  return r;
}

bool as_bool(const std::string& k, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(Code::InvalidArgument, k + ": not a boolean '" + v + "'");
}

void check_value(const KeyInfo& ki, const std::string& v) {
  std::string k = ki.key;
  std::string kind = ki.kind;
  if (kind == "int") as_long(k, v);
  if (kind == "real" || kind == "decimal") as_double(k, v);
  if (kind == "decimal") {
    // kept as text for exact parsing later; reject anything mpfr would not read
    mpfr_t t;
    mpfr_init2(t, 64);
    int bad = mpfr_set_str(t, v.c_str(), 10, MPFR_RNDN);
    mpfr_clear(t);
    if (bad) throw Error(Code::InvalidArgument, k + ": not a decimal '" + v + "'");
  }
  if (kind == "bool") as_bool(k, v);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

struct nhim_config {
  std::map<std::string, std::string> v;
  nhim_config() {
    for (const auto& ki : kKeys) v[ki.key] = ki.def;
  }
  long i(const char* k) const { return as_long(k, v.at(k)); }
  double d(const char* k) const { return as_double(k, v.at(k)); }
  bool b(const char* k) const { return as_bool(k, v.at(k)); }

  DrivenParams params() const {
    DrivenParams p;
    p.a0 = v.at("a0");
    p.eps = v.at("eps");
    p.N = i("N");
    p.validate();
    return p;
  }

  ProofConfig proof() const {
    ProofConfig c;
    c.precision = static_cast<int>(i("precision"));
    c.degree = static_cast<int>(i("degree"));
    c.subdivisions = static_cast<int>(i("subdivisions"));
    c.remainder_pieces = static_cast<int>(i("remainder_pieces"));
    c.centered_edges = b("centered_edges");
    c.strips = static_cast<int>(i("strips"));
    c.reentry = static_cast<int>(i("reentry"));
    c.chain_length = static_cast<int>(i("chain_length"));
    c.theta_left = v.at("theta_left");
    c.h_max = d("h_max");
    c.domain_fraction = d("domain_fraction");
    c.v_fraction = d("v_fraction");
    c.land_factor = d("land_factor");
    c.step_factor = d("step_factor");
    c.beta_log2 = static_cast<int>(i("beta_log2"));
    c.eps_log2 = static_cast<int>(i("eps_log2"));
    c.oracle_points = static_cast<int>(i("oracle_points"));
    c.oracle_bits = static_cast<int>(i("oracle_bits"));
    auto need = [](bool ok, const char* what) {
      if (!ok) throw Error(Code::InvalidArgument, what);
    };
    need(c.precision >= 24 && c.precision <= 4096, "precision must be in [24, 4096]");
    need(c.degree >= 1 && c.degree <= 11, "degree must be in [1, 11]");
    need(c.subdivisions >= 1 && c.subdivisions <= 1000, "subdivisions must be in [1, 1000]");
    need(c.remainder_pieces >= 1 && c.remainder_pieces <= 1000, "remainder_pieces must be in [1, 1000]");
    need(c.reentry >= 1 && c.strips > c.reentry, "need strips > reentry >= 1");
    need(c.chain_length >= 2, "chain_length must be >= 2");
    need(c.h_max > 0 && c.domain_fraction > 0 && c.domain_fraction < 1 && c.v_fraction > 0 && c.v_fraction < 1,
         "h_max > 0 and fractions in (0, 1)");
    need(c.land_factor > 0 && c.step_factor > 0, "land_factor and step_factor must be positive");
    need(c.oracle_points >= 0 && c.oracle_bits >= 64, "oracle_points >= 0, oracle_bits >= 64");
    return c;
  }

  void analytics_check() const {
    params();
    need_pos("precision", 2);
    need_pos("transient", 0);
    need_pos("iters", 1);
    need_pos("stride", 0);
    need_pos("grid", 2);
  }
  void need_pos(const char* k, long lo) const {
    if (i(k) < lo) throw Error(Code::InvalidArgument, std::string(k) + " must be >= " + std::to_string(lo));
  }
};

struct nhim_proof {
  ProofCertificate cert;
  ProofArtifacts art;
  StripGeometry geo;
};

extern "C" {

const char* nhim_last_error(void) { return g_last_error.c_str(); }

const char* nhim_status_name(int s) {
  switch (s) {
    case NHIM_IO_ERROR: return "IoError";
    case NHIM_BUFFER_TOO_SMALL: return "BufferTooSmall";
    case NHIM_INTERNAL: return "Internal";
    default: return code_name(static_cast<Code>(s));
  }
}

const char* nhim_version(void) { return "nhim 1.0.0"; }

nhim_config* nhim_config_new(void) {
  try {
    return new nhim_config();
  } catch (...) {
    return nullptr;
  }
}

void nhim_config_free(nhim_config* c) { delete c; }

nhim_status nhim_config_set(nhim_config* c, const char* key, const char* value) {
  if (!c || !key || !value) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const KeyInfo* ki = find_key(key);
    if (!ki) return fail(NHIM_INVALID_ARGUMENT, std::string("unknown key '") + key + "'");
    std::string v = trim(value);
    check_value(*ki, v);
    c->v[key] = v;
    return NHIM_OK;
  });
}

nhim_status nhim_config_load(nhim_config* c, const char* path) {
  if (!c || !path) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  std::ifstream in(path);
  if (!in) return fail(NHIM_IO_ERROR, std::string("cannot read ") + path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      return fail(NHIM_INVALID_ARGUMENT, std::string(path) + ":" + std::to_string(n) + ": expected key = value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    nhim_status s = nhim_config_set(c, k.c_str(), v.c_str());
    if (s != NHIM_OK) return fail(s, std::string(path) + ":" + std::to_string(n) + ": " + g_last_error);
  }
  return NHIM_OK;
}

nhim_status nhim_config_get(const nhim_config* c, const char* key, char* buf, size_t len) {
  if (!c || !key) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  auto it = c->v.find(key);
  if (it == c->v.end()) return fail(NHIM_INVALID_ARGUMENT, std::string("unknown key '") + key + "'");
  if (!buf || len < it->second.size() + 1) return fail(NHIM_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, it->second.c_str(), it->second.size() + 1);
  return NHIM_OK;
}

const char* const* nhim_config_keys(void) {
  static std::vector<const char*> keys = [] {
    std::vector<const char*> k;
    for (const auto& ki : kKeys) k.push_back(ki.key);
    k.push_back(nullptr);
    return k;
  }();
  return keys.data();
}

const char* nhim_config_help(const char* key) {
  const KeyInfo* ki = key ? find_key(key) : nullptr;
  return ki ? ki->help : nullptr;
}

nhim_status nhim_prove(const nhim_config* c, nhim_proof** out) {
  if (!c || !out) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    DrivenParams p = c->params();
    ProofConfig cfg = c->proof();
    auto* r = new nhim_proof();
    r->cert = run_full_proof(p, cfg, &r->art);
    {
      PrecisionScope ps(cfg.precision);
      r->geo = logistic_geometry(p, cfg.theta_left);
    }
    *out = r;
    if (r->cert.failure.failed) g_last_error = r->cert.failure.message;
    return NHIM_OK;
  });
}

void nhim_proof_free(nhim_proof* p) { delete p; }
int nhim_proof_verdict(const nhim_proof* p) { return p && p->cert.verdict ? 1 : 0; }
double nhim_proof_seconds(const nhim_proof* p) { return p ? p->cert.seconds : 0; }
int nhim_proof_failure_code(const nhim_proof* p) {
  return p && p->cert.failure.failed ? static_cast<int>(p->cert.failure.code) : NHIM_OK;
}
long nhim_proof_failure_step(const nhim_proof* p) { return p && p->cert.failure.failed ? p->cert.failure.step : -1; }

void nhim_proof_counts(const nhim_proof* p, int* single, int* chain, int* cone) {
  if (single) *single = p ? p->cert.single_ok() : 0;
  if (chain) *chain = p ? p->cert.chain_ok() : 0;
  if (cone) *cone = p ? p->cert.cone_ok() : 0;
}

void nhim_proof_min_gap(const nhim_proof* p, double* lo, double* hi) {
  bool have = p && p->cert.min_gap_chain >= 0;
  if (lo) *lo = have ? p->cert.min_gap.lo_d() : NAN;
  if (hi) *hi = have ? p->cert.min_gap.hi_d() : NAN;
}

long nhim_proof_oracle_violations(const nhim_proof* p) {
  if (!p) return -1;
  long v = 0;
  for (const auto& o : p->cert.oracle) v += o.violations;
  return v;
}

nhim_status nhim_proof_certificate(const nhim_proof* p, int with_timing, char* buf, size_t len, size_t* needed) {
  if (!p) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  std::string t = certificate_text(p->cert, with_timing != 0);
  if (needed) *needed = t.size() + 1;
  if (!buf || len < t.size() + 1) return buf ? fail(NHIM_BUFFER_TOO_SMALL, "buffer too small") : NHIM_OK;
  std::memcpy(buf, t.c_str(), t.size() + 1);
  return NHIM_OK;
}

nhim_status nhim_proof_write_strips_csv(const nhim_proof* p, const char* path, int grid) {
  if (!p || !path || grid < 2) return fail(NHIM_INVALID_ARGUMENT, "bad argument");
  return guarded([&] {
    std::ofstream o(path);
    if (!o) return fail(NHIM_IO_ERROR, std::string("cannot write ") + path);
    PrecisionScope ps(p->cert.config.precision);
    o << "strip,theta,p_lo,p_up\n" << std::setprecision(17);
    Interval w = p->geo.w;
    Interval half = w / Interval(2L);
    for (const auto& s : p->art.strips) {
      Interval t0 = p->geo.base(s.idx);
      for (int j = 0; j < grid; ++j) {
        Interval sj = w * Interval(static_cast<long>(j)) / Interval(static_cast<long>(grid - 1));
        Interval u = sj - half;
        double th = (t0 + sj).mid_d();
        th -= std::floor(th);
        o << s.idx + 1 << "," << th << "," << s.lo.eval(u).mid_d() << "," << s.up.eval(u).mid_d() << "\n";
      }
    }
    return NHIM_OK;
  });
}

nhim_status nhim_recheck(const char* certificate, int* verdict, int* agrees, char* report, size_t len) {
  if (!certificate) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::istringstream in(certificate);
    std::string line, first;
    std::getline(in, first);
    if (trim(first) != "nhim-certificate 1") throw Error(Code::InvalidArgument, "not a version 1 certificate");
    PrecisionScope ps(256);
    std::ostringstream rep;
    long strips = -1, reentry = -1;
    bool stored = false, have_verdict = false, failure = false, all = true;
    std::map<std::string, long> summary;
    std::set<long> single_src, chain_src, cone_single, cone_chain;
    long oracle_chains = 0, bad = 0;
    auto positive = [](const std::string& iv) { return certainly_gt(Interval::parse(iv), Interval(0L)); };
    auto grab = [](const std::string& l, const std::string& key) {
      auto a = l.find(key + " [");
      if (a == std::string::npos) throw Error(Code::InvalidArgument, "missing " + key + " in: " + l);
      auto b = l.find(']', a);
      return l.substr(a + key.size() + 1, b - a - key.size());
    };
    int n = 1;
    while (std::getline(in, line)) {
      ++n;
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      bool ok = true, claimed = line.find(" ok") != std::string::npos;
      if (tag == "config") {
        std::string k;
        ls >> k;
        if (k == "strips") ls >> strips;
        if (k == "reentry") ls >> reentry;
        continue;
      } else if (tag == "covering") {
        std::string kind, arrow;
        long src;
        ls >> kind >> src >> arrow;
        std::vector<long> tg;
        long t;
        while (ls >> t) tg.push_back(t);
        ok = !tg.empty() && positive(grab(line, "margin"));
        if (kind == "chain") ok = ok && positive(grab(line, "min_gap"));
        (kind == "chain" ? chain_src : single_src).insert(src);
      } else if (tag == "cone") {
        std::string kind;
        long src;
        ls >> kind >> src;
        ok = claimed && positive(grab(line, "margin_a")) && positive(grab(line, "margin_c"));
        (kind == "chain" ? cone_chain : cone_single).insert(src);
      } else if (tag == "oracle") {
        auto v = line.rfind("violations ");
        ok = v != std::string::npos && std::stol(line.substr(v + 11)) == 0;
        ++oracle_chains;
      } else if (tag == "failure") {
        failure = true;
        ok = false;
      } else if (tag == "summary") {
        std::string k;
        long v;
        while (ls >> k >> v) summary[k] = v;
        continue;
      } else if (tag == "verdict") {
        std::string v;
        ls >> v;
        stored = v == "true";
        have_verdict = true;
        continue;
      } else {
        continue;
      }
      if (!ok) {
        all = false;
        ++bad;
        rep << "line " << n << ": not certified: " << line << "\n";
      }
      if ((tag == "covering" || tag == "cone") && ok != claimed)
        rep << "line " << n << ": stored status disagrees with its numbers\n";
    }
    if (!have_verdict) throw Error(Code::InvalidArgument, "certificate has no verdict line");
    if (strips < 1 || reentry < 1) throw Error(Code::InvalidArgument, "certificate lacks strips/reentry config");
    auto full = [](const std::set<long>& s, long a, long b) {
      if (static_cast<long>(s.size()) != b - a + 1) return false;
      return s.empty() || (*s.begin() == a && *s.rbegin() == b);
    };
    bool complete = full(single_src, reentry + 1, strips) && full(chain_src, 1, reentry) &&
                    full(cone_single, reentry + 1, strips) && full(cone_chain, 1, reentry) && oracle_chains == reentry;
    if (!complete) rep << "records incomplete\n";
    long ns = static_cast<long>(single_src.size()), nc = static_cast<long>(chain_src.size());
    if (summary["single"] > ns || summary["chain"] > nc) rep << "summary counts exceed records\n";
    bool v = all && complete && !failure;
    rep << "records rechecked, " << bad << " not certified; verdict " << (v ? "true" : "false") << ", stored "
        << (stored ? "true" : "false") << "\n";
    if (verdict) *verdict = v ? 1 : 0;
    if (agrees) *agrees = v == stored ? 1 : 0;
    std::string r = rep.str();
    if (report && len > 0) {
      size_t k = std::min(len - 1, r.size());
      std::memcpy(report, r.c_str(), k);
      report[k] = 0;
    }
    return NHIM_OK;
  });
}

nhim_status nhim_averaged_lyapunov(const nhim_config* c, double* out) {
  if (!c || !out) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    DrivenParams p = c->params();
    AnalyticPrecision ap;
    *out = static_cast<double>(averaged_lyapunov(p.a0_r(), p.eps_r()));
    return NHIM_OK;
  });
}

nhim_status nhim_lyapunov(const nhim_config* c, const char* csv_path, double* lambda, double* os, long* os_index) {
  if (!c) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    c->analytics_check();
    DrivenParams p = c->params();
    long stride = csv_path ? c->i("stride") : 0;
    LyapunovRun r = lyapunov_sums(p, c->d("theta0"), c->d("x0"), c->i("transient"), c->i("iters"),
                                  static_cast<int>(c->i("precision")), stride);
    if (csv_path) {
      std::ofstream o(csv_path);
      if (!o) return fail(NHIM_IO_ERROR, std::string("cannot write ") + csv_path);
      o << "j,S_j\n" << std::setprecision(17);
      for (size_t k = 0; k < r.sums.size(); ++k) o << static_cast<long>(k) * r.stride << "," << r.sums[k] << "\n";
    }
    if (lambda) *lambda = r.lambda;
    if (os) *os = r.os;
    if (os_index) *os_index = r.os_index;
    return NHIM_OK;
  });
}

nhim_status nhim_predict(const nhim_config* c, const char* csv_path, double* theta_d, double* theta_l, double* os_pred) {
  if (!c) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    c->analytics_check();
    DrivenParams p = c->params();
    AnalyticPrecision ap;
    OscillationPrediction o = oscillation_prediction(p);
    auto dl = predict_departure_landing(p, c->d("d"), c->d("p"));
    if (csv_path) {
      std::ofstream f(csv_path);
      if (!f) return fail(NHIM_IO_ERROR, std::string("cannot write ") + csv_path);
      f << "theta,h\n" << std::setprecision(17);
      long g = c->i("grid");
      for (long k = 0; k < g; ++k) {
        Real th = Real(k) / g;
        f << static_cast<double>(th) << "," << static_cast<double>(h_of(p.a0_r(), p.eps_r(), th)) << "\n";
      }
    }
    if (theta_d) *theta_d = static_cast<double>(dl.first);
    if (theta_l) *theta_l = static_cast<double>(dl.second);
    if (os_pred) *os_pred = static_cast<double>(o.value);
    return NHIM_OK;
  });
}

nhim_status nhim_simulate(const nhim_config* c, const char* csv_path, long* points) {
  if (!c) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    c->analytics_check();
    DrivenParams p = c->params();
    auto orbit = simulate_attractor(p, static_cast<int>(c->i("precision")), c->i("transient"), c->i("iters"),
                                    c->d("theta0"), c->d("x0"));
    if (csv_path) {
      std::ofstream f(csv_path);
      if (!f) return fail(NHIM_IO_ERROR, std::string("cannot write ") + csv_path);
      f << "theta,x\n" << std::setprecision(17);
      for (const auto& q : orbit) f << q.theta << "," << q.x << "\n";
    }
    if (points) *points = static_cast<long>(orbit.size());
    return NHIM_OK;
  });
}

nhim_status nhim_curve(const nhim_config* c, const char* csv_path, double* max_residual0, double* max_residual1) {
  if (!c) return fail(NHIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    c->analytics_check();
    DrivenParams p = c->params();
    AnalyticPrecision ap;
    std::ofstream f;
    if (csv_path) {
      f.open(csv_path);
      if (!f) return fail(NHIM_IO_ERROR, std::string("cannot write ") + csv_path);
      f << "theta,G0,G1,curve1,residual0,residual1\n" << std::setprecision(17);
    }
    auto c0 = [&](const Real& t) { return curve_approx(p, t, 0); };
    auto c1 = [&](const Real& t) { return curve_approx(p, t, 1); };
    double m0 = 0, m1 = 0;
    long g = c->i("grid");
    for (long k = 0; k < g; ++k) {
      Real th = Real(k) / g;
      double r0 = static_cast<double>(invariance_residual(p, c0, th));
      double r1 = static_cast<double>(invariance_residual(p, c1, th));
      m0 = std::max(m0, std::fabs(r0));
      m1 = std::max(m1, std::fabs(r1));
      if (csv_path)
        f << static_cast<double>(th) << "," << static_cast<double>(c0(th)) << "," << static_cast<double>(g1_of(p, th))
          << "," << static_cast<double>(c1(th)) << "," << r0 << "," << r1 << "\n";
    }
    if (max_residual0) *max_residual0 = m0;
    if (max_residual1) *max_residual1 = m1;
    return NHIM_OK;
  });
}

}  // extern "C"
