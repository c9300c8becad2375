#include <sys/wait.h>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "logistic.hpp"
#include "nhim/nhim.h"

using namespace nhim;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Cfg {
  nhim_config* c = nhim_config_new();
  ~Cfg() { nhim_config_free(c); }
};

int run(const std::string& cmd) {
  int r = std::system(cmd.c_str());
  return WIFEXITED(r) ? WEXITSTATUS(r) : -1;
}

}  // namespace

int main() {
  DrivenParams p;

  {
    auto t0 = std::chrono::steady_clock::now();
    double v;
    {
      AnalyticPrecision ap;
      v = static_cast<double>(averaged_lyapunov(p.a0_r(), p.eps_r()));
    }
    double dt = seconds_since(t0);
    report("closed-form-lyapunov", std::fabs(v + 0.12666931) <= 1e-7 && dt < 1,
           fmt("value %.9f target -0.12666931 +- 1e-7, %.3f s", v, dt));
  }

  // simulated exponent and oscillation size share the runs
  const long Ns[] = {100, 200, 400, 800, 1600};
  const double os_ref[] = {28.845, 56.761, 112.632, 224.379, 447.874};
  const double lam_ref[] = {NAN, NAN, -0.12670, -0.126696, -0.126689};
  bool lam_ok = true, os_ok = true;
  std::string lam_d, os_d;
  for (int k = 0; k < 5; ++k) {
    DrivenParams q = p;
    q.N = Ns[k];
    int bits = std::max(113, recommended_bits(q));
    auto t0 = std::chrono::steady_clock::now();
    LyapunovRun r = lyapunov_sums(q, 0, 0.5, 100000, 100000, bits);
    double dt = seconds_since(t0);
    bool in = true;
    if (Ns[k] == 200) in = r.lambda >= -0.1278 && r.lambda <= -0.1258;
    if (Ns[k] >= 400) in = std::fabs(r.lambda - lam_ref[k]) <= 5e-4;
    if (Ns[k] >= 200) {
      lam_ok = lam_ok && in && dt < 60;
      lam_d += fmt("N=%ld %.6f (%d bits, %.1f s)%s; ", Ns[k], r.lambda, bits, dt, in ? "" : " out");
    }
    double rel = std::fabs(r.os / os_ref[k] - 1);
    os_ok = os_ok && rel < 0.02;
    os_d += fmt("N=%ld OS %.3f (%.2f%%); ", Ns[k], r.os, 100 * rel);
  }
  report("simulated-lyapunov", lam_ok, lam_d);
  {
    AnalyticPrecision ap;
    OscillationPrediction o = oscillation_prediction(p);
    double al = static_cast<double>(p.alpha_r());
    double v = static_cast<double>(o.value);
    double r1 = std::fabs(v / (0.172660185 / al) - 1), r2 = std::fabs(v / (0.27937 * 200) - 1);
    os_ok = os_ok && r1 < 1e-6 && r2 < 1e-4;
    os_d += fmt("prediction %.4f (rel %.1e vs 0.172660185/alpha, %.1e vs 0.27937 N)", v, r1, r2);
  }
  report("oscillation-statistics", os_ok, os_d);

  {
    Cfg c;
    double td, tl, osp;
    nhim_status s = nhim_predict(c.c, nullptr, &td, &tl, &osp);
    bool ok = s == NHIM_OK && std::fabs(td - 0.258) <= 0.005 && std::fabs(tl - 0.629) <= 0.005;
    report("departure-landing", ok, fmt("theta_d %.5f (target 0.258 +- 0.005) theta_l %.5f (target 0.629 +- 0.005)", td, tl));
  }

  // the rigorous proof, through the library interface
  {
    Cfg c;
    nhim_proof* pr = nullptr;
    auto t0 = std::chrono::steady_clock::now();
    nhim_status s = nhim_prove(c.c, &pr);
    double dt = seconds_since(t0);
    int ns = 0, nc = 0, nk = 0;
    double glo = NAN, ghi = NAN;
    long viol = -1;
    bool verdict = false;
    if (s == NHIM_OK) {
      nhim_proof_counts(pr, &ns, &nc, &nk);
      nhim_proof_min_gap(pr, &glo, &ghi);
      viol = nhim_proof_oracle_violations(pr);
      verdict = nhim_proof_verdict(pr);
    }
    // the stored certificate must survive an independent recheck
    int rv = 0, agrees = 0;
    if (pr) {
      size_t need = 0;
      nhim_proof_certificate(pr, 0, nullptr, 0, &need);
      std::string text(need, '\0');
      nhim_proof_certificate(pr, 0, text.data(), need, &need);
      nhim_recheck(text.c_str(), &rv, &agrees, nullptr, 0);
    }
    report("rigorous-proof", verdict && ns == 164 && nc == 4 && nk == 168 && dt <= 600 && rv && agrees,
           fmt("single %d/164 chain %d/4 cone %d/168 verdict %s recheck %s, %.1f s", ns, nc, nk,
               verdict ? "true" : "false", rv && agrees ? "agrees" : "fails", dt));
    report("extreme-contraction", glo >= 1e-26 && ghi <= 1e-24,
           fmt("min gap [%.5e, %.5e] in [1e-26, 1e-24]", glo, ghi));
    report("enclosure-oracle", viol == 0 && nc == 4, fmt("%ld violations over 4 chains x 10 points", viol));
    nhim_proof_free(pr);
  }

  {
    auto t0 = std::chrono::steady_clock::now();
    ReferenceCurve ref(p);
    FalseChaosStats st = false_chaos(p, 53, 128, 100000, 200000, ref);
    double dt = seconds_since(t0);
    bool departs = st.max_low_in_window > 0.05 && st.departure_in_window > 0.5;
    bool lands = std::fabs(st.landing_median - 0.63) <= 0.02;
    bool precise = st.max_dev_precise < 1e-6;
    report("false-chaos", departs && lands && precise,
           fmt("53-bit: %d passes, %.0f%% depart in [0.24, 0.30] (median %.4f), landing median %.4f, max dev in "
               "[0.3, 0.6] %.3f; 128-bit max dev %.2e; %.1f s",
               st.cycles, 100 * st.departure_in_window, st.departure_median, st.landing_median,
               st.max_low_in_window, st.max_dev_precise, dt));
  }

  {
    std::string cmd = std::string(NHIM_UNIT_TESTS) +
                      " -tc=\"containment fuzz*,Q-form matrix bounds fuzz,jet coefficients agree*,diagonal closed "
                      "forms*,T matrix,C matrix,G matrix,example cone chain,invariance residual order regression\" "
                      "-m > /dev/null 2>&1";
    int r = run(cmd);
    report("property-suites", r == 0, fmt("unit suites exit %d", r));
  }

  {
    std::string out = "/tmp/nhim_acceptance_p53";
    int code53 = run(std::string("NHIM_OUT_DIR=") + out + " " + NHIM_CLI + " prove --precision 53 --no-strips > " + out +
                     ".log 2>&1");
    std::string log;
    if (FILE* f = std::fopen((out + ".log").c_str(), "r")) {
      char b[4096];
      size_t n;
      while ((n = std::fread(b, 1, sizeof b, f)) > 0) log.append(b, n);
      std::fclose(f);
    }
    bool gap53 = code53 == 2 && log.find("GapCollapse at step") != std::string::npos;

    Cfg c;
    nhim_config_set(c.c, "degree", "1");
    nhim_proof* pr = nullptr;
    nhim_prove(c.c, &pr);
    bool d1 = pr && !nhim_proof_verdict(pr) && nhim_proof_failure_step(pr) >= 0;
    std::string d1s = pr ? fmt("%s at step %ld", nhim_status_name(nhim_proof_failure_code(pr)), nhim_proof_failure_step(pr))
                         : "no result";
    nhim_proof_free(pr);
    auto line = log.find("verdict false");
    std::string l53 = line == std::string::npos ? "no failure line" : log.substr(line, log.find('\n', line) - line);
    report("negative-tests", gap53 && d1, fmt("precision 53: exit %d, %s; degree 1: %s", code53, l53.c_str(), d1s.c_str()));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
