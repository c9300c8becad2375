#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "nhim/nhim.h"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kConfigError = 1, kVerifyFailed = 2;

struct ConfigPtr {
  nhim_config* c = nhim_config_new();
  ~ConfigPtr() { nhim_config_free(c); }
};

int config_error(const std::string& what) {
  std::cerr << "error: " << what << "\n";
  return kConfigError;
}

std::string out_dir(const nhim_config* c) {
  char buf[4096];
  nhim_config_get(c, "out_dir", buf, sizeof buf);
  std::string d = buf;
  if (d.empty()) {
    const char* e = std::getenv("NHIM_OUT_DIR");
    d = e && *e ? e : ".";
  }
  fs::create_directories(d);
  return d;
}

std::string get(const nhim_config* c, const char* k) {
  char buf[4096];
  nhim_config_get(c, k, buf, sizeof buf);
  return buf;
}

std::string path_for(const nhim_config* c, const std::string& given, const std::string& def) {
  if (!given.empty()) return fs::path(given).is_absolute() ? given : (fs::path(out_dir(c)) / given).string();
  return (fs::path(out_dir(c)) / def).string();
}

int run_recheck(const std::string& file) {
  std::ifstream in(file);
  if (!in) return config_error("cannot read " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  int v = 0, agrees = 0;
  char report[1 << 16];
  nhim_status s = nhim_recheck(ss.str().c_str(), &v, &agrees, report, sizeof report);
  if (s != NHIM_OK) return config_error(std::string(nhim_status_name(s)) + ": " + nhim_last_error());
  std::cout << report;
  std::cout << "recheck verdict " << (v ? "true" : "false") << (agrees ? " (agrees with certificate)" : " (DISAGREES)")
            << "\n";
  return v && agrees ? kOk : kVerifyFailed;
}

const char* kCsvDoc =
    "CSV files (UTF-8, header row, one record per line):\n"
    "  prove     strips.csv      strip,theta,p_lo,p_up   edge polynomials on a theta grid per strip\n"
    "  lyapunov  lyapunov.csv    j,S_j                   partial sums of log|dx| every stride steps\n"
    "  predict   predict.csv     theta,h                 h(theta) = log(4(a(theta)-1))/2\n"
    "  simulate  simulate_<bits>.csv  theta,x            attractor cloud\n"
    "  curve     curve.csv       theta,G0,G1,curve1,residual0,residual1\n"
    "Output directory: --out_dir, else $NHIM_OUT_DIR, else the current directory.\n"
    "Config file: key = value lines; command-line flags win.\n"
    "Exit codes: 0 success, 2 verification failure, 1 configuration error.";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigorous normally hyperbolic invariant curve prover for the driven logistic map"};
  app.footer(kCsvDoc);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  app.add_option("--config", config_file, "key = value configuration file");
  std::map<std::string, std::string> flags;
  for (const char* const* k = nhim_config_keys(); *k; ++k)
    app.add_option(std::string("--") + *k, flags[*k], nhim_config_help(*k));

  std::string output, recheck_file, cert_name = "certificate.txt";
  bool no_strips = false, no_timing = false;

  auto* prove = app.add_subcommand("prove", "run the rigorous proof and write a certificate");
  prove->add_option("--recheck", recheck_file, "re-validate an existing certificate instead of proving");
  prove->add_option("--certificate", cert_name, "certificate file name");
  prove->add_flag("--no-strips", no_strips, "skip strips.csv");
  prove->add_flag("--no-timing", no_timing, "omit the seconds line (byte-identical reruns)");
  std::string recheck_pos;
  auto* recheck = app.add_subcommand("recheck", "re-validate every record of a certificate");
  recheck->add_option("certificate", recheck_pos, "certificate file")->required();
  auto* simulate = app.add_subcommand("simulate", "attractor cloud at the given precision");
  auto* lyap = app.add_subcommand("lyapunov", "finite-time Lyapunov exponent and oscillation size");
  auto* predict = app.add_subcommand("predict", "averaged exponent, oscillation and departure/landing prediction");
  auto* curve = app.add_subcommand("curve", "approximate invariant curve and its invariance residual");
  for (auto* s : {simulate, lyap, predict, curve}) s->add_option("--output", output, "csv file name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? kOk : kConfigError;
  }

  if (recheck->parsed()) return run_recheck(recheck_pos);
  if (prove->parsed() && !recheck_file.empty()) return run_recheck(recheck_file);

  ConfigPtr cfg;
  nhim_config* c = cfg.c;
  if (!config_file.empty() && nhim_config_load(c, config_file.c_str()) != NHIM_OK)
    return config_error(nhim_last_error());
  for (const auto& [k, v] : flags)
    if (app.count("--" + k) && nhim_config_set(c, k.c_str(), v.c_str()) != NHIM_OK)
      return config_error(nhim_last_error());

  // analytics failures are precondition violations; prove failures past validation are verification failures
  auto status_exit = [&](nhim_status s) {
    std::cerr << "error: " << nhim_status_name(s) << ": " << nhim_last_error() << "\n";
    if (!prove->parsed()) return kConfigError;
    return s == NHIM_INVALID_ARGUMENT || s == NHIM_IO_ERROR ? kConfigError : kVerifyFailed;
  };

  try {
    if (prove->parsed()) {
      nhim_proof* pr = nullptr;
      nhim_status s = nhim_prove(c, &pr);
      if (s != NHIM_OK) return status_exit(s);
      std::unique_ptr<nhim_proof, void (*)(nhim_proof*)> guard(pr, nhim_proof_free);
      size_t need = 0;
      nhim_proof_certificate(pr, !no_timing, nullptr, 0, &need);
      std::string text(need, '\0');
      nhim_proof_certificate(pr, !no_timing, text.data(), need, &need);
      text.resize(need - 1);
      std::string cp = path_for(c, cert_name, "certificate.txt");
      std::ofstream(cp) << text;
      if (!no_strips) {
        std::string sp = path_for(c, "", "strips.csv");
        if (nhim_proof_write_strips_csv(pr, sp.c_str(), std::stoi(get(c, "strip_grid"))) != NHIM_OK)
          return status_exit(NHIM_IO_ERROR);
      }
      int ns, nc, nk;
      nhim_proof_counts(pr, &ns, &nc, &nk);
      double glo, ghi;
      nhim_proof_min_gap(pr, &glo, &ghi);
      std::printf("prove: single %d chain %d cone %d min_gap [%.6e, %.6e] oracle_violations %ld seconds %.1f\n", ns,
                  nc, nk, glo, ghi, nhim_proof_oracle_violations(pr), nhim_proof_seconds(pr));
      std::printf("certificate %s\n", cp.c_str());
      if (!nhim_proof_verdict(pr)) {
        std::istringstream ls(text);
        std::string l;
        while (std::getline(ls, l))
          if (l.rfind("failure", 0) == 0 || l.find(" FAIL") != std::string::npos) std::printf("%s\n", l.c_str());
        std::printf("verdict false: %s at step %ld\n", nhim_status_name(nhim_proof_failure_code(pr)),
                    nhim_proof_failure_step(pr));
        return kVerifyFailed;
      }
      std::printf("verdict true\n");
      return kOk;
    }
    if (lyap->parsed()) {
      std::string p = path_for(c, output, "lyapunov.csv");
      double lam, os, avg;
      long osi;
      nhim_status s = nhim_lyapunov(c, p.c_str(), &lam, &os, &osi);
      if (s != NHIM_OK) return status_exit(s);
      nhim_averaged_lyapunov(c, &avg);
      std::printf("lyapunov: N %s lambda %.6f OS %.4f at %ld averaged %.8f csv %s\n", get(c, "N").c_str(), lam, os, osi,
                  avg, p.c_str());
      return kOk;
    }
    if (predict->parsed()) {
      std::string p = path_for(c, output, "predict.csv");
      double td, tl, osp, avg;
      nhim_status s = nhim_predict(c, p.c_str(), &td, &tl, &osp);
      if (s != NHIM_OK) return status_exit(s);
      nhim_averaged_lyapunov(c, &avg);
      std::printf("predict: averaged %.8f OS %.4f theta_d %.5f theta_l %.5f csv %s\n", avg, osp, td, tl, p.c_str());
      return kOk;
    }
    if (simulate->parsed()) {
      std::string p = path_for(c, output, "simulate_" + get(c, "precision") + ".csv");
      long n;
      nhim_status s = nhim_simulate(c, p.c_str(), &n);
      if (s != NHIM_OK) return status_exit(s);
      std::printf("simulate: %ld points at %s bits csv %s\n", n, get(c, "precision").c_str(), p.c_str());
      return kOk;
    }
    if (curve->parsed()) {
      std::string p = path_for(c, output, "curve.csv");
      double r0, r1;
      nhim_status s = nhim_curve(c, p.c_str(), &r0, &r1);
      if (s != NHIM_OK) return status_exit(s);
      std::printf("curve: max residual order0 %.3e order1 %.3e csv %s\n", r0, r1, p.c_str());
      return kOk;
    }
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
  return kConfigError;
}
