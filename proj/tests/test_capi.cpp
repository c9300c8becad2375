#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "nhim/nhim.h"

namespace {

struct Cfg {
  nhim_config* c = nhim_config_new();
  ~Cfg() { nhim_config_free(c); }
};

std::string get(nhim_config* c, const char* k) {
  char b[256];
  REQUIRE(nhim_config_get(c, k, b, sizeof b) == NHIM_OK);
  return b;
}

const char* kCert =
    "nhim-certificate 1\n"
    "config strips 6\n"
    "config reentry 2\n"
    "covering single 3 -> 1 ok margin [1.0e-03, 1.1e-03]\n"
    "covering single 4 -> 2 ok margin [2.0e-03, 2.1e-03]\n"
    "covering single 5 -> 3 4 ok margin [1.0e-05, 1.1e-05]\n"
    "covering single 6 -> 4 ok margin [1.0e-05, 1.1e-05]\n"
    "covering chain 1 -> 5 ok margin [1.0e-19, 2.0e-19] min_gap [4.0e-26, 4.1e-26] at 10 trimmed 0\n"
    "covering chain 2 -> 6 ok margin [1.0e-19, 2.0e-19] min_gap [4.0e-26, 4.1e-26] at 10 trimmed 0\n"
    "cone single 3 ok steps 1 margin_a [0.5, 0.6] margin_c [1, 2]\n"
    "cone single 4 ok steps 1 margin_a [0.5, 0.6] margin_c [1, 2]\n"
    "cone single 5 ok steps 1 margin_a [0.5, 0.6] margin_c [1, 2]\n"
    "cone single 6 ok steps 1 margin_a [0.5, 0.6] margin_c [1, 2]\n"
    "cone chain 1 ok steps 9 margin_a [0.5, 0.6] margin_c [1, 2]\n"
    "cone chain 2 ok steps 9 margin_a [0.5, 0.6] margin_c [1, 2]\n"
    "oracle chain 1 points 10 checks 100 violations 0\n"
    "oracle chain 2 points 10 checks 100 violations 0\n"
    "summary single 4 chain 2 cone 6\n"
    "verdict true\n";

}  // namespace

TEST_CASE("config keys, validation and files") {
  Cfg c;
  CHECK(get(c.c, "precision") == "128");
  CHECK(nhim_config_set(c.c, "degree", "7") == NHIM_OK);
  CHECK(get(c.c, "degree") == "7");
  CHECK(nhim_config_set(c.c, "degree", "seven") == NHIM_INVALID_ARGUMENT);
  CHECK(std::string(nhim_last_error()).find("degree") != std::string::npos);
  CHECK(nhim_config_set(c.c, "nope", "1") == NHIM_INVALID_ARGUMENT);
  CHECK(nhim_config_set(c.c, "centered_edges", "maybe") == NHIM_INVALID_ARGUMENT);
  char tiny[2];
  CHECK(nhim_config_get(c.c, "theta_left", tiny, sizeof tiny) == NHIM_BUFFER_TOO_SMALL);

  int n = 0;
  for (const char* const* k = nhim_config_keys(); *k; ++k) {
    ++n;
    CHECK(nhim_config_help(*k) != nullptr);
  }
  CHECK(n > 20);

  std::string path = "/tmp/nhim_capi_test.cfg";
  {
    std::ofstream f(path);
    f << "# comment\n  N = 400\n\neps=0.25  # trailing\n";
  }
  CHECK(nhim_config_load(c.c, path.c_str()) == NHIM_OK);
  CHECK(get(c.c, "N") == "400");
  CHECK(get(c.c, "eps") == "0.25");
  {
    std::ofstream f(path);
    f << "N 400\n";
  }
  CHECK(nhim_config_load(c.c, path.c_str()) == NHIM_INVALID_ARGUMENT);
  CHECK(nhim_config_load(c.c, "/nonexistent/x.cfg") == NHIM_IO_ERROR);
  std::remove(path.c_str());
}

TEST_CASE("preconditions surface as status codes") {
  Cfg c;
  nhim_config_set(c.c, "a0", "0.9");
  double v = 0;
  CHECK(nhim_averaged_lyapunov(c.c, &v) == NHIM_INVALID_ARGUMENT);
  nhim_proof* p = reinterpret_cast<nhim_proof*>(1);
  CHECK(nhim_prove(c.c, &p) == NHIM_INVALID_ARGUMENT);
  CHECK(p == nullptr);

  Cfg d;
  nhim_config_set(d.c, "precision", "8");
  CHECK(nhim_prove(d.c, &p) == NHIM_INVALID_ARGUMENT);
  CHECK(nhim_averaged_lyapunov(d.c, &v) == NHIM_OK);
  CHECK(v == doctest::Approx(-0.12666931).epsilon(1e-7));
  CHECK(std::string(nhim_status_name(NHIM_GAP_COLLAPSE)) == "GapCollapse");
}

TEST_CASE("small analytics runs") {
  Cfg c;
  nhim_config_set(c.c, "transient", "1000");
  nhim_config_set(c.c, "iters", "2000");
  nhim_config_set(c.c, "grid", "20");
  double lam = 0, os = 0;
  long at = 0;
  CHECK(nhim_lyapunov(c.c, nullptr, &lam, &os, &at) == NHIM_OK);
  CHECK(lam < 0);
  CHECK(os > 0);
  double r0 = 0, r1 = 0;
  CHECK(nhim_curve(c.c, nullptr, &r0, &r1) == NHIM_OK);
  CHECK(r1 < r0);
  long pts = 0;
  std::string path = "/tmp/nhim_capi_sim.csv";
  CHECK(nhim_simulate(c.c, path.c_str(), &pts) == NHIM_OK);
  CHECK(pts == 2000);
  std::ifstream f(path);
  std::string head;
  std::getline(f, head);
  CHECK(head == "theta,x");
  std::remove(path.c_str());
}

TEST_CASE("certificate recheck") {
  int v = 0, agree = 0;
  char rep[4096];
  REQUIRE(nhim_recheck(kCert, &v, &agree, rep, sizeof rep) == NHIM_OK);
  CHECK(v == 1);
  CHECK(agree == 1);

  // a margin whose lower end is not positive
  std::string bad = kCert;
  bad.replace(bad.find("[1.0e-05"), 8, "[-1.0e-9");
  REQUIRE(nhim_recheck(bad.c_str(), &v, &agree, rep, sizeof rep) == NHIM_OK);
  CHECK(v == 0);
  CHECK(agree == 0);
  CHECK(std::string(rep).find("not certified") != std::string::npos);

  // a missing record
  std::string missing = kCert;
  auto a = missing.find("cone chain 2");
  missing.erase(a, missing.find('\n', a) - a + 1);
  REQUIRE(nhim_recheck(missing.c_str(), &v, &agree, nullptr, 0) == NHIM_OK);
  CHECK(v == 0);

  // oracle violation
  std::string orc = kCert;
  orc.replace(orc.rfind("violations 0"), 12, "violations 3");
  REQUIRE(nhim_recheck(orc.c_str(), &v, &agree, nullptr, 0) == NHIM_OK);
  CHECK(v == 0);

  // failed proofs recheck as false and agree
  std::string failed = std::string(kCert);
  failed.replace(failed.find("verdict true"), 12, "failure stage chain code GapCollapse step 63 strip 1\nverdict false");
  REQUIRE(nhim_recheck(failed.c_str(), &v, &agree, nullptr, 0) == NHIM_OK);
  CHECK(v == 0);
  CHECK(agree == 1);

  CHECK(nhim_recheck("hello\n", &v, &agree, nullptr, 0) == NHIM_INVALID_ARGUMENT);
}
