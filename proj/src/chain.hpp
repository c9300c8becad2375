#pragma once
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cones.hpp"

namespace nhim {

// local maps f_{to,from} and their derivative bounds over dom f_{to,from}
struct LocalMapFamily {
  Signature sig;
  std::function<std::vector<Interval>(int from, int to, const std::vector<Interval>& q)> map;
  std::function<BoundMatrix(int from, int to)> bounds;
};

struct ItineraryPlan {
  int start_chart = 0, start_window = 0;
  std::vector<int> regions;  // i_0 ... i_n
  int target_chart = 0, target_window = 0;
  std::vector<Interval> start_center;  // (0, 0, eta(lambda)); zeros if empty
};

enum class TerminalRule { Ratio, Literal };

struct ChainOptions {
  Interval eps = Interval(std::ldexp(1.0, -40));
  bool relative_eps = false;
  Interval ambient = Interval(1L);
  TerminalRule rule = TerminalRule::Ratio;
};

struct StepRecord {
  int step = 0;
  int from = 0, to = 0;
  std::vector<Interval> q;
  std::vector<Interval> R;
  Gamma gamma;
  Interval margin;  // ambient - max block (r + |q|)
  bool ok = true;
};

struct ChainCertificate {
  Signature sig;
  std::vector<StepRecord> steps;
  Interval terminal_margin_u;  // r_u^n - (r + |x^n|)
  Interval terminal_margin_s;  // r - (r_s^n + |y^n|)
  bool cone_ok = false;
  bool verdict = false;
  std::string failure;
  std::string str() const;
};

ChainCertificate verify_forward_bounds(const LocalMapFamily& maps, const ItineraryPlan& plan, const Interval& r,
                                       const Interval& rho, const Gamma& g0, const Gamma& g1,
                                       const ChainOptions& opt = {});
// f^-1 family; cones backward-signed (a < 0, b > 0)
ChainCertificate verify_backward_bounds(const LocalMapFamily& inverse_maps, const ItineraryPlan& plan, const Interval& r,
                                        const Interval& rho, const Gamma& g0_back, const Gamma& g1_back,
                                        const ChainOptions& opt = {});
bool check_main_inequality(const Gamma& g0_f, const Gamma& g0_b);

}  // namespace nhim
