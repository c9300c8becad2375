#pragma once
#include <functional>
#include <string>
#include <vector>

#include "chain.hpp"
#include "cones.hpp"
#include "jets.hpp"
#include "logistic.hpp"

namespace nhim {

// windows [theta0 + k w, theta0 + (k+1) w]; k may be negative, angles are taken mod 1
struct StripGeometry {
  Interval theta0;
  Interval w;
  Interval base(long idx) const { return theta0 + Interval(idx) * w; }
  // theta offset of window a relative to window b, reduced to the turn nearest zero
  Interval offset(long a, long b) const;
};

// one step of the proof map in strip form: x-component as an expression in (t, x),
// theta moving by a whole number of windows
struct StripMap {
  Expr f2;
  long window_shift = 0;
  std::function<void(const Interval&, const Interval&)> domain;  // throws DomainViolation
};

struct CurveStrip {
  long idx = 0;
  Poly lo, up;  // p^d < p^u, polynomials in u = s - w/2, s in [0, w]
  Interval gap_lower_bound(int pieces) const;
  Interval gap_enclosure(int pieces) const;  // [min lower bound, min upper bound] of p^u - p^d
};

using CurveGuess = std::function<Real(const Real&)>;

// degree-n interpolant of the guess on a window, in the centred variable (point coefficients)
Poly fit_guess(const CurveGuess& guess, const StripGeometry& geo, long idx, int degree);

std::vector<CurveStrip> build_initial_strips(const CurveGuess& guess, const StripGeometry& geo, const StripMap& map,
                                             long first, int count, const std::vector<double>& half_heights,
                                             int degree);
std::vector<CurveStrip> build_initial_strips(const CurveGuess& guess, const StripGeometry& geo, const StripMap& map,
                                             long first, int count, double half_height, int degree);

struct ImageOptions {
  int degree = 9;
  int subdivisions = 10;
  int remainder_pieces = 1;
  bool centered = true;  // edges expanded at the window centre
  long step = -1;  // reported with errors
};
CurveStrip image_strip(const CurveStrip& s, const StripGeometry& geo, const StripMap& map, const ImageOptions& opt);

struct CoveringResult {
  bool ok = false;
  int failing_piece = -1;
  long failing_target = -1;
  std::string reason;
  Interval margin_up, margin_lo;  // worst M.up - T.up and T.lo - M.lo lower bounds
};
CoveringResult check_strip_covering(const CurveStrip& M, const std::vector<CurveStrip>& targets,
                                    const StripGeometry& geo, int subdivisions);

// strip box in (theta, x), split into pieces
struct StripBox {
  Interval theta, x;
};
std::vector<StripBox> strip_boxes(const CurveStrip& s, const StripGeometry& geo, int pieces);

struct ConeStepOptions {
  Interval beta;  // theta rescaling
  ConeOptions cone;
};
// local bound matrix in (x, theta) for a step from a chart of half size h_src into one of size h_dst
BoundMatrix strip_bound_matrix(const StripMap& map, const std::vector<StripBox>& boxes, const Interval& h_src,
                               const Interval& h_dst, const Interval& beta);

struct ConeLeg {
  std::vector<StripBox> boxes;
  Interval h_src, h_dst;
  long from = 0, to = 0;
};
struct ConeItineraryResult {
  bool ok = false;
  int steps = 0;  // legs used until the terminal cone dominated gamma0
  Gamma terminal;
  Interval margin_a, margin_c;  // a0 - a_n and c_n/a_n - c0/a0 style margins (positive is good)
  std::string failure;
};
// propagate gamma0 along legs, stopping at the first leg after which the cone dominates gamma0
ConeItineraryResult verify_cone_itinerary(const StripMap& map, const std::vector<ConeLeg>& legs, const Gamma& g0,
                                          const ConeStepOptions& opt);

struct ConeRegion {
  std::vector<StripBox> boxes;
  Interval h;
  long id = 0;
};
struct ConeCoverResult {
  bool ok = true;
  int checked = 0;
  Interval worst_margin_a, worst_margin_c;
};
// single-step pairs (i -> j); throws ConeSignLoss naming the pair on failure
ConeCoverResult verify_cones_on_cover(const StripMap& map, const std::vector<ConeRegion>& regions,
                                      const std::vector<std::pair<int, int>>& pairs, const Gamma& g0,
                                      const ConeStepOptions& opt);

// ---- the driven logistic proof ----

StripMap logistic_strip_map(const DrivenParams& p, const StripGeometry& geo);
StripGeometry logistic_geometry(const DrivenParams& p, const std::string& theta_left);

struct ProofConfig {
  int precision = 128;
  int degree = 9;
  int subdivisions = 10;
  int remainder_pieces = 8;
  bool centered_edges = true;
  int strips = 168;
  int reentry = 4;       // strips re-entering through the long chains
  int chain_length = 128;
  std::string theta_left = "0.615";
  double h_max = 1e-3;            // strip half height cap
  double domain_fraction = 0.5;   // half height <= fraction * distance to the domain edge
  double v_fraction = 0.5;        // chain strips trimmed to fraction * distance to the domain edge
  double land_factor = 0.1;       // landing targets vs predicted chain half gap
  double step_factor = 0.5;       // h_{k-4} <= step_factor * E_k * h_k
  int beta_log2 = 200;
  int eps_log2 = -40;             // relative cone inflation
  int oracle_points = 10;
  int oracle_bits = 256;
};

struct StripPlan {
  std::vector<double> half_heights;  // per strip, 1-based index k at [k-1]
  std::vector<double> expansion;     // non-rigorous |df2/dx| at strip centres
  std::vector<long> landing;         // strips the long chains land on
  double predicted_min_gap = 0, predicted_land_gap = 0;
};
StripPlan plan_strips(const DrivenParams& p, const ProofConfig& cfg, const CurveGuess& guess);

struct CoveringRecord {
  std::string kind;  // "single" or "chain"
  long source = 0;
  std::vector<long> targets;
  bool ok = false;
  int failing_piece = -1;
  Interval margin;     // min of the two exit margins
  Interval min_gap;    // chains: enclosure of the smallest strip gap met
  long min_gap_step = -1;
  int trimmed = 0;     // chain strips trimmed back into V
};

struct ConeRecord {
  std::string kind;  // "single" or "chain"
  long source = 0;
  bool ok = false;
  int steps = 0;
  Interval margin_a, margin_c;
};

struct OracleRecord {
  long chain = 0;
  int points = 0;
  long checks = 0;
  long violations = 0;
  double max_excess = 0;  // largest distance beyond the strip edge on the wrong side (0 if none)
};

struct ProofFailure {
  bool failed = false;
  std::string stage;
  Code code = Code::Ok;
  long step = -1;
  long strip = -1;
  std::string message;
};

struct ProofCertificate {
  DrivenParams params;
  ProofConfig config;
  std::string alpha_enclosure;
  std::vector<CoveringRecord> coverings;
  std::vector<ConeRecord> cones;
  std::vector<OracleRecord> oracle;
  Interval min_gap;
  long min_gap_chain = -1, min_gap_step = -1;
  bool verdict = false;
  ProofFailure failure;
  double seconds = 0;
  int single_ok() const;
  int chain_ok() const;
  int cone_ok() const;
};

struct ProofArtifacts {
  std::vector<CurveStrip> strips;
  std::vector<std::vector<CurveStrip>> chains;
};

ProofCertificate run_full_proof(const DrivenParams& p, const ProofConfig& cfg, ProofArtifacts* art = nullptr);

// 256-bit orbits of points on the upper edge of N_i; after step m they must lie on the outer side of M_m's
// matching edge (below p^d for odd m, above p^u for even m)
OracleRecord edge_orbit_oracle(const DrivenParams& p, const StripGeometry& geo, const std::vector<CurveStrip>& chain,
                               int points, int bits);

std::string certificate_text(const ProofCertificate& c, bool with_timing = true);

}  // namespace nhim
