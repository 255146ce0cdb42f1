#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tslab/aux_optimizer.hpp"
#include "tslab/probability.hpp"
#include "tslab/two_terminal.hpp"

namespace tslab {

// --- one-terminal rate-distortion functions (bits per source symbol) ----------

// min I(X;Z) s.t. E d(X, Z) <= D by Blahut-Arimoto with a bisection on the
// slope. Returns +inf below the smallest achievable distortion.
double shannon_rd(const ProbabilityTable& source, const DistortionCriterion& d, double D);

// min I(X1;Z|X2) s.t. E d(X1, Z) <= D with X2 known to both ends.
double conditional_rd(const ProbabilityTable& joint, const DistortionCriterion& d, double D);

struct RdSolution {
  double rate = 0.0;         // bits per source symbol
  double distortion = 0.0;   // achieved, per symbol
  // Up to two witnesses whose time sharing meets the target.
  std::vector<AuxWitness> witnesses;
  std::vector<double> weights;
};

// min I(X1^n;Z1|X2^n)/n s.t. E d_n(X1^n, psi(Z1, X2^n))/n <= D, Z1 -> X1^n -> X2^n.
RdSolution wyner_ziv_solution(const ProbabilityTable& joint, const DistortionCriterion& d,
                              double D, const AuxSpec& aux, std::size_t order = 1);
double wyner_ziv_rd(const ProbabilityTable& joint, const DistortionCriterion& d, double D,
                    const AuxSpec& aux, std::size_t order = 1);

// --- regions --------------------------------------------------------------------

enum class RegionProblem { Shannon, WynerZiv, SideInfo, BergerYeung, Joint, Partial };

const char* to_string(RegionProblem p);
RegionProblem region_problem_from_string(const std::string& s);

enum class Coordinate { R1, R2, D };

struct RateDistortionPoint {
  double r1 = 0.0;
  double r2 = 0.0;
  double d = 0.0;
  double operator[](Coordinate c) const { return c == Coordinate::R1 ? r1 : c == Coordinate::R2 ? r2 : d; }
  bool operator==(const RateDistortionPoint&) const = default;
};

struct RegionPoint {
  RateDistortionPoint point;
  std::size_t witness = 0;  // index into Region::witnesses
  int corner = -1;          // 0/1 for two-terminal corners, -1 otherwise
  bool operator==(const RegionPoint&) const = default;
};

struct Region {
  RegionProblem problem = RegionProblem::Joint;
  std::size_t order = 1;
  std::vector<Coordinate> coordinates;  // active axes, e.g. {R1, D}
  std::vector<RegionPoint> points;
  std::vector<AuxWitness> witnesses;
  AuxProblem aux_problem;  // law and cost the witnesses refer to
  AuxSpec settings;

  std::vector<double> coords(const RateDistortionPoint& p) const;
  bool operator==(const Region&) const = default;
};

// Information quantities of witness `i`, per source symbol.
AuxMeasures witness_measures(const Region& region, std::size_t i);

// Recomputes the defining inequalities of a point from its witness.
bool reverify(const Region& region, const RegionPoint& point, double tol = 1e-9);

// (H(X1|Z2), I(X2;Z2)) over q2(z2|x2); lossless X1.
Region side_info_region(const ProbabilityTable& joint, const AuxSpec& aux);

// Lossless X1, lossy X2 with psi: X1 x Z2 -> X2; d is on X2.
Region berger_yeung_region(const ProbabilityTable& joint, const DistortionCriterion& d,
                           const AuxSpec& aux);

// Joint reconstruction; d is on pairs (x1, x2), indexed x1 * |X2| + x2.
Region joint_inner_region(const ProbabilityTable& source, const DistortionCriterion& d,
                          std::size_t order, const AuxSpec& aux);

// Partial reconstruction of X1 from (Z1, Z2); d is on X1.
Region partial_inner_region(const ProbabilityTable& joint, const DistortionCriterion& d,
                            std::size_t order, const AuxSpec& aux);

// (r1, d) region with complete side information X2^n at the decoder.
Region wyner_ziv_region(const ProbabilityTable& joint, const DistortionCriterion& d,
                        std::size_t order, const AuxSpec& aux,
                        const std::vector<double>& targets = {});

// (r1, d) curve points of R(D) at the given targets (plus the two anchors).
Region shannon_region(const ProbabilityTable& source, const DistortionCriterion& d,
                      const std::vector<double>& targets);

// Two corner points of one chain model, (r1, r2) per source symbol.
Region corner_region(const ChainModel& model);

// Smallest value of `target` over the convex, dominance-closed region with the
// other active coordinates bounded by `bounds` (same order as coordinates,
// the target entry ignored). +inf when nothing qualifies.
double region_minimum(const Region& region, Coordinate target, const std::vector<double>& bounds);

struct ContainmentReport {
  bool contained = false;
  double worst_violation = 0.0;
  std::size_t worst_point = 0;
};

// Every inner point must lie in conv(outer) + nonnegative orthant after a
// shift of at most tol in each coordinate.
ContainmentReport check_containment(const Region& inner, const Region& outer, double tol = 1e-6);

struct Facet {
  std::vector<double> normal;  // outward, all components <= 0
  double offset = 0.0;         // normal . x <= offset on the region
  std::vector<std::size_t> vertices;  // point indices
};

struct HullReport {
  std::vector<Facet> facets;
  std::vector<std::size_t> corners;  // extreme points of the closure
};

HullReport hull_and_corners(const Region& region, double tol = 1e-9);

struct SingleLetterizationReport {
  std::vector<double> targets;
  std::vector<double> rate_order1;  // per target
  std::vector<double> rate_order2;
  ContainmentReport containment;    // order-2 points against the order-1 region
  Region order1, order2;
  bool holds = false;
};

inline constexpr double kSingleLetterTolerance = 1.5e-2;

SingleLetterizationReport single_letterization_check(const ProbabilityTable& joint,
                                                     const DistortionCriterion& d,
                                                     const std::vector<double>& targets,
                                                     const AuxSpec& aux);

// problem,order,r1,r2,d,witnessId
std::string region_csv_header();
std::vector<std::string> region_csv_rows(const Region& region);
std::string witnesses_json(const Region& region);

}  // namespace tslab
