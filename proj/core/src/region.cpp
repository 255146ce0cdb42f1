#include "tslab/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <json.hpp>

#include "json_tables.hpp"
#include "lp.hpp"
#include "region_internal.hpp"
#include "tslab/errors.hpp"
#include "tslab/format.hpp"
#include "tslab/rng.hpp"

namespace tslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// --- slope search shared by the R(D) solvers -----------------------------------

struct SlopePoint {
  double rate = 0.0;
  double dist = 0.0;
  std::size_t tag = 0;  // caller payload index
};

// eval(s) returns the Lagrangian minimizer at slope s (s = +inf allowed).
// Returns the bracketing pair (hi: dist <= D, lo: dist > D) after bisection;
// when a single point meets D exactly it is returned twice.
std::pair<SlopePoint, SlopePoint> bracket_slope(const std::function<SlopePoint(double)>& eval,
                                                double D, std::size_t max_steps) {
  SlopePoint lo = eval(0.0);
  if (lo.dist <= D) return {lo, lo};
  double s_lo = 0.0, s_hi = 1.0;
  SlopePoint hi = eval(s_hi);
  while (hi.dist > D) {
    s_lo = s_hi;
    lo = hi;
    s_hi *= 4.0;
    if (s_hi > 1e6) {
      hi = eval(kInf);
      s_hi = kInf;
      break;
    }
    hi = eval(s_hi);
  }
  if (hi.dist > D) return {hi, hi};  // infeasible even at s = inf
  for (std::size_t i = 0; i < max_steps && std::isfinite(s_hi); ++i) {
    if (hi.dist >= D - 1e-13 || lo.dist - hi.dist < 1e-12) break;
    if (s_hi - s_lo <= 1e-11 * std::max(1.0, s_hi)) break;
    const double s = 0.5 * (s_lo + s_hi);
    const SlopePoint m = eval(s);
    if (m.dist > D) {
      s_lo = s;
      lo = m;
    } else {
      s_hi = s;
      hi = m;
    }
  }
  return {hi, lo};
}

// Rate at D on the chord between hi (dist <= D) and lo (dist > D).
double chord_rate(const SlopePoint& hi, const SlopePoint& lo, double D, double* weight_hi) {
  if (hi.dist >= D - 1e-15 || lo.dist <= hi.dist) {
    if (weight_hi) *weight_hi = 1.0;
    return hi.rate;
  }
  const double w = (lo.dist - D) / (lo.dist - hi.dist);  // weight on hi
  if (weight_hi) *weight_hi = w;
  return w * hi.rate + (1.0 - w) * lo.rate;
}

// --- Blahut-Arimoto ----------------------------------------------------------------

struct BaResult {
  double rate = 0.0, dist = 0.0;
  std::vector<double> q;  // q(z|x), row-major
};

// One slope of R(D) for pmf px and distortion rows d[x][z]; s = inf restricts
// q(.|x) to the minimum-distortion letters of x.
BaResult blahut_arimoto(std::span<const double> px, const DistortionCriterion& d, double s) {
  const std::size_t nx = px.size(), nz = d.estimates;
  std::vector<double> r(nz, 1.0 / static_cast<double>(nz)), q(nx * nz, 0.0), rn(nz);
  std::vector<double> dmin(nx, kInf);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t z = 0; z < nz; ++z) dmin[x] = std::min(dmin[x], d(x, z));
  auto weight = [&](std::size_t x, std::size_t z) {
    const double excess = d(x, z) - dmin[x];
    if (std::isinf(s)) return excess <= 1e-15 ? 1.0 : 0.0;
    return std::exp2(-s * excess);
  };
  for (std::size_t it = 0; it < 200000; ++it) {
    std::fill(rn.begin(), rn.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      double z_sum = 0.0;
      for (std::size_t z = 0; z < nz; ++z) {
        q[x * nz + z] = r[z] * weight(x, z);
        z_sum += q[x * nz + z];
      }
      for (std::size_t z = 0; z < nz; ++z) {
        q[x * nz + z] /= z_sum;
        rn[z] += px[x] * q[x * nz + z];
      }
    }
    double change = 0.0;
    for (std::size_t z = 0; z < nz; ++z) change = std::max(change, std::abs(rn[z] - r[z]));
    r.swap(rn);
    if (change < 1e-15) break;
  }
  BaResult res;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t z = 0; z < nz; ++z) {
      const double v = q[x * nz + z];
      if (v <= 0.0 || px[x] <= 0.0) continue;
      res.rate += px[x] * v * std::log2(v / r[z]);
      res.dist += px[x] * v * d(x, z);
    }
  res.rate = std::max(0.0, res.rate);
  res.q = std::move(q);
  return res;
}

std::vector<double> single_axis(const ProbabilityTable& p) {
  return std::vector<double>(p.mass().begin(), p.mass().end());
}

double max_distortion(std::span<const double> px, const DistortionCriterion& d) {
  double best = kInf;
  for (std::size_t z = 0; z < d.estimates; ++z) {
    double s = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x) s += px[x] * d(x, z);
    best = std::min(best, s);
  }
  return best;
}

double min_distortion(std::span<const double> px, const DistortionCriterion& d) {
  double s = 0.0;
  for (std::size_t x = 0; x < px.size(); ++x) {
    double m = kInf;
    for (std::size_t z = 0; z < d.estimates; ++z) m = std::min(m, d(x, z));
    s += px[x] * m;
  }
  return s;
}

struct ShannonCurve {
  double rate = 0.0;
  SlopePoint hi, lo;
  std::vector<BaResult> evaluated;
};

ShannonCurve shannon_curve(const ProbabilityTable& source, const DistortionCriterion& d, double D) {
  d.validate();
  const std::vector<double> px = single_axis(source.rank() == 1 ? source : source.flattened());
  require(d.targets == px.size(), "distortion rows must match the source alphabet");
  require(std::isfinite(D) && D >= 0.0, "distortion target must be >= 0");
  ShannonCurve c;
  auto eval = [&](double s) {
    c.evaluated.push_back(blahut_arimoto(px, d, s));
    return SlopePoint{c.evaluated.back().rate, c.evaluated.back().dist, c.evaluated.size() - 1};
  };
  if (D >= max_distortion(px, d) - 1e-15) {
    // A constant estimate suffices.
    c.hi = c.lo = eval(0.0);
    c.rate = 0.0;
    return c;
  }
  if (D < min_distortion(px, d) - 1e-12) {
    c.rate = kInf;
    return c;
  }
  const auto [hi, lo] = bracket_slope(eval, D, 200);
  c.hi = hi;
  c.lo = lo;
  c.rate = hi.dist > D + 1e-12 ? kInf : chord_rate(hi, lo, D, nullptr);
  return c;
}

// --- aux problems ----------------------------------------------------------------

struct Letters {
  std::size_t x1 = 1, x2 = 1;
};

Letters letters_of(const ProbabilityTable& joint) {
  require(joint.rank() == 2, "source must be a two-axis table p(x1, x2)");
  return {joint.axes()[0], joint.axes()[1]};
}

void check_order(std::size_t order, const Letters& l) {
  require(order >= 1, "order n must be >= 1");
  const bool binary = l.x1 <= 2 && l.x2 <= 2;
  const std::size_t cap = binary ? 2 : 1;
  if (order > cap) {
    throw BudgetError("order " + std::to_string(order) + " exceeds the cap " +
                          std::to_string(cap) + " for this alphabet",
                      static_cast<double>(order));
  }
}

enum class Target { X1, X2, Pair };

// cost(a, b, t): per-letter average of d over the n coordinates of the blocks,
// estimate super-symbol t over d.estimates^n.
std::vector<double> block_cost(const DistortionCriterion& d, Target target, const Letters& l,
                               std::size_t n, std::size_t& estimates) {
  d.validate();
  const std::size_t letters = target == Target::X1 ? l.x1 : target == Target::X2 ? l.x2 : l.x1 * l.x2;
  require(d.targets == letters, "distortion rows do not match the reconstruction target");
  const std::size_t na = checked_power(l.x1, n), nb = checked_power(l.x2, n);
  estimates = checked_power(d.estimates, n);
  const double cells = static_cast<double>(na) * static_cast<double>(nb) * static_cast<double>(estimates);
  if (cells > static_cast<double>(1u << 24)) {
    throw BudgetError("cost table exceeds 2^24 cells", std::log2(cells));
  }
  std::vector<double> cost(na * nb * estimates, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    const auto xa = unpack_block(static_cast<Symbol>(a), l.x1, n);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto xb = unpack_block(static_cast<Symbol>(b), l.x2, n);
      for (std::size_t t = 0; t < estimates; ++t) {
        const auto et = unpack_block(static_cast<Symbol>(t), d.estimates, n);
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t row = target == Target::X1   ? xa[k]
                                  : target == Target::X2 ? xb[k]
                                                         : xa[k] * l.x2 + xb[k];
          s += d(row, et[k]);
        }
        cost[(a * nb + b) * estimates + t] = s / static_cast<double>(n);
      }
    }
  }
  return cost;
}

AuxProblem make_problem(const ProbabilityTable& joint, std::size_t n, AuxKind ku, std::size_t cu,
                        AuxKind kv, std::size_t cv, std::vector<double> cost,
                        std::size_t estimates) {
  AuxProblem p;
  p.source = block_source(joint, n);
  p.kind_u = ku;
  p.kind_v = kv;
  const std::size_t na = p.source.axes()[0], nb = p.source.axes()[1];
  p.card_u = ku == AuxKind::Identity ? na : ku == AuxKind::Constant ? 1 : cu;
  p.card_v = kv == AuxKind::Identity ? nb : kv == AuxKind::Constant ? 1 : cv;
  p.estimates = estimates;
  p.cost = std::move(cost);
  const double cells = static_cast<double>(na) * static_cast<double>(nb) *
                       static_cast<double>(p.card_u) * static_cast<double>(p.card_v);
  if (cells > static_cast<double>(1u << 24)) {
    throw BudgetError("joint table exceeds 2^24 cells", std::log2(cells));
  }
  p.validate();
  return p;
}

// Same problem with the terminals' roles exchanged.
AuxProblem swapped(const AuxProblem& p) {
  AuxProblem s;
  const std::size_t na = p.size_a(), nb = p.size_b();
  std::vector<double> mass(na * nb);
  std::vector<double> cost(na * nb * p.estimates);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      mass[b * na + a] = p.source.at({a, b});
      for (std::size_t t = 0; t < p.estimates; ++t)
        cost[(b * na + a) * p.estimates + t] = p.cost[(a * nb + b) * p.estimates + t];
    }
  s.source = ProbabilityTable({nb, na}, std::move(mass));
  s.kind_u = p.kind_v;
  s.card_u = p.card_v;
  s.kind_v = p.kind_u;
  s.card_v = p.card_u;
  s.estimates = p.estimates;
  s.cost = std::move(cost);
  return s;
}

AuxWitness unswap(const AuxWitness& w) {
  AuxWitness o;
  o.q1 = w.q2;
  o.q2 = w.q1;
  const std::size_t nu = w.q1.outputs(), nv = w.q2.outputs();
  o.psi.resize(nu * nv);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t v = 0; v < nv; ++v) o.psi[v * nu + u] = w.psi[u * nv + v];
  return o;
}

// Weight vectors on the simplex lattice of `dims` coordinates with step 1/k.
std::vector<std::vector<double>> weight_grid(std::size_t dims, double step) {
  const int k = std::max(1, static_cast<int>(std::lround(1.0 / step)));
  std::vector<std::vector<double>> out;
  std::vector<int> cur(dims, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == dims) {
      cur[pos] = left;
      std::vector<double> w(dims);
      for (std::size_t i = 0; i < dims; ++i) w[i] = static_cast<double>(cur[i]) / k;
      out.push_back(std::move(w));
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, k);
  return out;
}

double per_symbol(double bits, std::size_t n) { return bits / static_cast<double>(n); }

// Adds a witness and its region points; returns the witness index.
std::size_t add_witness(Region& r, const AuxWitness& w) {
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    if (r.witnesses[i] == w) return i;
  }
  r.witnesses.push_back(w);
  const std::size_t id = r.witnesses.size() - 1;
  const AuxMeasures m = witness_measures(r, id);
  switch (r.problem) {
    case RegionProblem::Shannon:
    case RegionProblem::WynerZiv:
      r.points.push_back({{m.i_a_u_given_v, 0.0, m.cost}, id, -1});
      break;
    case RegionProblem::SideInfo:
      r.points.push_back({{m.i_a_u_given_v, m.i_b_v, 0.0}, id, -1});
      break;
    case RegionProblem::Partial:
      r.points.push_back({{m.i_a_u_given_v, m.i_b_v, m.cost}, id, -1});
      break;
    case RegionProblem::Joint:
    case RegionProblem::BergerYeung:
      r.points.push_back({{m.i_a_u, m.i_b_v_given_u, m.cost}, id, 0});
      r.points.push_back({{m.i_a_u_given_v, m.i_b_v, m.cost}, id, 1});
      break;
  }
  return id;
}

void add_anchors(Region& r) {
  const AuxProblem& p = r.aux_problem;
  for (int iu = 0; iu < 2; ++iu)
    for (int iv = 0; iv < 2; ++iv) {
      const bool u_ok = p.kind_u == AuxKind::Free || (p.kind_u == AuxKind::Identity) == (iu == 1);
      const bool v_ok = p.kind_v == AuxKind::Free || (p.kind_v == AuxKind::Identity) == (iv == 1);
      if (u_ok && v_ok) add_witness(r, anchor_witness(p, iu == 1, iv == 1));
    }
}

// Lagrangian sweep over the weight grid; `dims` is 2 for (rate, rate) or
// (rate, distortion) regions and 3 for (r1, r2, d).
void sweep(Region& r, bool allow_swap, std::size_t dims, bool distortion_axis) {
  const AuxProblem& p = r.aux_problem;
  const AuxProblem ps = allow_swap ? swapped(p) : AuxProblem{};
  const auto grid = weight_grid(dims, r.settings.grid_step);
  std::vector<AuxWitness> warm, warm_swapped;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& w = grid[i];
    double w1 = w[0], w2 = 0.0, w3 = 0.0;
    if (dims == 3) {
      w2 = w[1];
      w3 = w[2];
    } else if (distortion_axis) {
      w3 = w[1];
    } else {
      w2 = w[1];
    }
    // Rates are per block, cost per symbol: rescale so every order sweeps the
    // same per-symbol tradeoffs.
    w3 *= static_cast<double>(r.order);
    const std::uint64_t seed = derive_seed(r.settings.seed, streams::kRestart, 1000 + i);
    if (allow_swap && w2 > w1) {
      const AuxResult res = minimize_aux(ps, {w2, w1, w3}, r.settings, seed, warm_swapped);
      warm_swapped = {res.witness};
      add_witness(r, unswap(res.witness));
    } else {
      const AuxResult res = minimize_aux(p, {w1, w2, w3}, r.settings, seed, warm);
      warm = {res.witness};
      add_witness(r, res.witness);
    }
  }
}

RdSolution solve_wyner_ziv(const AuxProblem& prob, const AuxSpec& aux, std::size_t order, double D,
                           std::vector<AuxWitness>* evaluated_out) {
  std::vector<AuxWitness> evaluated;
  std::vector<AuxMeasures> measures;
  auto record = [&](const AuxWitness& w) {
    evaluated.push_back(w);
    measures.push_back(evaluate(prob, w));
    return SlopePoint{per_symbol(measures.back().i_a_u_given_v, order), measures.back().cost,
                      evaluated.size() - 1};
  };
  std::size_t calls = 0;
  std::vector<AuxWitness> warm;
  auto eval = [&](double s) {
    if (std::isinf(s)) {
      // Identity auxiliary: the smallest distortion with the side information.
      return record(anchor_witness(prob, true, true));
    }
    const AuxResult res =
        minimize_aux(prob, {1.0, 0.0, s}, aux, derive_seed(aux.seed, streams::kRestart, ++calls),
                     warm);
    warm = {res.witness};
    return record(res.witness);
  };
  RdSolution sol;
  const SlopePoint zero = record(anchor_witness(prob, false, true));
  if (zero.dist <= D + 1e-15) {
    sol.rate = zero.rate;
    sol.distortion = zero.dist;
    sol.witnesses = {evaluated[zero.tag]};
    sol.weights = {1.0};
  } else {
    const auto [hi, lo] = bracket_slope(eval, D, 60);
    if (hi.dist > D + 1e-12) {
      sol.rate = kInf;
      sol.distortion = hi.dist;
    } else {
      double w = 1.0;
      sol.rate = chord_rate(hi, lo, D, &w);
      sol.distortion = w * hi.dist + (1.0 - w) * lo.dist;
      sol.witnesses = {evaluated[hi.tag]};
      sol.weights = {w};
      if (w < 1.0) {
        sol.witnesses.push_back(evaluated[lo.tag]);
        sol.weights.push_back(1.0 - w);
      }
    }
  }
  if (evaluated_out) *evaluated_out = std::move(evaluated);
  return sol;
}

AuxProblem wyner_ziv_problem(const ProbabilityTable& joint, const DistortionCriterion& d,
                             std::size_t order, const AuxSpec& aux) {
  const Letters l = letters_of(joint);
  check_order(order, l);
  std::size_t est = 0;
  auto cost = block_cost(d, Target::X1, l, order, est);
  return make_problem(joint, order, AuxKind::Free, aux.resolved_card1(checked_power(l.x1, order)),
                      AuxKind::Identity, 0, std::move(cost), est);
}

Region new_region(RegionProblem problem, std::size_t order, std::vector<Coordinate> coords,
                  AuxProblem p, const AuxSpec& aux) {
  Region r;
  r.problem = problem;
  r.order = order;
  r.coordinates = std::move(coords);
  r.aux_problem = std::move(p);
  r.settings = aux;
  return r;
}

}  // namespace

// --- public R(D) functions ---------------------------------------------------------

double shannon_rd(const ProbabilityTable& source, const DistortionCriterion& d, double D) {
  return shannon_curve(source, d, D).rate;
}

double conditional_rd(const ProbabilityTable& joint, const DistortionCriterion& d, double D) {
  const Letters l = letters_of(joint);
  d.validate();
  require(d.targets == l.x1, "distortion rows must match |X1|");
  require(std::isfinite(D) && D >= 0.0, "distortion target must be >= 0");
  const ProbabilityTable px2 = joint.marginal({1});
  std::vector<std::vector<double>> cond(l.x2, std::vector<double>(l.x1, 0.0));
  for (std::size_t x2 = 0; x2 < l.x2; ++x2)
    for (std::size_t x1 = 0; x1 < l.x1; ++x1)
      if (px2[x2] > 0.0) cond[x2][x1] = joint.at({x1, x2}) / px2[x2];
  double dmax = 0.0, dmin = 0.0;
  for (std::size_t x2 = 0; x2 < l.x2; ++x2) {
    if (px2[x2] <= 0.0) continue;
    dmax += px2[x2] * max_distortion(cond[x2], d);
    dmin += px2[x2] * min_distortion(cond[x2], d);
  }
  if (D >= dmax - 1e-15) return 0.0;
  if (D < dmin - 1e-12) return kInf;
  auto eval = [&](double s) {
    SlopePoint pt;
    for (std::size_t x2 = 0; x2 < l.x2; ++x2) {
      if (px2[x2] <= 0.0) continue;
      const BaResult r = blahut_arimoto(cond[x2], d, s);
      pt.rate += px2[x2] * r.rate;
      pt.dist += px2[x2] * r.dist;
    }
    return pt;
  };
  const auto [hi, lo] = bracket_slope(eval, D, 200);
  return hi.dist > D + 1e-12 ? kInf : chord_rate(hi, lo, D, nullptr);
}

RdSolution wyner_ziv_solution(const ProbabilityTable& joint, const DistortionCriterion& d,
                              double D, const AuxSpec& aux, std::size_t order) {
  aux.validate();
  require(std::isfinite(D) && D >= 0.0, "distortion target must be >= 0");
  const AuxProblem prob = wyner_ziv_problem(joint, d, order, aux);
  return solve_wyner_ziv(prob, aux, order, D, nullptr);
}

double wyner_ziv_rd(const ProbabilityTable& joint, const DistortionCriterion& d, double D,
                    const AuxSpec& aux, std::size_t order) {
  return wyner_ziv_solution(joint, d, D, aux, order).rate;
}

// --- regions ---------------------------------------------------------------------------

const char* to_string(RegionProblem p) {
  switch (p) {
    case RegionProblem::Shannon: return "shannon";
    case RegionProblem::WynerZiv: return "wynerZiv";
    case RegionProblem::SideInfo: return "sideInfo";
    case RegionProblem::BergerYeung: return "bergerYeung";
    case RegionProblem::Joint: return "joint";
    case RegionProblem::Partial: return "partial";
  }
  return "?";
}

RegionProblem region_problem_from_string(const std::string& s) {
  for (RegionProblem p : {RegionProblem::Shannon, RegionProblem::WynerZiv, RegionProblem::SideInfo,
                          RegionProblem::BergerYeung, RegionProblem::Joint, RegionProblem::Partial}) {
    if (s == to_string(p)) return p;
  }
  throw ValidationError("unknown region problem \"" + s + "\"");
}

std::vector<double> Region::coords(const RateDistortionPoint& p) const {
  std::vector<double> c;
  for (Coordinate k : coordinates) c.push_back(p[k]);
  return c;
}

AuxMeasures witness_measures(const Region& region, std::size_t i) {
  require(i < region.witnesses.size(), "witness index out of range");
  AuxMeasures m = evaluate(region.aux_problem, region.witnesses[i]);
  const std::size_t n = region.order;
  m.i_a_u = per_symbol(m.i_a_u, n);
  m.i_b_v = per_symbol(m.i_b_v, n);
  m.i_a_u_given_v = per_symbol(m.i_a_u_given_v, n);
  m.i_b_v_given_u = per_symbol(m.i_b_v_given_u, n);
  m.i_ab_uv = per_symbol(m.i_ab_uv, n);
  return m;
}

bool reverify(const Region& region, const RegionPoint& pt, double tol) {
  const AuxMeasures m = witness_measures(region, pt.witness);
  const RateDistortionPoint& p = pt.point;
  switch (region.problem) {
    case RegionProblem::Shannon:
    case RegionProblem::WynerZiv:
      return p.r1 >= m.i_a_u_given_v - tol && p.d >= m.cost - tol;
    case RegionProblem::SideInfo:
      return p.r1 >= m.i_a_u_given_v - tol && p.r2 >= m.i_b_v - tol;
    case RegionProblem::Partial:
      return p.r1 >= m.i_a_u_given_v - tol && p.r2 >= m.i_b_v - tol && p.d >= m.cost - tol;
    case RegionProblem::Joint:
    case RegionProblem::BergerYeung:
      return p.r1 >= m.i_a_u_given_v - tol && p.r2 >= m.i_b_v_given_u - tol &&
             p.r1 + p.r2 >= m.i_ab_uv - tol && p.d >= m.cost - tol;
  }
  return false;
}

Region side_info_region(const ProbabilityTable& joint, const AuxSpec& aux) {
  aux.validate();
  const Letters l = letters_of(joint);
  AuxProblem p = make_problem(joint, 1, AuxKind::Identity, 0, AuxKind::Free,
                              aux.resolved_card2(l.x2), std::vector<double>(l.x1 * l.x2, 0.0), 1);
  Region r = new_region(RegionProblem::SideInfo, 1, {Coordinate::R1, Coordinate::R2}, std::move(p), aux);
  add_anchors(r);
  sweep(r, false, 2, false);
  return r;
}

Region berger_yeung_region(const ProbabilityTable& joint, const DistortionCriterion& d,
                           const AuxSpec& aux) {
  aux.validate();
  const Letters l = letters_of(joint);
  std::size_t est = 0;
  auto cost = block_cost(d, Target::X2, l, 1, est);
  AuxProblem p = make_problem(joint, 1, AuxKind::Identity, 0, AuxKind::Free,
                              aux.resolved_card2(l.x2), std::move(cost), est);
  Region r = new_region(RegionProblem::BergerYeung, 1,
                        {Coordinate::R1, Coordinate::R2, Coordinate::D}, std::move(p), aux);
  add_anchors(r);
  sweep(r, true, 3, true);
  return r;
}

Region joint_inner_region(const ProbabilityTable& source, const DistortionCriterion& d,
                          std::size_t order, const AuxSpec& aux) {
  aux.validate();
  const Letters l = letters_of(source);
  check_order(order, l);
  std::size_t est = 0;
  auto cost = block_cost(d, Target::Pair, l, order, est);
  AuxProblem p = make_problem(source, order, AuxKind::Free,
                              aux.resolved_card1(checked_power(l.x1, order)), AuxKind::Free,
                              aux.resolved_card2(checked_power(l.x2, order)), std::move(cost), est);
  Region r = new_region(RegionProblem::Joint, order,
                        {Coordinate::R1, Coordinate::R2, Coordinate::D}, std::move(p), aux);
  add_anchors(r);
  sweep(r, true, 3, true);
  return r;
}

Region partial_inner_region(const ProbabilityTable& joint, const DistortionCriterion& d,
                            std::size_t order, const AuxSpec& aux) {
  aux.validate();
  const Letters l = letters_of(joint);
  check_order(order, l);
  std::size_t est = 0;
  auto cost = block_cost(d, Target::X1, l, order, est);
  AuxProblem p = make_problem(joint, order, AuxKind::Free,
                              aux.resolved_card1(checked_power(l.x1, order)), AuxKind::Free,
                              aux.resolved_card2(checked_power(l.x2, order)), std::move(cost), est);
  Region r = new_region(RegionProblem::Partial, order,
                        {Coordinate::R1, Coordinate::R2, Coordinate::D}, std::move(p), aux);
  add_anchors(r);
  sweep(r, false, 3, true);
  return r;
}

Region wyner_ziv_region(const ProbabilityTable& joint, const DistortionCriterion& d,
                        std::size_t order, const AuxSpec& aux, const std::vector<double>& targets) {
  aux.validate();
  Region r = new_region(RegionProblem::WynerZiv, order, {Coordinate::R1, Coordinate::D},
                        wyner_ziv_problem(joint, d, order, aux), aux);
  add_anchors(r);
  sweep(r, false, 2, true);
  for (double D : targets) {
    require(std::isfinite(D) && D >= 0.0, "distortion target must be >= 0");
    const RdSolution s = solve_wyner_ziv(r.aux_problem, aux, order, D, nullptr);
    for (const auto& w : s.witnesses) add_witness(r, w);
  }
  return r;
}

Region shannon_region(const ProbabilityTable& source, const DistortionCriterion& d,
                      const std::vector<double>& targets) {
  const ProbabilityTable flat = source.rank() == 1 ? source : source.flattened();
  const std::size_t nx = flat.cell_count();
  d.validate();
  require(d.targets == nx, "distortion rows must match the source alphabet");
  AuxProblem p;
  p.source = ProbabilityTable({nx, 1}, single_axis(flat));
  p.kind_u = AuxKind::Free;
  p.card_u = d.estimates;
  p.kind_v = AuxKind::Constant;
  p.card_v = 1;
  p.estimates = d.estimates;
  p.cost.resize(nx * d.estimates);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t z = 0; z < d.estimates; ++z) p.cost[x * d.estimates + z] = d(x, z);
  p.validate();
  AuxSpec spec;
  Region r = new_region(RegionProblem::Shannon, 1, {Coordinate::R1, Coordinate::D}, p, spec);
  auto add_q = [&](const std::vector<double>& q) {
    AuxWitness w;
    w.q1 = ConditionalTable(nx, d.estimates, q);
    w.q2 = ConditionalTable::constant(1);
    w.psi.resize(d.estimates);
    for (std::size_t z = 0; z < d.estimates; ++z) w.psi[z] = static_cast<std::uint32_t>(z);
    add_witness(r, w);
  };
  for (double D : targets) {
    ShannonCurve c = shannon_curve(flat, d, D);
    if (c.evaluated.empty()) continue;
    add_q(c.evaluated[c.hi.tag].q);
    if (c.lo.tag != c.hi.tag) add_q(c.evaluated[c.lo.tag].q);
  }
  return r;
}

Region corner_region(const ChainModel& model) {
  const CornerRates c = corner_rates(model);
  AuxProblem p;
  p.source = model.block_source();
  p.kind_u = AuxKind::Free;
  p.card_u = model.aux1.outputs();
  p.kind_v = AuxKind::Free;
  p.card_v = model.aux2.outputs();
  p.estimates = 1;
  p.cost.assign(p.size_a() * p.size_b(), 0.0);
  Region r = new_region(RegionProblem::Joint, model.block_order,
                        {Coordinate::R1, Coordinate::R2}, std::move(p), AuxSpec{});
  AuxWitness w{model.aux1, model.aux2, std::vector<std::uint32_t>(r.aux_problem.card_u * r.aux_problem.card_v, 0)};
  r.witnesses.push_back(w);
  const double n = static_cast<double>(model.block_order);
  r.points.push_back({{c.corner0.r1 / n, c.corner0.r2 / n, 0.0}, 0, 0});
  r.points.push_back({{c.corner1.r1 / n, c.corner1.r2 / n, 0.0}, 0, 1});
  return r;
}

// --- queries ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> pareto_cloud(const Region& r) {
  std::vector<std::vector<double>> pts;
  for (const auto& p : r.points) pts.push_back(r.coords(p.point));
  return pts;
}

}  // namespace

double region_minimum(const Region& region, Coordinate target, const std::vector<double>& bounds) {
  const auto& cs = region.coordinates;
  require(bounds.size() == cs.size(), "bounds must list every active coordinate");
  const auto it = std::find(cs.begin(), cs.end(), target);
  require(it != cs.end(), "target coordinate is not active in this region");
  if (region.points.empty()) return kInf;
  const std::size_t ti = static_cast<std::size_t>(it - cs.begin());
  const auto pts = pareto_cloud(region);
  detail::LinearProgram lp;
  for (const auto& p : pts) lp.c.push_back(p[ti]);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (k == ti) continue;
    std::vector<double> row;
    for (const auto& p : pts) row.push_back(p[k]);
    lp.add(std::move(row), detail::LinearProgram::Sense::Le, bounds[k]);
  }
  lp.add(std::vector<double>(pts.size(), 1.0), detail::LinearProgram::Sense::Eq, 1.0);
  const auto sol = detail::solve(lp);
  return sol.status == detail::LpSolution::Status::Optimal ? sol.value : kInf;
}

namespace detail {

// Smallest t with p + t (1, ..., 1) in conv(pts) + orthant.
double shift_to_closure(const std::vector<std::vector<double>>& pts, const std::vector<double>& p) {
  const std::size_t m = pts.size(), k = p.size();
  detail::LinearProgram lp;
  lp.c.assign(m + 2, 0.0);
  lp.c[m] = 1.0;
  lp.c[m + 1] = -1.0;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> row(m + 2, 0.0);
    for (std::size_t j = 0; j < m; ++j) row[j] = pts[j][i];
    row[m] = -1.0;
    row[m + 1] = 1.0;
    lp.add(std::move(row), detail::LinearProgram::Sense::Le, p[i]);
  }
  std::vector<double> ones(m + 2, 0.0);
  std::fill(ones.begin(), ones.begin() + static_cast<std::ptrdiff_t>(m), 1.0);
  lp.add(std::move(ones), detail::LinearProgram::Sense::Eq, 1.0);
  const auto sol = detail::solve(lp);
  return sol.status == detail::LpSolution::Status::Optimal ? sol.value : kInf;
}

// Drops points dominated by another point of the cloud.
std::vector<std::vector<double>> minimal_points(std::vector<std::vector<double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      bool le = true;
      for (std::size_t k = 0; k < pts[i].size() && le; ++k) le = pts[j][k] <= pts[i][k];
      dominated = le;
    }
    if (!dominated) out.push_back(pts[i]);
  }
  return out;
}

}  // namespace detail

ContainmentReport check_containment(const Region& inner, const Region& outer, double tol) {
  if (inner.coordinates != outer.coordinates) {
    throw ValidationError("containment check needs regions over the same coordinates");
  }
  ContainmentReport rep;
  rep.contained = true;
  if (inner.points.empty()) return rep;
  if (outer.points.empty()) {
    rep.contained = false;
    rep.worst_violation = kInf;
    return rep;
  }
  const auto outer_pts = detail::minimal_points(pareto_cloud(outer));
  for (std::size_t i = 0; i < inner.points.size(); ++i) {
    const double t = std::max(0.0, detail::shift_to_closure(outer_pts, inner.coords(inner.points[i].point)));
    if (t > rep.worst_violation) {
      rep.worst_violation = t;
      rep.worst_point = i;
    }
  }
  rep.contained = rep.worst_violation <= tol;
  return rep;
}

SingleLetterizationReport single_letterization_check(const ProbabilityTable& joint,
                                                     const DistortionCriterion& d,
                                                     const std::vector<double>& targets,
                                                     const AuxSpec& aux) {
  SingleLetterizationReport rep;
  rep.targets = targets;
  rep.order1 = wyner_ziv_region(joint, d, 1, aux, targets);
  rep.order2 = wyner_ziv_region(joint, d, 2, aux, targets);
  for (double D : targets) {
    rep.rate_order1.push_back(region_minimum(rep.order1, Coordinate::R1, {0.0, D}));
    rep.rate_order2.push_back(region_minimum(rep.order2, Coordinate::R1, {0.0, D}));
  }
  rep.containment = check_containment(rep.order2, rep.order1, kSingleLetterTolerance);
  rep.holds = rep.containment.contained;
  return rep;
}

// --- export --------------------------------------------------------------------------------

std::string region_csv_header() { return "problem,order,r1,r2,d,witnessId"; }

std::vector<std::string> region_csv_rows(const Region& region) {
  std::vector<std::string> rows;
  for (const auto& p : region.points) {
    rows.push_back(std::string(to_string(region.problem)) + ',' + std::to_string(region.order) +
                   ',' + format_float(p.point.r1) + ',' + format_float(p.point.r2) + ',' +
                   format_float(p.point.d) + ',' + std::to_string(p.witness));
  }
  return rows;
}

std::string witnesses_json(const Region& region) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < region.witnesses.size(); ++i) {
    const AuxWitness& w = region.witnesses[i];
    j[std::to_string(i)] = {{"q1", detail::conditional_table_to(w.q1)},
                            {"q2", detail::conditional_table_to(w.q2)},
                            {"psi", w.psi}};
  }
  return j.dump();
}

}  // namespace tslab
