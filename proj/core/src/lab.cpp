#include <chrono>
#include <fstream>

#include "tslab/binned_code.hpp"
#include "tslab/lab.hpp"
#include "tslab/point_code.hpp"
#include "tslab/region.hpp"
#include "tslab/rng.hpp"
#include "tslab/typicality.hpp"

#ifndef TSLAB_VERSION
#define TSLAB_VERSION "0.0.0"
#endif

namespace tslab {

const char* version() { return TSLAB_VERSION; }

const char* to_string(Command c) {
  switch (c) {
    case Command::Info: return "info";
    case Command::Region: return "region";
    case Command::Simulate: return "simulate";
    case Command::Verify: return "verify";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::Info, Command::Region, Command::Simulate, Command::Verify}) {
    if (s == to_string(c)) return c;
  }
  throw ValidationError("unknown command \"" + s + "\"");
}

namespace {

using I = std::int64_t;

template <typename T>
I as_int(T v) {
  return static_cast<I>(v);
}

const DistortionCriterion& need_distortion(const LabConfig& c) {
  if (!c.distortion) throw ValidationError("this run needs a distortion matrix");
  return *c.distortion;
}

const ConditionalTable& need_channel(const std::optional<ConditionalTable>& t, const char* name) {
  if (!t) throw ValidationError(std::string("this run needs channels.") + name);
  return *t;
}

void need_schedule(const LabConfig& c) {
  if (c.schedule.empty()) throw ValidationError("this run needs a nonempty schedule");
}

ProbabilityTable pair_source(const LabConfig& c) {
  require(c.source.rank() == 2, "this run needs a two-axis source p(x1, x2)");
  return c.source;
}

ProbabilityTable first_marginal(const LabConfig& c) {
  return c.source.rank() == 1 ? c.source : c.source.marginal({0});
}

AuxSpec aux_of(const LabConfig& c) {
  AuxSpec a = c.aux;
  a.seed = c.seed;
  return a;
}

// --- info ------------------------------------------------------------------------------

Report info_report(const LabConfig& c) {
  Report r{"info", {}, {}};
  ReportTable t{"info", {"quantity", "value"}, {}};
  if (c.source.rank() == 1) {
    t.add_row({"H(X)", entropy(c.source, {0})});
  } else {
    const ProbabilityTable& p = c.source;
    t.add_row({"H(X1)", entropy(p, {0})});
    t.add_row({"H(X2)", entropy(p, {1})});
    t.add_row({"H(X1,X2)", entropy(p, {0, 1})});
    t.add_row({"H(X1|X2)", conditional_entropy(p, {0}, {1})});
    t.add_row({"H(X2|X1)", conditional_entropy(p, {1}, {0})});
    t.add_row({"I(X1;X2)", mutual_information(p, {0}, {1})});
    if (c.aux1 && c.aux2) {
      const ChainModel m = compose_chain(p, *c.aux1, *c.aux2, c.order);
      for (const auto& [name, value] : summarize(m).entries()) t.add_row({name, value});
      const CornerRates cr = corner_rates(m);
      const double n = static_cast<double>(c.order);
      t.add_row({"corner0.r1", cr.corner0.r1 / n});
      t.add_row({"corner0.r2", cr.corner0.r2 / n});
      t.add_row({"corner1.r1", cr.corner1.r1 / n});
      t.add_row({"corner1.r2", cr.corner1.r2 / n});
    }
  }
  r.tables.push_back(std::move(t));
  return r;
}

// --- region ----------------------------------------------------------------------------

Region build_region(const LabConfig& c, RegionProblem p) {
  const AuxSpec a = aux_of(c);
  switch (p) {
    case RegionProblem::Shannon:
      return shannon_region(c.source, need_distortion(c), c.targets);
    case RegionProblem::WynerZiv:
      return wyner_ziv_region(pair_source(c), need_distortion(c), c.order, a, c.targets);
    case RegionProblem::SideInfo:
      return side_info_region(pair_source(c), a);
    case RegionProblem::BergerYeung:
      return berger_yeung_region(pair_source(c), need_distortion(c), a);
    case RegionProblem::Joint:
      return joint_inner_region(pair_source(c), need_distortion(c), c.order, a);
    case RegionProblem::Partial:
      return partial_inner_region(pair_source(c), need_distortion(c), c.order, a);
  }
  throw ValidationError("unsupported region problem");
}

Report region_report(const LabConfig& c) {
  if (c.problem.empty()) throw ValidationError("region needs a problem");
  const RegionProblem p = region_problem_from_string(c.problem);
  const Region region = build_region(c, p);
  Report r{"region", {}, {}};
  ReportTable pts{"region", {"problem", "order", "r1", "r2", "d", "witnessId"}, {}};
  for (const auto& pt : region.points) {
    pts.add_row({c.problem, as_int(region.order), pt.point.r1, pt.point.r2, pt.point.d,
                 as_int(pt.witness)});
  }
  ReportTable corners{"corners", {"problem", "order", "r1", "r2", "d", "witnessId"}, {}};
  if (!region.points.empty()) {
    for (std::size_t i : hull_and_corners(region).corners) {
      const RegionPoint& pt = region.points[i];
      corners.add_row({c.problem, as_int(region.order), pt.point.r1, pt.point.r2, pt.point.d,
                       as_int(pt.witness)});
    }
  }
  r.tables.push_back(std::move(pts));
  r.tables.push_back(std::move(corners));
  if (p == RegionProblem::Shannon || p == RegionProblem::WynerZiv) {
    ReportTable curve{"curve", {"problem", "order", "d", "rate"}, {}};
    for (double D : c.targets) {
      const double rate = p == RegionProblem::Shannon
                              ? shannon_rd(c.source, need_distortion(c), D)
                              : region_minimum(region, Coordinate::R1, {0.0, D});
      curve.add_row({c.problem, as_int(region.order), D, rate});
    }
    r.tables.push_back(std::move(curve));
  }
  r.documents.emplace_back("witnesses", witnesses_json(region));
  return r;
}

// --- simulate ----------------------------------------------------------------------------

ReportTable point_table(const PointCodeSchedule& s) {
  ReportTable t{"simulate",
                {"nPrime", "codebookSize", "rate", "epsilon", "epsilon1", "trials", "failures",
                 "failureRate", "sigma", "atypicalInput", "proofBound", "seed"},
                {}};
  for (const auto& p : s.points) {
    t.add_row({as_int(p.n_prime), as_int(p.codebook_size), p.rate, p.epsilon, p.epsilon1,
               as_int(p.trials), as_int(p.failures), p.failure_rate(), p.sigma(),
               p.atypical_input_probability, p.proof_bound, std::to_string(p.seed)});
  }
  return t;
}

ReportTable binned_table(const BinnedSchedule& s) {
  ReportTable t{"simulate",
                {"nPrime", "trials", "e0", "e1", "e2", "e3", "overall", "unionViolations", "k1",
                 "k2", "rate", "secondMoment", "overallRate", "sigma", "seed"},
                {}};
  for (const auto& p : s.points) {
    t.add_row({as_int(p.n_prime), as_int(p.trials), as_int(p.e0), as_int(p.e1), as_int(p.e2),
               as_int(p.e3), as_int(p.overall), as_int(p.union_violations), as_int(p.k1),
               as_int(p.k2), p.rate, p.second_moment, p.overall_rate(), p.sigma(),
               std::to_string(p.seed)});
  }
  return t;
}

ExperimentSpec experiment_spec(const LabConfig& c) {
  ExperimentSpec s;
  s.problem = problem_from_string(c.problem);
  const ProbabilityTable src = pair_source(c);
  const std::size_t a1 = src.axes()[0], a2 = src.axes()[1];
  const std::size_t b1 = checked_power(a1, c.order), b2 = checked_power(a2, c.order);
  // Lossless terminals default to identity auxiliaries.
  const bool id1 = s.problem == Problem::SlepianWolf || s.problem == Problem::BergerYeung;
  const bool id2 = s.problem == Problem::SlepianWolf || s.problem == Problem::WynerZiv;
  ConditionalTable q1 = c.aux1 ? *c.aux1
                               : (id1 ? ConditionalTable::identity(b1)
                                      : need_channel(c.aux1, "aux1"));
  ConditionalTable q2 = c.aux2 ? *c.aux2
                               : (id2 ? ConditionalTable::identity(b2)
                                      : need_channel(c.aux2, "aux2"));
  s.model = compose_chain(src, std::move(q1), std::move(q2), c.order);
  if (s.problem != Problem::SlepianWolf) {
    s.distortion = need_distortion(c);
    s.psi.z1 = s.model.aux1.outputs();
    s.psi.z2 = s.model.aux2.outputs();
    s.psi.block_order = c.order;
    switch (s.problem) {
      case Problem::Joint: s.psi.component_alphabets = {a1, a2}; break;
      case Problem::BergerYeung: s.psi.component_alphabets = {a2}; break;
      default: s.psi.component_alphabets = {a1}; break;
    }
    if (c.psi.size() != s.psi.z1 * s.psi.z2) {
      throw ValidationError("psi needs |Z1| x |Z2| = " + std::to_string(s.psi.z1 * s.psi.z2) +
                            " entries");
    }
    s.psi.table = c.psi;
  }
  s.eps = c.epsilons;
  s.schedule = c.schedule;
  s.trials = c.trials;
  s.seed = c.seed;
  s.lambda = c.lambda;
  s.super_blocks = c.super_blocks;
  return s;
}

Report simulate_report(const LabConfig& c) {
  if (c.problem.empty()) throw ValidationError("simulate needs a problem");
  need_schedule(c);
  Report r{"simulate", {}, {}};
  if (c.problem == "point") {
    const PointModel m{first_marginal(c), need_channel(c.aux1, "aux1")};
    const auto s = point_code_schedule(m, c.epsilons.epsilon, c.epsilons.epsilon1, c.schedule,
                                       c.trials, c.seed);
    r.tables.push_back(point_table(s));
    return r;
  }
  if (c.problem == "binned") {
    const BinnedModel m{pair_source(c), need_channel(c.aux1, "aux1")};
    const auto s = binned_schedule(m, c.epsilons.epsilon, c.schedule, c.trials, c.seed);
    r.tables.push_back(binned_table(s));
    return r;
  }
  const ExperimentReport rep = run_rd_experiment(experiment_spec(c));
  ReportTable t{"simulate",
                {"problem", "n", "nPrime", "lambda", "r1", "r2", "targetD", "measuredD",
                 "measuredSigma", "errorRate", "delta", "trials", "seed"},
                {}};
  for (const auto& row : rep.rows) {
    t.add_row({std::string(to_string(row.problem)), as_int(row.n), as_int(row.n_prime),
               row.lambda, row.r1, row.r2, row.target_d, row.measured_d, row.measured_sigma,
               row.error_rate, row.delta, as_int(row.trials), std::to_string(row.seed)});
  }
  r.tables.push_back(std::move(t));
  return r;
}

// --- verify -----------------------------------------------------------------------------

struct Checks {
  ReportTable table{"verify", {"suite", "check", "value", "passed"}, {}};
  std::vector<std::string> failures;

  void add(const std::string& suite, const std::string& check, double value, bool ok) {
    table.add_row({suite, check, value, as_int(ok)});
    if (!ok) failures.push_back(suite + ": " + check);
  }
};

void verify_identities(const LabConfig& c, Report& r, Checks& k) {
  ReportTable t{"identities",
                {"model", "gap0", "gap1", "conditioningOk", "decompositionOk"},
                {}};
  std::size_t passed = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < c.models; ++i) {
    const ChainModel m = random_chain_model(2, 2, 2, 2, derive_seed(c.seed, streams::kSource, i));
    const ChainIdentityReport rep = chain_identity_check(m);
    t.add_row({as_int(i), rep.decomposition_gap0, rep.decomposition_gap1,
               as_int(rep.conditioning_ok),
               as_int(rep.decomposition_ok)});
    passed += rep.passed();
    worst = std::max({worst, rep.decomposition_gap0, rep.decomposition_gap1});
  }
  r.tables.push_back(std::move(t));
  k.add("identities", "models passing", static_cast<double>(passed), passed == c.models);
  k.add("identities", "worst decomposition gap", worst, worst <= 1e-10);
}

void verify_typicality(const LabConfig& c, Report& r, Checks& k) {
  need_schedule(c);
  const SandwichSchedule s = sandwich_schedule(pair_source(c), c.epsilons.epsilon, c.schedule);
  ReportTable t{"typicality",
                {"n", "epsilon", "probability", "mutualInformation", "epsilon1", "lower", "upper",
                 "holds"},
                {}};
  bool all = true;
  for (const auto& p : s.points) {
    t.add_row({as_int(p.n), p.epsilon, p.probability, p.mutual_information, p.epsilon1, p.lower,
               p.upper, as_int(p.holds)});
    all = all && p.holds;
  }
  r.tables.push_back(std::move(t));
  k.add("typicality", "sandwich holds", all ? 1.0 : 0.0, all);
  k.add("typicality", "epsilon1 shrinking", s.shrinking ? 1.0 : 0.0, s.shrinking);
}

void verify_containment(const LabConfig& c, Report& r, Checks& k) {
  if (c.targets.empty()) throw ValidationError("containment suite needs distortion targets");
  const SingleLetterizationReport s =
      single_letterization_check(pair_source(c), need_distortion(c), c.targets, aux_of(c));
  ReportTable t{"containment", {"d", "rateOrder1", "rateOrder2"}, {}};
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    t.add_row({s.targets[i], s.rate_order1[i], s.rate_order2[i]});
  }
  r.tables.push_back(std::move(t));
  k.add("containment", "worst violation", s.containment.worst_violation, s.holds);
}

void verify_coding(const LabConfig& c, Report& r, Checks& k) {
  need_schedule(c);
  const ConditionalTable& q1 = need_channel(c.aux1, "aux1");
  const PointModel pm{first_marginal(c), q1};
  const auto ps = point_code_schedule(pm, c.epsilons.epsilon, c.epsilons.epsilon1, c.schedule,
                                      c.trials, c.seed);
  ReportTable pt = point_table(ps);
  pt.name = "coding_point";
  r.tables.push_back(std::move(pt));
  k.add("coding", "point failure rate nonincreasing", ps.nonincreasing ? 1.0 : 0.0,
        ps.nonincreasing);
  if (c.source.rank() == 2) {
    const BinnedModel bm{c.source, q1};
    const auto bs = binned_schedule(bm, c.epsilons.epsilon, c.schedule, c.trials, c.seed);
    ReportTable bt = binned_table(bs);
    bt.name = "coding_binned";
    r.tables.push_back(std::move(bt));
    k.add("coding", "binned error rate nonincreasing", bs.nonincreasing ? 1.0 : 0.0,
          bs.nonincreasing);
    k.add("coding", "union accounting", bs.union_accounting ? 1.0 : 0.0, bs.union_accounting);
  }
}

Report verify_report(const LabConfig& c, std::vector<std::string>* failures) {
  Report r{"verify", {}, {}};
  Checks k;
  if (c.suite == "identities") {
    verify_identities(c, r, k);
  } else if (c.suite == "typicality") {
    verify_typicality(c, r, k);
  } else if (c.suite == "containment") {
    verify_containment(c, r, k);
  } else if (c.suite == "coding") {
    verify_coding(c, r, k);
  } else {
    throw ValidationError("suite must be one of typicality, identities, containment, coding");
  }
  r.tables.insert(r.tables.begin(), std::move(k.table));
  if (failures) *failures = std::move(k.failures);
  return r;
}

}  // namespace

Report compute(Command command, const LabConfig& config, std::vector<std::string>* failures) {
  if (failures) failures->clear();
  switch (command) {
    case Command::Info: return info_report(config);
    case Command::Region: return region_report(config);
    case Command::Simulate: return simulate_report(config);
    case Command::Verify: return verify_report(config, failures);
  }
  throw ValidationError("unknown command");
}

RunManifest run(Command command, const LabConfig& config, const std::filesystem::path& out,
                OutputFormat format) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.command = to_string(command);
  m.version = version();
  m.config_hash = config_hash(config);
  m.config = serialize_config(config);
  const Report report = compute(command, config, &m.failures);
  m.passed = m.failures.empty();
  for (const auto& p : emit_results(report, format, out, {m.version, m.config_hash})) {
    m.outputs.push_back(p.filename().string());
  }
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream f(out / "manifest.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out / "manifest.json").string());
    f << to_json(m);
  }
  if (!m.passed) {
    std::string what = "verify suite failed:";
    for (const auto& f : m.failures) what += " [" + f + "]";
    throw AssertionFailure(what);
  }
  return m;
}

}  // namespace tslab
