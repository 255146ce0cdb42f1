#include "tslab/two_terminal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tslab/errors.hpp"
#include "tslab/format.hpp"
#include "tslab/parallel.hpp"

namespace tslab {

CornerRates corner_rates(const ChainModel& model) {
  const ChainIdentityReport r = chain_identity_check(model);
  CornerRates c;
  c.corner0 = {r.i_y1_z1, r.i_y2_z2_given_z1};
  c.corner1 = {r.i_y1_z1_given_z2, r.i_y2_z2};
  c.sum_rate = r.i_y1y2_z1z2;
  return c;
}

// --- distortion and reconstruction ---------------------------------------------

void DistortionCriterion::validate() const {
  require(targets >= 1 && estimates >= 1, "distortion matrix dimensions must be >= 1");
  require(d.size() == targets * estimates, "distortion matrix size mismatch");
  require(std::isfinite(d_max) && d_max > 0.0, "d_max must be positive");
  for (double v : d) {
    require(std::isfinite(v) && v >= 0.0 && v <= d_max, "distortion entries must lie in [0, d_max]");
  }
}

DistortionCriterion DistortionCriterion::hamming(std::size_t size) {
  DistortionCriterion c;
  c.targets = c.estimates = size;
  c.d.assign(size * size, 1.0);
  for (std::size_t i = 0; i < size; ++i) c.d[i * size + i] = 0.0;
  c.d_max = 1.0;
  return c;
}

std::size_t ReconstructionMap::target_size() const {
  std::size_t t = 1;
  for (std::size_t a : component_alphabets) t *= checked_power(a, block_order);
  return t;
}

void ReconstructionMap::validate() const {
  require(z1 >= 1 && z2 >= 1, "reconstruction domain sizes must be >= 1");
  require(!component_alphabets.empty(), "reconstruction needs at least one target component");
  require(block_order >= 1, "reconstruction block order must be >= 1");
  require(table.size() == z1 * z2, "reconstruction table size must equal |Z1| * |Z2|");
  const std::size_t t = target_size();
  for (auto v : table) require(v < t, "reconstruction value outside the target alphabet");
}

ReconstructionMap ReconstructionMap::constant(std::size_t z1, std::size_t z2,
                                              std::vector<std::size_t> components, std::size_t n,
                                              std::uint32_t value) {
  ReconstructionMap m{z1, z2, std::move(components), n, std::vector<std::uint32_t>(z1 * z2, value)};
  m.validate();
  return m;
}

std::size_t target_letter(const ReconstructionMap& psi, std::uint32_t t, std::size_t component,
                          std::size_t k) {
  std::size_t stride = 1;
  for (std::size_t c = psi.component_alphabets.size(); c-- > component + 1;) {
    stride *= checked_power(psi.component_alphabets[c], psi.block_order);
  }
  const std::size_t base = psi.component_alphabets[component];
  const std::size_t super = (t / stride) % checked_power(base, psi.block_order);
  return (super / checked_power(base, psi.block_order - 1 - k)) % base;
}

SequenceTuple apply_reconstruction(const ReconstructionMap& psi, const SymbolSequence& z1,
                                   const SymbolSequence& z2) {
  psi.validate();
  require(z1.size() == z2.size(), "auxiliary words differ in length");
  require(z1.alphabet == psi.z1 && z2.alphabet == psi.z2,
          "auxiliary alphabets do not match the reconstruction domain");
  const std::size_t n = psi.block_order;
  SequenceTuple out;
  for (std::size_t a : psi.component_alphabets) out.push_back({a, std::vector<Symbol>(z1.size() * n)});
  for (std::size_t i = 0; i < z1.size(); ++i) {
    require(z1.symbols[i] < psi.z1 && z2.symbols[i] < psi.z2, "auxiliary symbol out of range");
    const std::uint32_t t = psi(z1.symbols[i], z2.symbols[i]);
    for (std::size_t c = 0; c < out.size(); ++c) {
      for (std::size_t k = 0; k < n; ++k) {
        out[c].symbols[i * n + k] = static_cast<Symbol>(target_letter(psi, t, c, k));
      }
    }
  }
  return out;
}

// --- schemes ----------------------------------------------------------------------

SchemeEpsilons SchemeEpsilons::resolved() const {
  require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be > 0");
  SchemeEpsilons e = *this;
  if (e.epsilon1 <= 0.0) e.epsilon1 = epsilon / 2;
  if (e.epsilon4 <= 0.0) e.epsilon4 = epsilon / 2;
  return e;
}

struct CornerCoders {
  std::size_t yf = 0, ys = 1, zf = 2, zs = 3;  // joint axes of first/second source and aux
  ProbabilityTable joint;
  PointEncoder first;
  PointEncoder second;
  BinDecoder decoder;
  JointTester source;
  JointTester quadruple;
};

double CornerScheme::rate1() const {
  const double nn = static_cast<double>(model.block_order * n_prime);
  return (corner == 0 ? point_sizing.log2_size : static_cast<double>(bin_sizing.log2_k2)) / nn;
}

double CornerScheme::rate2() const {
  const double nn = static_cast<double>(model.block_order * n_prime);
  return (corner == 0 ? static_cast<double>(bin_sizing.log2_k2) : point_sizing.log2_size) / nn;
}

TwoTerminalScheme build_corner_scheme(const ChainModel& model, int which_corner,
                                      const SchemeEpsilons& eps, std::size_t n_prime,
                                      std::uint64_t seed) {
  require(which_corner == 0 || which_corner == 1, "corner must be 0 or 1");
  require(n_prime >= 1, "n' must be >= 1");
  const SchemeEpsilons e = eps.resolved();
  const ProbabilityTable joint = model.joint();
  if (!verify_factorization(joint).factorizes) {
    throw ValidationError("two-terminal scheme needs a factorizing model");
  }
  using namespace chain_axis;
  const std::size_t yf = which_corner == 0 ? kY1 : kY2;
  const std::size_t ys = which_corner == 0 ? kY2 : kY1;
  const std::size_t zf = which_corner == 0 ? kZ1 : kZ2;
  const std::size_t zs = which_corner == 0 ? kZ2 : kZ1;

  auto s = std::make_shared<CornerScheme>();
  s->corner = which_corner;
  s->model = model;
  s->eps = e;
  s->n_prime = n_prime;
  s->seed = seed;

  const ProbabilityTable first_law = joint.marginal({yf, zf});
  s->point_sizing = choose_codebook_size(mutual_information(first_law, {0}, {1}), e.epsilon1,
                                         n_prime);
  s->point = generate_codebook(s->point_sizing, joint.marginal({zf}), seed, streams::kCodebook);

  // Binned stage: source Ys, auxiliary Zs, decoder side information Z-hat first.
  const ProbabilityTable second_law = joint.marginal({ys, zs});
  const ProbabilityTable side_law = joint.marginal({zf, zs});
  s->bin_sizing = choose_bin_sizes(mutual_information(second_law, {0}, {1}),
                                   mutual_information(side_law, {0}, {1}), e.epsilon1, e.epsilon4,
                                   n_prime);
  s->binned = generate_binned_codebook(s->bin_sizing, joint.marginal({zs}), seed,
                                       streams::kSecondCodebook, streams::kSecondBinMap);

  const TypicalityParams params{e.epsilon, n_prime};
  s->coders = std::make_shared<CornerCoders>(CornerCoders{
      yf, ys, zf, zs, joint, PointEncoder(first_law, params), PointEncoder(second_law, params),
      BinDecoder(side_law, params), JointTester(joint.marginal({kY1, kY2}), params),
      JointTester(joint, params)});

  TwoTerminalScheme t;
  t.kind = which_corner == 0 ? SchemeKind::Corner0 : SchemeKind::Corner1;
  t.lambda = which_corner == 0 ? 1.0 : 0.0;
  t.super_blocks = 1;
  t.scheme0 = s;
  t.scheme1 = s;
  return t;
}

std::size_t TwoTerminalScheme::block_order() const { return scheme0->model.block_order; }
std::size_t TwoTerminalScheme::inner_length() const { return scheme0->n_prime; }

std::size_t TwoTerminalScheme::blocks0() const {
  return static_cast<std::size_t>(std::floor(lambda * static_cast<double>(super_blocks) + 1e-9));
}

std::size_t TwoTerminalScheme::input_length() const {
  return super_blocks * block_order() * inner_length();
}

double TwoTerminalScheme::rate1() const {
  const double m = static_cast<double>(blocks0()), l = static_cast<double>(super_blocks);
  return (m * scheme0->rate1() + (l - m) * scheme1->rate1()) / l;
}

double TwoTerminalScheme::rate2() const {
  const double m = static_cast<double>(blocks0()), l = static_cast<double>(super_blocks);
  return (m * scheme0->rate2() + (l - m) * scheme1->rate2()) / l;
}

TwoTerminalScheme build_timeshared_scheme(const TwoTerminalScheme& scheme0,
                                          const TwoTerminalScheme& scheme1, double lambda,
                                          std::size_t super_blocks) {
  require(lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
  require(super_blocks >= 1, "super-block count must be >= 1");
  require(scheme0.scheme0 && scheme1.scheme1, "time sharing needs two built schemes");
  const CornerScheme& a = *scheme0.scheme0;
  const CornerScheme& b = *scheme1.scheme1;
  if (!(a.model.source == b.model.source && a.model.aux1 == b.model.aux1 &&
        a.model.aux2 == b.model.aux2 && a.model.block_order == b.model.block_order)) {
    throw ValidationError("time-shared schemes must be built over the same model");
  }
  require(a.n_prime == b.n_prime, "time-shared schemes must share the inner block length");
  TwoTerminalScheme t;
  t.kind = SchemeKind::TimeShared;
  t.lambda = lambda;
  t.super_blocks = super_blocks;
  t.scheme0 = scheme0.scheme0;
  t.scheme1 = scheme1.scheme1;
  return t;
}

bool CodingOutcome::success() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const StageFlags& f) { return f.success(); });
}

namespace {

StageFlags run_block(const CornerScheme& s, std::span<const Symbol> y1, std::span<const Symbol> y2,
                     std::span<Symbol> z1_out, std::span<Symbol> z2_out) {
  const CornerCoders& c = *s.coders;
  std::vector<std::uint32_t> scratch;
  StageFlags f;
  f.source_atypical = !c.source.typical(y1, y2, scratch);
  const auto yf = c.yf == chain_axis::kY1 ? y1 : y2;
  const auto ys = c.yf == chain_axis::kY1 ? y2 : y1;

  const EncodeResult first = c.first.encode(s.point, yf);
  f.first_uncovered = !first.covered;
  const auto zf = s.point.word(first.index);

  const EncodeResult second = c.second.encode(s.binned.inner, ys);
  f.second_uncovered = !second.covered;
  const BinDecodeResult dec = c.decoder.decode(s.binned, s.binned.bin_of[second.index], zf);
  f.bin_none = dec.status == DecodeStatus::None;
  f.bin_multiple = dec.status == DecodeStatus::Multiple;
  const auto zs = s.binned.inner.word(dec.status == DecodeStatus::Unique ? dec.index : 0);

  const auto z1 = s.corner == 0 ? zf : zs;
  const auto z2 = s.corner == 0 ? zs : zf;
  std::copy(z1.begin(), z1.end(), z1_out.begin());
  std::copy(z2.begin(), z2.end(), z2_out.begin());
  const std::span<const Symbol> quad[] = {y1, y2, z1, z2};
  f.quadruple_atypical = !c.quadruple.typical(quad, scratch);
  return f;
}

}  // namespace

CodingOutcome encode_decode(const TwoTerminalScheme& scheme, const SymbolSequence& x1,
                            const SymbolSequence& x2) {
  require(scheme.scheme0 && scheme.scheme1, "scheme not built");
  const ChainModel& model = scheme.scheme0->model;
  const std::size_t n = scheme.block_order(), np = scheme.inner_length();
  const std::size_t len = scheme.input_length();
  require(x1.alphabet == model.source.axes()[0] && x2.alphabet == model.source.axes()[1],
          "input alphabets do not match the model");
  if (x1.size() != len || x2.size() != len) {
    throw ValidationError("input length must be L n n' = " + std::to_string(len));
  }
  const SymbolSequence y1 = to_super_symbols(x1, n);
  const SymbolSequence y2 = to_super_symbols(x2, n);
  CodingOutcome out;
  out.z1 = {model.aux1.outputs(), std::vector<Symbol>(scheme.super_blocks * np)};
  out.z2 = {model.aux2.outputs(), std::vector<Symbol>(scheme.super_blocks * np)};
  const std::size_t m = scheme.blocks0();
  for (std::size_t b = 0; b < scheme.super_blocks; ++b) {
    const CornerScheme& s = b < m ? *scheme.scheme0 : *scheme.scheme1;
    const std::size_t off = b * np;
    out.blocks.push_back(run_block(s, std::span<const Symbol>(y1.symbols).subspan(off, np),
                                   std::span<const Symbol>(y2.symbols).subspan(off, np),
                                   std::span<Symbol>(out.z1.symbols).subspan(off, np),
                                   std::span<Symbol>(out.z2.symbols).subspan(off, np)));
  }
  return out;
}

// --- experiments --------------------------------------------------------------------

const char* to_string(Problem p) {
  switch (p) {
    case Problem::Joint: return "joint";
    case Problem::Partial: return "partial";
    case Problem::WynerZiv: return "wynerZiv";
    case Problem::SlepianWolf: return "slepianWolf";
    case Problem::BergerYeung: return "bergerYeung";
  }
  return "?";
}

Problem problem_from_string(const std::string& s) {
  for (Problem p : {Problem::Joint, Problem::Partial, Problem::WynerZiv, Problem::SlepianWolf,
                    Problem::BergerYeung}) {
    if (s == to_string(p)) return p;
  }
  throw ValidationError("unknown problem \"" + s + "\"");
}

namespace {

bool is_identity(const ConditionalTable& q, std::size_t size) {
  return q == ConditionalTable::identity(size);
}

struct Letters {
  std::size_t a1, a2;  // base alphabets
};

// Per-symbol distortion of one super-symbol coordinate block.
double block_distortion(Problem problem, const ReconstructionMap& psi,
                        const DistortionCriterion& d, Letters l, std::size_t n, Symbol y1,
                        Symbol y2, std::uint32_t t) {
  const auto x1 = unpack_block(y1, l.a1, n);
  const auto x2 = unpack_block(y2, l.a2, n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    switch (problem) {
      case Problem::Joint:
        sum += d(x1[k] * l.a2 + x2[k],
                 target_letter(psi, t, 0, k) * l.a2 + target_letter(psi, t, 1, k));
        break;
      case Problem::Partial:
      case Problem::WynerZiv:
        sum += d(x1[k], target_letter(psi, t, 0, k));
        break;
      case Problem::BergerYeung:
        sum += d(x2[k], target_letter(psi, t, 0, k));
        break;
      case Problem::SlepianWolf:
        break;
    }
  }
  return sum / static_cast<double>(n);
}

void check_spec(const ExperimentSpec& spec) {
  const ChainModel& m = spec.model;
  const std::size_t b1 = m.block_alphabet1(), b2 = m.block_alphabet2();
  const std::size_t a1 = m.source.axes()[0], a2 = m.source.axes()[1];
  require(!spec.schedule.empty(), "experiment schedule is empty");
  require(spec.trials >= 1, "trials must be >= 1");
  require(spec.lambda >= 0.0 && spec.lambda <= 1.0, "lambda must lie in [0, 1]");
  switch (spec.problem) {
    case Problem::WynerZiv:
      if (!is_identity(m.aux2, b2)) {
        throw ValidationError("wynerZiv requires Z2 = X2-block (identity aux2)");
      }
      break;
    case Problem::SlepianWolf:
      if (!is_identity(m.aux1, b1) || !is_identity(m.aux2, b2)) {
        throw ValidationError("slepianWolf requires identity auxiliaries on both terminals");
      }
      return;  // no psi or distortion involved
    case Problem::BergerYeung:
      if (!is_identity(m.aux1, b1)) {
        throw ValidationError("bergerYeung requires Z1 = X1-block (identity aux1)");
      }
      break;
    default:
      break;
  }
  const ReconstructionMap& psi = spec.psi;
  psi.validate();
  require(psi.z1 == m.aux1.outputs() && psi.z2 == m.aux2.outputs(),
          "reconstruction domain does not match the auxiliary alphabets");
  require(psi.block_order == m.block_order, "reconstruction block order != model block order");
  std::vector<std::size_t> want;
  std::size_t letters = 0;
  switch (spec.problem) {
    case Problem::Joint: want = {a1, a2}; letters = a1 * a2; break;
    case Problem::Partial:
    case Problem::WynerZiv: want = {a1}; letters = a1; break;
    case Problem::BergerYeung: want = {a2}; letters = a2; break;
    case Problem::SlepianWolf: break;
  }
  require(psi.component_alphabets == want, "reconstruction target does not fit the problem");
  spec.distortion.validate();
  require(spec.distortion.targets == letters && spec.distortion.estimates == letters,
          "distortion matrix does not fit the problem's reconstruction alphabet");
}

struct TrialResult {
  double distortion = 0.0;
  bool error = false;
};

}  // namespace

double exact_expected_distortion(Problem problem, const ChainModel& model,
                                 const ReconstructionMap& psi, const DistortionCriterion& d) {
  if (problem == Problem::SlepianWolf) return 0.0;
  const ProbabilityTable j = model.joint();
  const auto& ax = j.axes();
  const Letters l{model.source.axes()[0], model.source.axes()[1]};
  double total = 0.0;
  std::size_t flat = 0;
  for (std::size_t y1 = 0; y1 < ax[0]; ++y1)
    for (std::size_t y2 = 0; y2 < ax[1]; ++y2)
      for (std::size_t z1 = 0; z1 < ax[2]; ++z1)
        for (std::size_t z2 = 0; z2 < ax[3]; ++z2, ++flat) {
          if (j[flat] <= 0.0) continue;
          total += j[flat] * block_distortion(problem, psi, d, l, model.block_order,
                                              static_cast<Symbol>(y1), static_cast<Symbol>(y2),
                                              psi(z1, z2));
        }
  return total;
}

ExperimentReport run_rd_experiment(const ExperimentSpec& spec) {
  check_spec(spec);
  const ChainModel& model = spec.model;
  const std::size_t n = model.block_order;
  const Letters letters{model.source.axes()[0], model.source.axes()[1]};
  const SchemeEpsilons eps = spec.eps.resolved();
  const double target =
      exact_expected_distortion(spec.problem, model, spec.psi, spec.distortion);
  const CategoricalSampler sampler(model.source.mass());

  ExperimentReport report;
  std::vector<double> deltas, dsig, errs, esig;
  for (std::size_t i = 0; i < spec.schedule.size(); ++i) {
    const std::size_t np = spec.schedule[i];
    const std::uint64_t seed = derive_seed(spec.seed, i);
    const TypicalityParams params{eps.epsilon, np};
    ExperimentRow row;
    row.problem = spec.problem;
    row.n = n;
    row.n_prime = np;
    row.lambda = spec.lambda;
    row.target_d = target;
    row.trials = spec.trials;
    row.seed = seed;
    std::vector<TrialResult> results(spec.trials);

    if (spec.problem == Problem::WynerZiv) {
      // X2 reaches the decoder uncoded; X1 is binned against it.
      const BinnedModel bm{model.block_source(), model.aux1};
      const ProbabilityTable triple = bm.triple();
      const BinSizing sizing =
          choose_bin_sizes(bm.i_y1z1(), bm.i_y2z1(), eps.epsilon1, eps.epsilon4, np);
      const BinnedCodebook cb = generate_binned_codebook(sizing, triple.marginal({2}), seed);
      const PointEncoder enc(triple.marginal({0, 2}), params);
      const BinDecoder dec(triple.marginal({1, 2}), params);
      const JointTester tri(triple, params);
      row.r1 = static_cast<double>(sizing.log2_k2) / static_cast<double>(n * np);
      row.r2 = std::log2(static_cast<double>(letters.a2));
      parallel_for(spec.trials, [&](std::size_t t) {
        Rng rng(derive_seed(seed, streams::kSource, t));
        std::vector<Symbol> x1(n * np), x2(n * np);
        for (std::size_t k = 0; k < n * np; ++k) {
          const std::size_t c = sampler(rng);
          x1[k] = static_cast<Symbol>(c / letters.a2);
          x2[k] = static_cast<Symbol>(c % letters.a2);
        }
        const auto y1 = to_super_symbols({letters.a1, x1}, n).symbols;
        const auto y2 = to_super_symbols({letters.a2, x2}, n).symbols;
        const EncodeResult e = enc.encode(cb.inner, y1);
        const BinDecodeResult d = dec.decode(cb, cb.bin_of[e.index], y2);
        const auto z = cb.inner.word(d.status == DecodeStatus::Unique ? d.index : 0);
        std::vector<std::uint32_t> scratch;
        TrialResult r;
        r.error = !tri.typical(y1, y2, z, scratch);
        for (std::size_t k = 0; k < np; ++k) {
          r.distortion += block_distortion(spec.problem, spec.psi, spec.distortion, letters, n,
                                           y1[k], y2[k], spec.psi(z[k], y2[k]));
        }
        r.distortion /= static_cast<double>(np);
        results[t] = r;
      });
    } else {
      TwoTerminalScheme scheme;
      if (spec.lambda >= 1.0) {
        scheme = build_corner_scheme(model, 0, eps, np, seed);
      } else if (spec.lambda <= 0.0) {
        scheme = build_corner_scheme(model, 1, eps, np, seed);
      } else {
        scheme = build_timeshared_scheme(build_corner_scheme(model, 0, eps, np, seed),
                                         build_corner_scheme(model, 1, eps, np, seed),
                                         spec.lambda, spec.super_blocks);
      }
      row.r1 = scheme.rate1();
      row.r2 = scheme.rate2();
      const std::size_t len = scheme.input_length();
      parallel_for(spec.trials, [&](std::size_t t) {
        Rng rng(derive_seed(seed, streams::kSource, t));
        SymbolSequence x1{letters.a1, std::vector<Symbol>(len)};
        SymbolSequence x2{letters.a2, std::vector<Symbol>(len)};
        for (std::size_t k = 0; k < len; ++k) {
          const std::size_t c = sampler(rng);
          x1.symbols[k] = static_cast<Symbol>(c / letters.a2);
          x2.symbols[k] = static_cast<Symbol>(c % letters.a2);
        }
        const CodingOutcome out = encode_decode(scheme, x1, x2);
        TrialResult r;
        if (spec.problem == Problem::SlepianWolf) {
          const SymbolSequence x1_hat = from_super_symbols(out.z1, letters.a1, n);
          const SymbolSequence x2_hat = from_super_symbols(out.z2, letters.a2, n);
          std::size_t wrong = 0;
          for (std::size_t k = 0; k < len; ++k) {
            wrong += (x1_hat.symbols[k] != x1.symbols[k]) + (x2_hat.symbols[k] != x2.symbols[k]);
          }
          r.error = wrong != 0;
          r.distortion = static_cast<double>(wrong) / static_cast<double>(2 * len);
        } else {
          r.error = !out.success();
          const auto y1 = to_super_symbols(x1, n).symbols;
          const auto y2 = to_super_symbols(x2, n).symbols;
          for (std::size_t k = 0; k < out.z1.size(); ++k) {
            r.distortion += block_distortion(spec.problem, spec.psi, spec.distortion, letters, n,
                                             y1[k], y2[k],
                                             spec.psi(out.z1.symbols[k], out.z2.symbols[k]));
          }
          r.distortion /= static_cast<double>(out.z1.size());
        }
        results[t] = r;
      });
    }

    double sum = 0.0, sq = 0.0;
    std::size_t errors = 0;
    for (const auto& r : results) {
      sum += r.distortion;
      sq += r.distortion * r.distortion;
      errors += r.error ? 1 : 0;
    }
    const double tn = static_cast<double>(spec.trials);
    row.measured_d = sum / tn;
    const double var = std::max(0.0, sq / tn - row.measured_d * row.measured_d);
    row.measured_sigma = std::sqrt(var / tn);
    row.error_rate = static_cast<double>(errors) / tn;
    row.delta = row.measured_d - row.target_d;
    report.rows.push_back(row);
    deltas.push_back(row.delta);
    dsig.push_back(row.measured_sigma);
    errs.push_back(row.error_rate);
    esig.push_back(std::sqrt(row.error_rate * (1 - row.error_rate) / tn));
  }
  report.delta_nonincreasing = nonincreasing_within_2sigma(deltas, dsig);
  report.error_nonincreasing = nonincreasing_within_2sigma(errs, esig);
  return report;
}

std::string experiment_csv_header() {
  return "problem,n,nPrime,lambda,r1,r2,targetD,measuredD,errorRate,trials,seed";
}

std::string to_csv_row(const ExperimentRow& r) {
  std::ostringstream os;
  os << to_string(r.problem) << ',' << r.n << ',' << r.n_prime << ',' << format_float(r.lambda)
     << ',' << format_float(r.r1) << ',' << format_float(r.r2) << ',' << format_float(r.target_d)
     << ',' << format_float(r.measured_d) << ',' << format_float(r.error_rate) << ',' << r.trials
     << ',' << r.seed;
  return os.str();
}

}  // namespace tslab
