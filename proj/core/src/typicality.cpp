#include "tslab/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "tslab/errors.hpp"
#include "tslab/parallel.hpp"
#include "tslab/rng.hpp"

namespace tslab {

void TypicalityParams::validate() const {
  require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be > 0");
  require(block_length >= 1, "block length must be >= 1");
}

double cell_deviation(std::size_t count, std::size_t n, double p, std::size_t cells,
                      double epsilon) {
  const double d = static_cast<double>(cells) *
                   std::abs(static_cast<double>(count) - static_cast<double>(n) * p) /
                   static_cast<double>(n);
  if (std::abs(d - epsilon) <= 1e-12 * std::max(1.0, epsilon)) return epsilon;
  return d;
}

TypicalityWindow::TypicalityWindow(const ProbabilityTable& p, const TypicalityParams& params) {
  params.validate();
  const std::size_t n = params.block_length;
  const std::size_t cells = p.cell_count();
  lo_.assign(cells, 1);
  hi_.assign(cells, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    // The deviation is convex in the count, so the admissible set is an interval.
    bool found = false;
    for (std::size_t k = 0; k <= n; ++k) {
      if (cell_deviation(k, n, p[c], cells, params.epsilon) < params.epsilon) {
        if (!found) lo_[c] = k;
        hi_[c] = k;
        found = true;
      } else if (found) {
        break;
      }
    }
    if (!found) empty_ = true;
  }
}

bool TypicalityWindow::admits(const std::vector<std::size_t>& counts) const {
  if (counts.size() != lo_.size()) throw ValidationError("count vector size mismatch");
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (!admits(c, counts[c])) return false;
  }
  return true;
}

std::size_t count_occurrences(const SymbolSequence& seq, Symbol symbol) {
  require(symbol < seq.alphabet, "symbol outside alphabet");
  return static_cast<std::size_t>(std::count(seq.symbols.begin(), seq.symbols.end(), symbol));
}

std::size_t count_occurrences(const SequenceTuple& seq, const std::vector<Symbol>& symbol) {
  require(!seq.empty(), "empty sequence tuple");
  require(symbol.size() == seq.size(), "joint symbol arity mismatch");
  const std::size_t n = seq.front().size();
  for (std::size_t a = 0; a < seq.size(); ++a) {
    require(seq[a].size() == n, "sequences differ in length");
    require(symbol[a] < seq[a].alphabet, "symbol outside alphabet");
  }
  std::size_t count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    bool match = true;
    for (std::size_t a = 0; a < seq.size() && match; ++a) match = seq[a].symbols[k] == symbol[a];
    count += match ? 1 : 0;
  }
  return count;
}

std::vector<std::size_t> joint_counts(const SequenceTuple& seq) {
  require(!seq.empty(), "empty sequence tuple");
  const std::size_t n = seq.front().size();
  std::size_t cells = 1;
  for (const auto& s : seq) {
    require(s.size() == n, "sequences differ in length");
    cells *= s.alphabet;
    require(cells <= kMaxTableCells, "joint alphabet exceeds the table cap");
  }
  std::vector<std::size_t> counts(cells, 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t flat = 0;
    for (const auto& s : seq) {
      require(s.symbols[k] < s.alphabet, "symbol outside alphabet");
      flat = flat * s.alphabet + s.symbols[k];
    }
    ++counts[flat];
  }
  return counts;
}

TypicalityVerdict is_strongly_typical(const SequenceTuple& seq, const ProbabilityTable& p,
                                      const TypicalityParams& params) {
  params.validate();
  require(seq.size() == p.rank(), "sequence tuple arity does not match the table");
  for (std::size_t a = 0; a < seq.size(); ++a) {
    require(seq[a].alphabet == p.axes()[a], "sequence alphabet does not match table axis");
    if (seq[a].size() != params.block_length) {
      throw ValidationError("sequence length " + std::to_string(seq[a].size()) +
                            " != block length " + std::to_string(params.block_length));
    }
  }
  const auto counts = joint_counts(seq);
  TypicalityVerdict v;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    v.max_deviation = std::max(
        v.max_deviation,
        cell_deviation(counts[c], params.block_length, p[c], counts.size(), params.epsilon));
  }
  v.is_typical = v.max_deviation < params.epsilon;
  return v;
}

TypicalityVerdict is_strongly_typical(const SymbolSequence& seq, const ProbabilityTable& p,
                                      const TypicalityParams& params) {
  return is_strongly_typical(SequenceTuple{seq}, p, params);
}

// --- exact probabilities ---------------------------------------------------------

namespace {

struct DrawSetup {
  std::vector<double> q;                         // pmf of the drawn (joint) symbol
  std::vector<std::vector<std::size_t>> cell;    // cell[y][d]: joint cell of (y, d)
  std::vector<Symbol> fixed;                     // conditioning symbols, or all zeros
};

DrawSetup make_setup(const ProbabilityTable& p, const TypicalityParams& params,
                     const std::optional<Conditioning>& condition) {
  DrawSetup s;
  const std::size_t n = params.block_length;
  if (!condition) {
    s.q.assign(p.mass().begin(), p.mass().end());
    s.cell.assign(1, std::vector<std::size_t>(p.cell_count()));
    for (std::size_t d = 0; d < p.cell_count(); ++d) s.cell[0][d] = d;
    s.fixed.assign(n, 0);
    return s;
  }
  const std::size_t axis = condition->axis;
  require(p.rank() >= 2, "conditioning needs a table with at least two axes");
  require(axis < p.rank(), "conditioning axis out of range");
  require(condition->sequence.alphabet == p.axes()[axis],
          "conditioning sequence alphabet does not match its axis");
  require(condition->sequence.size() == n, "conditioning sequence length != block length");
  AxisSet drawn;
  for (std::size_t a = 0; a < p.rank(); ++a) {
    if (a != axis) drawn.push_back(a);
  }
  const ProbabilityTable q = p.marginal(drawn);
  s.q.assign(q.mass().begin(), q.mass().end());
  const std::size_t ysize = p.axes()[axis];
  s.cell.assign(ysize, std::vector<std::size_t>(q.cell_count()));
  std::vector<std::size_t> didx(drawn.size()), full(p.rank());
  for (std::size_t y = 0; y < ysize; ++y) {
    for (std::size_t d = 0; d < q.cell_count(); ++d) {
      q.unravel(d, didx);
      for (std::size_t k = 0; k < drawn.size(); ++k) full[drawn[k]] = didx[k];
      full[axis] = y;
      s.cell[y][d] = p.flat_index(full);
    }
  }
  s.fixed = condition->sequence.symbols;
  for (Symbol y : s.fixed) require(y < ysize, "conditioning symbol outside alphabet");
  return s;
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Positions sharing a conditioning symbol form a group; joint cells partition
// by group, so typicality factorizes and each group is an independent sum over
// admissible compositions, evaluated by a DP over drawn symbols.
double type_class_probability(const DrawSetup& s, const TypicalityWindow& w, std::size_t n) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const std::size_t m = s.q.size();
  std::vector<std::size_t> group_size(s.cell.size(), 0);
  for (Symbol y : s.fixed) ++group_size[y];

  // Work estimate: groups * m * n^2 inner steps.
  const double work = static_cast<double>(s.cell.size()) * static_cast<double>(m) *
                      static_cast<double>(n + 1) * static_cast<double>(n + 1);
  if (work > static_cast<double>(kExactEnumerationCap) * 16.0) {
    throw BudgetError("type-class summation exceeds the exact budget", std::log2(work / 16.0));
  }

  double log_total = 0.0;
  for (std::size_t y = 0; y < s.cell.size(); ++y) {
    const std::size_t ny = group_size[y];
    // f[t] = log sum over admissible counts of the first j symbols with total t of
    //        prod q^k / k!
    std::vector<double> f(ny + 1, kNegInf), g(ny + 1);
    f[0] = 0.0;
    for (std::size_t d = 0; d < m; ++d) {
      const std::size_t c = s.cell[y][d];
      std::fill(g.begin(), g.end(), kNegInf);
      const std::size_t lo = w.lo(c);
      const std::size_t hi = std::min(w.hi(c), ny);
      for (std::size_t k = lo; k <= hi && lo <= hi; ++k) {
        double term;
        if (s.q[d] > 0.0) {
          term = static_cast<double>(k) * std::log(s.q[d]) - std::lgamma(static_cast<double>(k) + 1);
        } else {
          if (k > 0) break;
          term = 0.0;
        }
        for (std::size_t t = 0; t + k <= ny; ++t) {
          if (f[t] == kNegInf) continue;
          g[t + k] = log_add(g[t + k], f[t] + term);
        }
      }
      f.swap(g);
    }
    if (f[ny] == kNegInf) return 0.0;
    log_total += f[ny] + std::lgamma(static_cast<double>(ny) + 1);
  }
  return std::min(1.0, std::exp(log_total));
}

struct Enumerator {
  const DrawSetup& s;
  const TypicalityWindow& w;
  std::size_t n;
  std::vector<std::size_t> counts;
  double total = 0.0;

  void run(std::size_t pos, double prob) {
    if (pos == n) {
      if (w.admits(counts)) total += prob;
      return;
    }
    const auto& row = s.cell[s.fixed[pos]];
    for (std::size_t d = 0; d < s.q.size(); ++d) {
      if (s.q[d] <= 0.0) continue;
      const std::size_t c = row[d];
      if (counts[c] + 1 > w.hi(c)) continue;
      ++counts[c];
      run(pos + 1, prob * s.q[d]);
      --counts[c];
    }
  }
};

}  // namespace

double exact_typicality_probability(const ProbabilityTable& p, const TypicalityParams& params,
                                    const std::optional<Conditioning>& condition,
                                    ExactMethod method) {
  params.validate();
  const DrawSetup s = make_setup(p, params, condition);
  const TypicalityWindow w(p, params);
  if (w.empty()) return 0.0;
  const std::size_t n = params.block_length;

  if (method == ExactMethod::Enumeration) {
    const double log2_count = static_cast<double>(n) * std::log2(static_cast<double>(s.q.size()));
    if (log2_count > 24.0 + 1e-9) {
      throw BudgetError("exhaustive enumeration exceeds 2^24 sequences", log2_count);
    }
    Enumerator e{s, w, n, std::vector<std::size_t>(p.cell_count(), 0)};
    e.run(0, 1.0);
    return std::min(1.0, e.total);
  }
  return type_class_probability(s, w, n);
}

double MonteCarloEstimate::standard_error() const {
  if (trials == 0) return 0.0;
  const double r = rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(trials));
}

MonteCarloEstimate estimate_typicality_probability(
    const ProbabilityTable& p, const TypicalityParams& params,
    const std::optional<Conditioning>& condition, std::size_t trials, std::uint64_t seed) {
  require(trials >= 1, "trials must be >= 1");
  params.validate();
  const DrawSetup s = make_setup(p, params, condition);
  const TypicalityWindow w(p, params);
  const CategoricalSampler sampler(s.q);
  const std::size_t n = params.block_length;
  std::vector<char> hit(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, streams::kSource, t));
    std::vector<std::size_t> counts(p.cell_count(), 0);
    for (std::size_t k = 0; k < n; ++k) ++counts[s.cell[s.fixed[k]][sampler(rng)]];
    hit[t] = w.admits(counts) ? 1 : 0;
  });
  MonteCarloEstimate est;
  est.trials = trials;
  for (char h : hit) est.successes += static_cast<std::size_t>(h);
  return est;
}

SymbolSequence representative_sequence(const ProbabilityTable& marginal, std::size_t n) {
  require(marginal.rank() == 1, "representative_sequence expects a one-axis table");
  require(n >= 1, "length must be >= 1");
  const std::size_t m = marginal.cell_count();
  std::vector<std::size_t> counts(m);
  std::vector<std::pair<double, std::size_t>> rem(m);
  std::size_t used = 0;
  for (std::size_t x = 0; x < m; ++x) {
    const double exact = marginal[x] * static_cast<double>(n);
    counts[x] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    used += counts[x];
    rem[x] = {exact - static_cast<double>(counts[x]), x};
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; used < n; ++i, ++used) ++counts[rem[i % m].second];
  SymbolSequence seq{m, {}};
  seq.symbols.reserve(n);
  for (std::size_t x = 0; x < m; ++x) seq.symbols.insert(seq.symbols.end(), counts[x], x);
  return seq;
}

// --- sandwich ---------------------------------------------------------------------

SandwichReport check_sandwich_bounds(const ProbabilityTable& pair,
                                     const SymbolSequence& condition_seq,
                                     const TypicalityParams& params) {
  require(pair.rank() == 2, "sandwich check expects a (Y, Z) table");
  params.validate();
  if (!is_strongly_typical(condition_seq, pair.marginal({0}), params).is_typical) {
    throw ValidationError("conditioning sequence is not typical for the Y marginal");
  }
  SandwichReport r;
  r.n = params.block_length;
  r.epsilon = params.epsilon;
  r.mutual_information = mutual_information(pair, {0}, {1});
  r.probability = exact_typicality_probability(pair, params, Conditioning{0, condition_seq});
  const double n = static_cast<double>(r.n);
  if (r.probability > 0.0) {
    r.epsilon1 = std::abs(-std::log2(r.probability) / n - r.mutual_information);
    r.lower = std::exp2(-n * (r.mutual_information + r.epsilon1));
    r.upper = std::exp2(-n * (r.mutual_information - r.epsilon1));
    r.holds = true;
  } else {
    r.epsilon1 = std::numeric_limits<double>::infinity();
    r.holds = false;
  }
  return r;
}

SandwichSchedule sandwich_schedule(const ProbabilityTable& pair, double epsilon,
                                   const std::vector<std::size_t>& lengths) {
  require(!lengths.empty(), "empty block-length schedule");
  SandwichSchedule sched;
  const ProbabilityTable py = pair.marginal({0});
  for (std::size_t n : lengths) {
    const TypicalityParams params{epsilon, n};
    sched.points.push_back(check_sandwich_bounds(pair, representative_sequence(py, n), params));
  }
  sched.shrinking = true;
  for (std::size_t i = 0; i < sched.points.size(); ++i) {
    if (!sched.points[i].holds) sched.shrinking = false;
    if (i > 0 && sched.points[i].epsilon1 > sched.points[i - 1].epsilon1 + 1e-12) {
      sched.shrinking = false;
    }
  }
  return sched;
}

// --- Markov lemma ---------------------------------------------------------------------

double MarkovLemmaPoint::rate() const {
  return conditioned ? static_cast<double>(failures) / static_cast<double>(conditioned) : 0.0;
}

double MarkovLemmaPoint::sigma() const {
  if (conditioned == 0) return 0.0;
  const double r = rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(conditioned));
}

MarkovLemmaPoint markov_lemma_point(const ChainModel& model, const TypicalityParams& params,
                                    std::size_t trials, std::uint64_t seed) {
  require(trials >= 1, "trials must be >= 1");
  params.validate();
  const ProbabilityTable joint = model.joint();
  const FactorizationCheck f = verify_factorization(joint);
  if (!f.factorizes) throw ValidationError("Markov lemma check needs a factorizing model");

  const ProbabilityTable source = model.block_source();
  const ProbabilityTable y1z1 = joint.marginal({chain_axis::kY1, chain_axis::kZ1});
  const ProbabilityTable triple =
      joint.marginal({chain_axis::kY1, chain_axis::kY2, chain_axis::kZ1});
  const TypicalityWindow w12(source, params), w1z(y1z1, params), w3(triple, params);
  const CategoricalSampler pair_sampler(source.mass());
  std::vector<CategoricalSampler> aux_rows;
  for (std::size_t y = 0; y < model.aux1.inputs(); ++y) aux_rows.emplace_back(model.aux1.row(y));

  const std::size_t a2 = source.axes()[1];
  const std::size_t kz = model.aux1.outputs();
  const std::size_t n = params.block_length;
  std::vector<char> outcome(trials, 0);  // 0 unconditioned, 1 success, 2 failure
  parallel_for(trials, [&](std::size_t t) {
    Rng src(derive_seed(seed, streams::kSource, t));
    Rng aux(derive_seed(seed, streams::kAuxChannel, t));
    std::vector<std::size_t> c12(source.cell_count(), 0), c1z(y1z1.cell_count(), 0),
        c3(triple.cell_count(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t cell = pair_sampler(src);
      const std::size_t y1 = cell / a2, y2 = cell % a2;
      const std::size_t z = aux_rows[y1](aux);
      ++c12[cell];
      ++c1z[y1 * kz + z];
      ++c3[(y1 * a2 + y2) * kz + z];
    }
    if (!w12.admits(c12) || !w1z.admits(c1z)) return;
    outcome[t] = w3.admits(c3) ? 1 : 2;
  });
  MarkovLemmaPoint pt;
  pt.n = n;
  pt.trials = trials;
  for (char o : outcome) {
    if (o != 0) ++pt.conditioned;
    if (o == 2) ++pt.failures;
  }
  return pt;
}

bool nonincreasing_within_2sigma(const std::vector<double>& rates,
                                 const std::vector<double>& sigmas) {
  require(rates.size() == sigmas.size(), "rates and sigmas differ in length");
  for (std::size_t i = 1; i < rates.size(); ++i) {
    const double tol = 2.0 * std::hypot(sigmas[i], sigmas[i - 1]);
    if (rates[i] > rates[i - 1] + tol) return false;
  }
  return true;
}

MarkovLemmaReport check_markov_lemma(const ChainModel& model, double epsilon,
                                     const std::vector<std::size_t>& lengths,
                                     std::size_t trials, std::uint64_t seed) {
  require(!lengths.empty(), "empty block-length schedule");
  MarkovLemmaReport report;
  report.epsilon = epsilon;
  report.seed = seed;
  std::vector<double> rates, sigmas;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    report.points.push_back(
        markov_lemma_point(model, {epsilon, lengths[i]}, trials, derive_seed(seed, i)));
    rates.push_back(report.points.back().rate());
    sigmas.push_back(report.points.back().sigma());
  }
  report.nonincreasing = nonincreasing_within_2sigma(rates, sigmas);
  return report;
}

// --- serialization -----------------------------------------------------------------------

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string to_json(const SandwichReport& r) {
  nlohmann::json j;
  j["probability"] = r.probability;
  j["bounds"] = {{"lower", r.lower}, {"upper", r.upper}};
  j["epsilon1"] = finite_or_null(r.epsilon1);
  j["n"] = r.n;
  j["trials"] = 0;
  j["seed"] = nullptr;
  return j.dump();
}

std::string to_json(const MarkovLemmaReport& r) {
  nlohmann::json j;
  j["epsilon"] = r.epsilon;
  j["seed"] = r.seed;
  j["nonincreasing"] = r.nonincreasing;
  j["points"] = nlohmann::json::array();
  for (const auto& p : r.points) {
    j["points"].push_back({{"n", p.n},
                           {"trials", p.trials},
                           {"conditioned", p.conditioned},
                           {"failures", p.failures},
                           {"probability", p.rate()},
                           {"sigma", p.sigma()}});
  }
  return j.dump();
}

}  // namespace tslab

namespace tslab {

JointTester::JointTester(const ProbabilityTable& law, const TypicalityParams& params)
    : law_(law), n_(params.block_length) {
  const TypicalityWindow w(law, params);
  empty_ = w.empty();
  lo_.resize(law.cell_count());
  hi_.resize(law.cell_count());
  for (std::size_t c = 0; c < law.cell_count(); ++c) {
    lo_[c] = static_cast<std::uint32_t>(w.lo(c));
    hi_[c] = static_cast<std::uint32_t>(w.hi(c));
  }
}

bool JointTester::typical(std::span<const std::span<const Symbol>> seqs,
                          std::vector<std::uint32_t>& scratch) const {
  require(seqs.size() == law_.rank(), "joint test arity mismatch");
  if (empty_) return false;
  for (const auto& s : seqs) require(s.size() == n_, "sequence length != block length");
  scratch.assign(lo_.size(), 0);
  const auto& axes = law_.axes();
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t cell = 0;
    for (std::size_t a = 0; a < seqs.size(); ++a) {
      const Symbol s = seqs[a][k];
      require(s < axes[a], "symbol outside alphabet");
      cell = cell * axes[a] + s;
    }
    if (++scratch[cell] > hi_[cell]) return false;
  }
  for (std::size_t c = 0; c < lo_.size(); ++c) {
    if (scratch[c] < lo_[c]) return false;
  }
  return true;
}

bool JointTester::typical(std::span<const Symbol> a, std::span<const Symbol> b,
                          std::vector<std::uint32_t>& scratch) const {
  const std::span<const Symbol> seqs[] = {a, b};
  return typical(seqs, scratch);
}

bool JointTester::typical(std::span<const Symbol> a, std::span<const Symbol> b,
                          std::span<const Symbol> c, std::vector<std::uint32_t>& scratch) const {
  const std::span<const Symbol> seqs[] = {a, b, c};
  return typical(seqs, scratch);
}

}  // namespace tslab
