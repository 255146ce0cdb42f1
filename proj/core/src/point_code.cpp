#include "tslab/point_code.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "tslab/errors.hpp"
#include "tslab/parallel.hpp"

namespace tslab {

namespace {

// Exponents that are integers up to rounding are treated as integers, so that
// e.g. 20 * (0.5 + 0.1) gives K = 4096 rather than 4097.
double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

double log2_of_ceil_pow2(double e) {
  if (e == std::floor(e)) return e;
  return std::log2(std::ceil(std::exp2(e)));
}

bool window_ok(double mi, double epsilon1, std::size_t n_prime) {
  const double n = static_cast<double>(n_prime);
  return log2_of_ceil_pow2(snap(n * (mi + 2 * epsilon1))) <= n * (mi + 3 * epsilon1) + 1e-9;
}

}  // namespace

bool CodeSizing::in_window() const {
  const double n = static_cast<double>(n_prime);
  return log2_size >= n * (mutual_information + 2 * epsilon1) - 1e-9 &&
         log2_size <= n * (mutual_information + 3 * epsilon1) + 1e-9;
}

CodeSizing choose_codebook_size(double mutual_information, double epsilon1, std::size_t n_prime,
                                double budget_log2) {
  require(std::isfinite(mutual_information) && mutual_information >= 0.0,
          "mutual information must be >= 0");
  require(std::isfinite(epsilon1) && epsilon1 > 0.0, "epsilon1 must be > 0");
  require(n_prime >= 1, "n' must be >= 1");
  const double n = static_cast<double>(n_prime);
  const double e = snap(n * (mutual_information + 2 * epsilon1));
  if (e > budget_log2) {
    std::ostringstream os;
    os << "codebook size 2^" << e << " exceeds budget 2^" << budget_log2 << "; requires >= 2^"
       << std::ceil(e);
    throw BudgetError(os.str(), std::ceil(e));
  }
  CodeSizing s;
  s.n_prime = n_prime;
  s.epsilon1 = epsilon1;
  s.mutual_information = mutual_information;
  s.codebook_size = static_cast<std::uint64_t>(e == std::floor(e) ? std::exp2(e) : std::ceil(std::exp2(e)));
  s.log2_size = std::log2(static_cast<double>(s.codebook_size));
  if (!window_ok(mutual_information, epsilon1, n_prime)) {
    std::size_t m = n_prime + 1;
    while (m < n_prime + 100000 && !window_ok(mutual_information, epsilon1, m)) ++m;
    throw ValidationError("sizing window empty at n' = " + std::to_string(n_prime) +
                          "; smallest feasible n' is " + std::to_string(m));
  }
  return s;
}

CodeSizing fixed_codebook_size(std::uint64_t k, std::size_t n_prime, double mutual_information) {
  require(k >= 1, "codebook size must be >= 1");
  require(n_prime >= 1, "n' must be >= 1");
  CodeSizing s;
  s.codebook_size = k;
  s.log2_size = std::log2(static_cast<double>(k));
  s.n_prime = n_prime;
  s.mutual_information = mutual_information;
  return s;
}

Codebook generate_codebook(const CodeSizing& sizing, const ProbabilityTable& marginal,
                           std::uint64_t seed, std::uint64_t stream) {
  require(marginal.rank() == 1, "codebook marginal must have one axis");
  require(sizing.n_prime >= 1 && sizing.codebook_size >= 1, "invalid sizing");
  const double symbols = static_cast<double>(sizing.codebook_size) * static_cast<double>(sizing.n_prime);
  if (symbols > static_cast<double>(kMaxCodebookSymbols)) {
    throw BudgetError("codebook storage exceeds 2^28 symbols", std::log2(symbols));
  }
  Codebook cb;
  cb.n_prime = sizing.n_prime;
  cb.alphabet = marginal.cell_count();
  cb.seed = seed;
  cb.symbols.resize(static_cast<std::size_t>(symbols));
  const CategoricalSampler sampler(marginal.mass());
  Rng rng(derive_seed(seed, stream));
  for (auto& s : cb.symbols) s = sampler(rng);
  return cb;
}

PointEncoder::PointEncoder(const ProbabilityTable& joint_law, const TypicalityParams& params)
    : pair_((require(joint_law.rank() == 2, "encoder law must be a (Y, Z) table"), joint_law),
            params),
      marginal_(joint_law.marginal({0}), params) {}

EncodeResult PointEncoder::encode(const Codebook& codebook, std::span<const Symbol> input) const {
  require(codebook.alphabet == pair_.law().axes()[1], "codebook alphabet does not match the law");
  require(codebook.n_prime == pair_.block_length(), "codebook length != block length");
  require(input.size() == pair_.block_length(), "input length != block length");
  std::vector<std::uint32_t> scratch;
  // Joint typicality implies typicality of the input alone.
  if (!marginal_.typical(std::span<const std::span<const Symbol>>(&input, 1), scratch)) {
    return {0, false};
  }
  const std::size_t k = codebook.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (pair_.typical(input, codebook.word(i), scratch)) return {i, true};
  }
  return {0, false};
}

EncodeResult encode(const Codebook& codebook, const SymbolSequence& input,
                    const ProbabilityTable& joint_law, const TypicalityParams& params) {
  require(joint_law.rank() == 2, "encoder law must be a (Y, Z) table");
  require(input.alphabet == joint_law.axes()[0], "input alphabet does not match the law");
  return PointEncoder(joint_law, params).encode(codebook, input.symbols);
}

ProbabilityTable PointModel::joint() const {
  require(source.rank() == 1, "point model source must have one axis");
  require(channel.inputs() == source.cell_count(), "channel inputs != source alphabet");
  const std::size_t ny = channel.inputs(), nz = channel.outputs();
  std::vector<double> mass(ny * nz);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t z = 0; z < nz; ++z) mass[y * nz + z] = source[y] * channel(y, z);
  }
  return ProbabilityTable({ny, nz}, std::move(mass));
}

ProbabilityTable PointModel::z_marginal() const { return joint().marginal({1}); }

double PointModel::mutual_information() const {
  return tslab::mutual_information(joint(), {0}, {1});
}

double PointCodeReport::failure_rate() const {
  return trials ? static_cast<double>(failures) / static_cast<double>(trials) : 0.0;
}

double PointCodeReport::sigma() const {
  if (trials == 0) return 0.0;
  const double r = failure_rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(trials));
}

PointCodeReport simulate_point_code(const PointModel& model, const CodeSizing& sizing,
                                    const TypicalityParams& params, std::size_t trials,
                                    std::uint64_t seed) {
  require(trials >= 1, "trials must be >= 1");
  require(params.block_length == sizing.n_prime, "params block length != n'");
  const ProbabilityTable joint = model.joint();
  const Codebook cb = generate_codebook(sizing, joint.marginal({1}), seed);
  const PointEncoder encoder(joint, params);
  const JointTester pair(joint, params);
  const CategoricalSampler source(model.source.mass());
  const std::size_t n = sizing.n_prime;

  std::vector<char> failed(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, streams::kSource, t));
    std::vector<Symbol> y(n);
    for (auto& s : y) s = source(rng);
    const EncodeResult r = encoder.encode(cb, y);
    std::vector<std::uint32_t> scratch;
    failed[t] = pair.typical(y, cb.word(r.index), scratch) ? 0 : 1;
  });

  PointCodeReport rep;
  rep.n_prime = n;
  rep.codebook_size = sizing.codebook_size;
  rep.rate = sizing.rate();
  rep.epsilon = params.epsilon;
  rep.epsilon1 = sizing.epsilon1;
  rep.trials = trials;
  rep.seed = seed;
  for (char f : failed) rep.failures += static_cast<std::size_t>(f);
  rep.atypical_input_probability = 1.0 - exact_typicality_probability(model.source, params);
  rep.proof_bound =
      rep.atypical_input_probability + std::exp(-std::exp2(static_cast<double>(n) * sizing.epsilon1));
  return rep;
}

PointCodeSchedule point_code_schedule(const PointModel& model, double epsilon, double epsilon1,
                                      const std::vector<std::size_t>& lengths,
                                      std::size_t trials, std::uint64_t seed) {
  require(!lengths.empty(), "empty block-length schedule");
  const double mi = model.mutual_information();
  PointCodeSchedule sched;
  std::vector<double> rates, sigmas;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const CodeSizing sizing = choose_codebook_size(mi, epsilon1, lengths[i]);
    sched.points.push_back(
        simulate_point_code(model, sizing, {epsilon, lengths[i]}, trials, derive_seed(seed, i)));
    rates.push_back(sched.points.back().failure_rate());
    sigmas.push_back(sched.points.back().sigma());
  }
  sched.nonincreasing = nonincreasing_within_2sigma(rates, sigmas);
  return sched;
}

std::string to_json(const Codebook& codebook) {
  nlohmann::json j;
  j["nPrime"] = codebook.n_prime;
  j["K"] = codebook.size();
  j["seed"] = codebook.seed;
  j["alphabet"] = codebook.alphabet;
  auto words = nlohmann::json::array();
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    const auto w = codebook.word(i);
    words.push_back(std::vector<Symbol>(w.begin(), w.end()));
  }
  j["codewords"] = std::move(words);
  return j.dump();
}

}  // namespace tslab
