#include "tslab/binned_code.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "tslab/errors.hpp"
#include "tslab/format.hpp"
#include "tslab/parallel.hpp"

namespace tslab {

namespace {

double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

struct RawSizes {
  bool feasible = false;
  std::size_t l1 = 0, b = 0;
  bool clamped = false;
};

RawSizes raw_sizes(double i1, double i2, double e1, double e4, std::size_t n_prime) {
  const double n = static_cast<double>(n_prime);
  RawSizes r;
  const double a = snap(n * (i1 + 2 * e1));
  r.l1 = static_cast<std::size_t>(std::max(0.0, std::ceil(a)));
  if (static_cast<double>(r.l1) > n * (i1 + 3 * e1) + 1e-9) return r;
  const double b = snap(n * (i2 - 2 * e4));
  if (b < 0.0) {
    r.b = 0;
    r.clamped = true;
  } else {
    r.b = static_cast<std::size_t>(std::floor(b));
    if (static_cast<double>(r.b) < n * (i2 - 3 * e4) - 1e-9) return r;
  }
  r.b = std::min(r.b, r.l1);
  r.feasible = true;
  return r;
}

}  // namespace

CodeSizing BinSizing::inner() const {
  CodeSizing s = fixed_codebook_size(k1(), n_prime, i_y1z1);
  s.epsilon1 = epsilon1;
  return s;
}

BinSizing choose_bin_sizes(double i_y1z1, double i_y2z1, double epsilon1, double epsilon4,
                           std::size_t n_prime, double budget_log2) {
  require(std::isfinite(i_y1z1) && i_y1z1 >= 0.0, "I(Y1;Z1) must be >= 0");
  require(std::isfinite(i_y2z1) && i_y2z1 >= 0.0, "I(Y2;Z1) must be >= 0");
  require(i_y2z1 <= i_y1z1 + 1e-12, "I(Y2;Z1) exceeds I(Y1;Z1); the Markov chain is violated");
  require(epsilon1 > 0.0 && epsilon4 > 0.0, "epsilon1 and epsilon4 must be > 0");
  require(n_prime >= 1, "n' must be >= 1");
  const RawSizes r = raw_sizes(i_y1z1, i_y2z1, epsilon1, epsilon4, n_prime);
  if (!r.feasible) {
    std::size_t m = n_prime + 1;
    while (m < n_prime + 100000 && !raw_sizes(i_y1z1, i_y2z1, epsilon1, epsilon4, m).feasible) ++m;
    throw ValidationError("bin sizing window empty at n' = " + std::to_string(n_prime) +
                          "; smallest feasible n' is " + std::to_string(m));
  }
  if (static_cast<double>(r.l1) > budget_log2) {
    std::ostringstream os;
    os << "codebook size 2^" << r.l1 << " exceeds budget 2^" << budget_log2;
    throw BudgetError(os.str(), static_cast<double>(r.l1));
  }
  BinSizing s;
  s.log2_k1 = r.l1;
  s.log2_k2 = r.l1 - r.b;
  s.n_prime = n_prime;
  s.epsilon1 = epsilon1;
  s.epsilon4 = epsilon4;
  s.i_y1z1 = i_y1z1;
  s.i_y2z1 = i_y2z1;
  s.clamped = r.clamped;
  return s;
}

BinSizing with_bins(BinSizing sizing, std::size_t log2_k2) {
  require(log2_k2 <= sizing.log2_k1, "K2 cannot exceed K1");
  sizing.log2_k2 = log2_k2;
  return sizing;
}

BinnedCodebook generate_binned_codebook(const BinSizing& sizing,
                                        const ProbabilityTable& marginal_z1, std::uint64_t seed,
                                        std::uint64_t codebook_stream, std::uint64_t bin_stream) {
  require(sizing.log2_k1 < 32, "K1 too large for 32-bit codeword indices");
  BinnedCodebook cb;
  cb.inner = generate_codebook(sizing.inner(), marginal_z1, seed, codebook_stream);
  cb.bins = sizing.k2();
  cb.bin_of.resize(cb.inner.size());
  cb.members.assign(cb.bins, {});
  Rng rng(derive_seed(seed, bin_stream));
  for (std::size_t i = 0; i < cb.bin_of.size(); ++i) {
    cb.bin_of[i] = static_cast<std::uint32_t>(rng.below(cb.bins));
    cb.members[cb.bin_of[i]].push_back(static_cast<std::uint32_t>(i));
  }
  return cb;
}

double mean_squared_bin_load(const BinnedCodebook& codebook) {
  double sum = 0.0;
  for (const auto& m : codebook.members) sum += static_cast<double>(m.size()) * static_cast<double>(m.size());
  return sum / static_cast<double>(codebook.bins);
}

const char* to_string(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::Unique: return "unique";
    case DecodeStatus::None: return "none";
    case DecodeStatus::Multiple: return "multiple";
  }
  return "?";
}

BinEncodeResult binned_encode(const BinnedCodebook& codebook, const SymbolSequence& input,
                              const ProbabilityTable& law_y1z1, const TypicalityParams& params) {
  const EncodeResult r = encode(codebook.inner, input, law_y1z1, params);
  return {codebook.bin_of[r.index], r.index, r.covered};
}

BinDecoder::BinDecoder(const ProbabilityTable& law_side_z, const TypicalityParams& params)
    : pair_((require(law_side_z.rank() == 2, "decoder law must be a (side, Z) table"), law_side_z),
            params) {}

BinDecodeResult BinDecoder::decode(const BinnedCodebook& codebook, std::uint64_t bin,
                                   std::span<const Symbol> side_info) const {
  require(bin < codebook.bins, "bin index out of range");
  require(codebook.inner.alphabet == pair_.law().axes()[1],
          "codebook alphabet does not match the decoder law");
  BinDecodeResult result;
  std::vector<std::uint32_t> scratch;
  bool found = false;
  for (std::uint32_t i : codebook.members[bin]) {
    if (!pair_.typical(side_info, codebook.inner.word(i), scratch)) continue;
    if (found) return {DecodeStatus::Multiple, 0};
    found = true;
    result = {DecodeStatus::Unique, i};
  }
  return result;
}

BinDecodeResult binned_decode(const BinnedCodebook& codebook, std::uint64_t bin,
                              const SymbolSequence& side_info, const ProbabilityTable& law_y2z1,
                              const TypicalityParams& params) {
  require(law_y2z1.rank() == 2, "decoder law must be a (Y2, Z1) table");
  require(side_info.alphabet == law_y2z1.axes()[0], "side information alphabet mismatch");
  require(side_info.size() == params.block_length, "side information length != block length");
  return BinDecoder(law_y2z1, params).decode(codebook, bin, side_info.symbols);
}

ProbabilityTable BinnedModel::triple() const {
  require(source.rank() == 2, "binned model source must be a (Y1, Y2) table");
  require(channel.inputs() == source.axes()[0], "channel inputs != |Y1|");
  const std::size_t a1 = source.axes()[0], a2 = source.axes()[1], kz = channel.outputs();
  std::vector<double> mass(a1 * a2 * kz);
  for (std::size_t y1 = 0; y1 < a1; ++y1)
    for (std::size_t y2 = 0; y2 < a2; ++y2)
      for (std::size_t z = 0; z < kz; ++z)
        mass[(y1 * a2 + y2) * kz + z] = source.at({y1, y2}) * channel(y1, z);
  return ProbabilityTable({a1, a2, kz}, std::move(mass));
}

double BinnedModel::i_y1z1() const { return mutual_information(triple(), {0}, {2}); }
double BinnedModel::i_y2z1() const { return mutual_information(triple(), {1}, {2}); }

double ErrorEventTally::overall_rate() const {
  return trials ? static_cast<double>(overall) / static_cast<double>(trials) : 0.0;
}

double ErrorEventTally::sigma() const {
  if (trials == 0) return 0.0;
  const double r = overall_rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(trials));
}

ErrorEventTally simulate_binned_code(const BinnedModel& model, const BinSizing& sizing,
                                     const TypicalityParams& params, std::size_t trials,
                                     std::uint64_t seed) {
  require(trials >= 1, "trials must be >= 1");
  require(params.block_length == sizing.n_prime, "params block length != n'");
  const ProbabilityTable triple = model.triple();
  const ProbabilityTable y1z1 = triple.marginal({0, 2});
  const ProbabilityTable y2z1 = triple.marginal({1, 2});
  const BinnedCodebook cb = generate_binned_codebook(sizing, triple.marginal({2}), seed);
  const PointEncoder encoder(y1z1, params);
  const BinDecoder decoder(y2z1, params);
  const JointTester source_test(model.source, params), triple_test(triple, params);
  const CategoricalSampler sampler(model.source.mass());
  const std::size_t n = sizing.n_prime, a2 = model.source.axes()[1];

  // bit 0..3: E0..E3, bit 4: overall error
  std::vector<std::uint8_t> flags(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, streams::kSource, t));
    std::vector<Symbol> y1(n), y2(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t c = sampler(rng);
      y1[k] = static_cast<Symbol>(c / a2);
      y2[k] = static_cast<Symbol>(c % a2);
    }
    std::vector<std::uint32_t> scratch;
    std::uint8_t f = 0;
    if (!source_test.typical(y1, y2, scratch)) f |= 1;
    const EncodeResult enc = encoder.encode(cb.inner, y1);
    if (!enc.covered) f |= 2;
    if (!triple_test.typical(y1, y2, cb.inner.word(enc.index), scratch)) f |= 4;
    const BinDecodeResult dec = decoder.decode(cb, cb.bin_of[enc.index], y2);
    if (dec.status == DecodeStatus::Multiple) f |= 8;
    // Overall error: the decoder's output (codeword 0 on failure) is not jointly
    // typical with the source pair.
    const std::size_t out = dec.status == DecodeStatus::Unique ? dec.index : 0;
    if (!triple_test.typical(y1, y2, cb.inner.word(out), scratch)) f |= 16;
    flags[t] = f;
  });

  ErrorEventTally tally;
  tally.n_prime = n;
  tally.trials = trials;
  tally.k1 = sizing.k1();
  tally.k2 = sizing.k2();
  tally.rate = sizing.rate();
  tally.second_moment = mean_squared_bin_load(cb);
  tally.seed = seed;
  for (std::uint8_t f : flags) {
    tally.e0 += f & 1;
    tally.e1 += (f >> 1) & 1;
    tally.e2 += (f >> 2) & 1;
    tally.e3 += (f >> 3) & 1;
    tally.overall += (f >> 4) & 1;
    if ((f & 16) && !(f & 15)) ++tally.union_violations;
  }
  return tally;
}

BinnedSchedule binned_schedule(const BinnedModel& model, double epsilon,
                               const std::vector<std::size_t>& lengths, std::size_t trials,
                               std::uint64_t seed) {
  require(!lengths.empty(), "empty block-length schedule");
  const double i1 = model.i_y1z1(), i2 = model.i_y2z1();
  BinnedSchedule sched;
  std::vector<double> rates, sigmas;
  sched.union_accounting = true;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const BinSizing sizing = choose_bin_sizes(i1, i2, epsilon / 2, epsilon / 2, lengths[i]);
    sched.points.push_back(simulate_binned_code(model, sizing, {epsilon, lengths[i]}, trials,
                                                derive_seed(seed, i)));
    rates.push_back(sched.points.back().overall_rate());
    sigmas.push_back(sched.points.back().sigma());
    if (sched.points.back().union_violations != 0) sched.union_accounting = false;
  }
  sched.nonincreasing = nonincreasing_within_2sigma(rates, sigmas);
  return sched;
}

std::string tally_csv_header() { return "nPrime,trials,e0,e1,e2,e3,overall,rateBitsPerSymbol,seed"; }

std::string to_csv_row(const ErrorEventTally& t) {
  std::ostringstream os;
  os << t.n_prime << ',' << t.trials << ',' << t.e0 << ',' << t.e1 << ',' << t.e2 << ',' << t.e3
     << ',' << t.overall << ',' << format_float(t.rate) << ',' << t.seed;
  return os.str();
}

}  // namespace tslab
