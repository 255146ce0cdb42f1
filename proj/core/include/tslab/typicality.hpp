#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tslab/probability.hpp"

namespace tslab {

struct TypicalityParams {
  double epsilon = 0.1;
  std::size_t block_length = 1;

  void validate() const;
};

struct TypicalityVerdict {
  bool is_typical = false;
  // max over cells of |X| * |N(x)/n - p(x)|; is_typical <=> max_deviation < epsilon.
  double max_deviation = 0.0;
};

// Per-cell deviation |X| * |count/n - p| with values within 1e-12 of epsilon
// snapped to epsilon, so that boundary ties are decided as atypical regardless
// of rounding in count/n.
double cell_deviation(std::size_t count, std::size_t n, double p, std::size_t cells,
                      double epsilon);

// Precomputed admissible count range [lo, hi] for every cell of a table.
// A count vector is typical iff every cell count lies in its range.
class TypicalityWindow {
 public:
  TypicalityWindow(const ProbabilityTable& p, const TypicalityParams& params);

  bool admits(std::size_t cell, std::size_t count) const {
    return count >= lo_[cell] && count <= hi_[cell];
  }
  bool admits(const std::vector<std::size_t>& counts) const;
  std::size_t lo(std::size_t cell) const { return lo_[cell]; }
  std::size_t hi(std::size_t cell) const { return hi_[cell]; }
  // True when some cell admits no count at all.
  bool empty() const noexcept { return empty_; }

 private:
  std::vector<std::size_t> lo_;
  std::vector<std::size_t> hi_;
  bool empty_ = false;
};

// Fast joint-typicality test of aligned sequences against a fixed law, used in
// encoder/decoder scans. Aborts as soon as a cell count leaves its window.
class JointTester {
 public:
  JointTester(const ProbabilityTable& law, const TypicalityParams& params);

  // One span per table axis, each of length block_length. `scratch` is reused
  // between calls to avoid allocation.
  bool typical(std::span<const std::span<const Symbol>> seqs,
               std::vector<std::uint32_t>& scratch) const;
  bool typical(std::span<const Symbol> a, std::span<const Symbol> b,
               std::vector<std::uint32_t>& scratch) const;
  bool typical(std::span<const Symbol> a, std::span<const Symbol> b, std::span<const Symbol> c,
               std::vector<std::uint32_t>& scratch) const;

  const ProbabilityTable& law() const noexcept { return law_; }
  std::size_t block_length() const noexcept { return n_; }

 private:
  ProbabilityTable law_;
  std::size_t n_;
  std::vector<std::uint32_t> lo_, hi_;
  bool empty_ = false;
};

std::size_t count_occurrences(const SymbolSequence& seq, Symbol symbol);
// Count of the joint symbol (one entry per sequence) in a sequence tuple.
std::size_t count_occurrences(const SequenceTuple& seq, const std::vector<Symbol>& symbol);

// Joint type counts of a tuple, row-major over the product of its alphabets.
std::vector<std::size_t> joint_counts(const SequenceTuple& seq);

TypicalityVerdict is_strongly_typical(const SequenceTuple& seq, const ProbabilityTable& p,
                                      const TypicalityParams& params);
TypicalityVerdict is_strongly_typical(const SymbolSequence& seq, const ProbabilityTable& p,
                                      const TypicalityParams& params);

// A fixed sequence on one axis of the joint table; the other axes are drawn
// i.i.d. from their joint marginal.
struct Conditioning {
  std::size_t axis = 0;
  SymbolSequence sequence;
};

enum class ExactMethod { Auto, TypeClasses, Enumeration };

// Budget for both exact routes: type-class combinations or enumerated sequences.
inline constexpr std::size_t kExactEnumerationCap = std::size_t{1} << 24;

double exact_typicality_probability(const ProbabilityTable& p, const TypicalityParams& params,
                                    const std::optional<Conditioning>& condition = std::nullopt,
                                    ExactMethod method = ExactMethod::Auto);

struct MonteCarloEstimate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
  double standard_error() const;
};

MonteCarloEstimate estimate_typicality_probability(
    const ProbabilityTable& p, const TypicalityParams& params,
    const std::optional<Conditioning>& condition, std::size_t trials, std::uint64_t seed);

// Sequence of length n whose type is the largest-remainder rounding of the
// marginal (exact whenever n * p(x) is integral for all x).
SymbolSequence representative_sequence(const ProbabilityTable& marginal, std::size_t n);

struct SandwichReport {
  std::size_t n = 0;
  double epsilon = 0.0;
  double probability = 0.0;
  double mutual_information = 0.0;
  double epsilon1 = 0.0;  // smallest value for which both bounds hold
  double lower = 0.0;     // 2^{-n(I + epsilon1)}
  double upper = 0.0;     // 2^{-n(I - epsilon1)}
  bool holds = false;     // false only when probability is 0
};

// `pair` is the joint law of (Y, Z) on axes (0, 1); `condition_seq` fixes Y.
SandwichReport check_sandwich_bounds(const ProbabilityTable& pair,
                                     const SymbolSequence& condition_seq,
                                     const TypicalityParams& params);

struct SandwichSchedule {
  std::vector<SandwichReport> points;
  bool shrinking = false;  // epsilon1 nonincreasing along the schedule
};

// Runs the sandwich check at each n with representative Y conditioning.
SandwichSchedule sandwich_schedule(const ProbabilityTable& pair, double epsilon,
                                   const std::vector<std::size_t>& lengths);

struct MarkovLemmaPoint {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t conditioned = 0;  // trials where (Y1,Y2) and (Y1,Z1) were typical
  std::size_t failures = 0;     // ... and (Y1,Y2,Z1) was not
  double rate() const;
  double sigma() const;
};

struct MarkovLemmaReport {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<MarkovLemmaPoint> points;
  bool nonincreasing = false;  // within 2 sigma
};

// Uses model.aux1 on the super-symbol source; model.aux2 is ignored.
MarkovLemmaPoint markov_lemma_point(const ChainModel& model, const TypicalityParams& params,
                                    std::size_t trials, std::uint64_t seed);
MarkovLemmaReport check_markov_lemma(const ChainModel& model, double epsilon,
                                     const std::vector<std::size_t>& lengths,
                                     std::size_t trials, std::uint64_t seed);

// Shared trend check: each rate may exceed the previous by at most 2 combined sigma.
bool nonincreasing_within_2sigma(const std::vector<double>& rates,
                                 const std::vector<double>& sigmas);

std::string to_json(const SandwichReport& report);
std::string to_json(const MarkovLemmaReport& report);

}  // namespace tslab
