#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tslab/probability.hpp"
#include "tslab/rng.hpp"
#include "tslab/typicality.hpp"

namespace tslab {

inline constexpr double kDefaultCodebookBudgetLog2 = 26.0;
// Codebook storage cap, in symbols.
inline constexpr std::size_t kMaxCodebookSymbols = std::size_t{1} << 28;

struct CodeSizing {
  std::uint64_t codebook_size = 1;  // K
  double log2_size = 0.0;
  std::size_t n_prime = 1;
  double epsilon1 = 0.0;
  double mutual_information = 0.0;  // the I the code was sized against

  double rate() const { return log2_size / static_cast<double>(n_prime); }
  // n'(I + 2 eps1) <= log2 K <= n'(I + 3 eps1)
  bool in_window() const;
};

// K = ceil(2^{n'(I + 2 eps1)}). Throws BudgetError above the budget and
// ValidationError (naming the smallest feasible n') when log2 K overshoots
// the upper end of the window.
CodeSizing choose_codebook_size(double mutual_information, double epsilon1, std::size_t n_prime,
                                double budget_log2 = kDefaultCodebookBudgetLog2);

// A sizing with an explicitly chosen K, bypassing the window (for experiments
// that deliberately undersize the code).
CodeSizing fixed_codebook_size(std::uint64_t k, std::size_t n_prime,
                               double mutual_information = 0.0);

struct Codebook {
  std::size_t n_prime = 1;
  std::size_t alphabet = 1;
  std::uint64_t seed = 0;
  std::vector<Symbol> symbols;  // K * n', codeword i at [i n', (i+1) n')

  std::size_t size() const { return n_prime ? symbols.size() / n_prime : 0; }
  std::span<const Symbol> word(std::size_t i) const {
    return std::span<const Symbol>(symbols).subspan(i * n_prime, n_prime);
  }
  bool operator==(const Codebook&) const = default;
};

// Codewords drawn i.i.d. from `marginal` (one axis over Z).
Codebook generate_codebook(const CodeSizing& sizing, const ProbabilityTable& marginal,
                           std::uint64_t seed, std::uint64_t stream = streams::kCodebook);

struct EncodeResult {
  std::size_t index = 0;  // zero-based; 0 is the fallback when nothing is covered
  bool covered = false;
  bool operator==(const EncodeResult&) const = default;
};

// Typicality encoder against the joint law of (Y, Z). Returns the smallest
// index whose codeword is jointly typical with the input.
class PointEncoder {
 public:
  PointEncoder(const ProbabilityTable& joint_law, const TypicalityParams& params);

  EncodeResult encode(const Codebook& codebook, std::span<const Symbol> input) const;

 private:
  JointTester pair_;
  JointTester marginal_;
};

EncodeResult encode(const Codebook& codebook, const SymbolSequence& input,
                    const ProbabilityTable& joint_law, const TypicalityParams& params);

// Source Y with test channel q(z|y).
struct PointModel {
  ProbabilityTable source;
  ConditionalTable channel;

  ProbabilityTable joint() const;        // (Y, Z)
  ProbabilityTable z_marginal() const;
  double mutual_information() const;
};

struct PointCodeReport {
  std::size_t n_prime = 0;
  std::uint64_t codebook_size = 0;
  double rate = 0.0;
  double epsilon = 0.0;
  double epsilon1 = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;  // (Y, Z-hat) not jointly typical
  std::uint64_t seed = 0;
  double atypical_input_probability = 0.0;  // exact Pr{Y not typical}
  double proof_bound = 0.0;                 // atypical_input_probability + exp(-2^{n' eps1})

  double failure_rate() const;
  double sigma() const;
};

PointCodeReport simulate_point_code(const PointModel& model, const CodeSizing& sizing,
                                    const TypicalityParams& params, std::size_t trials,
                                    std::uint64_t seed);

struct PointCodeSchedule {
  std::vector<PointCodeReport> points;
  bool nonincreasing = false;  // within 2 sigma
};

// Sizes each n' by the window rule against I(Y;Z) and simulates it.
PointCodeSchedule point_code_schedule(const PointModel& model, double epsilon, double epsilon1,
                                      const std::vector<std::size_t>& lengths,
                                      std::size_t trials, std::uint64_t seed);

std::string to_json(const Codebook& codebook);

}  // namespace tslab
