#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tslab/point_code.hpp"

namespace tslab {

struct BinSizing {
  std::size_t log2_k1 = 0;
  std::size_t log2_k2 = 0;
  std::size_t n_prime = 1;
  double epsilon1 = 0.0;
  double epsilon4 = 0.0;
  double i_y1z1 = 0.0;
  double i_y2z1 = 0.0;
  bool clamped = false;  // n'(I(Y2;Z1) - 2 eps4) < 0, so no binning gain

  std::uint64_t k1() const { return std::uint64_t{1} << log2_k1; }
  std::uint64_t k2() const { return std::uint64_t{1} << log2_k2; }
  double rate() const { return static_cast<double>(log2_k2) / static_cast<double>(n_prime); }
  CodeSizing inner() const;
};

// log2 K1 = ceil(n'(I1 + 2 eps1)); log2 K2 = log2 K1 - floor(n'(I2 - 2 eps4)),
// with the subtracted term clamped at 0.
BinSizing choose_bin_sizes(double i_y1z1, double i_y2z1, double epsilon1, double epsilon4,
                           std::size_t n_prime,
                           double budget_log2 = kDefaultCodebookBudgetLog2);

// Same K1, explicitly chosen K2 = 2^log2_k2 (log2_k2 <= log2 K1).
BinSizing with_bins(BinSizing sizing, std::size_t log2_k2);

struct BinnedCodebook {
  Codebook inner;
  std::uint64_t bins = 1;
  std::vector<std::uint32_t> bin_of;                 // T, zero-based bins
  std::vector<std::vector<std::uint32_t>> members;   // codeword indices per bin, ascending

  bool operator==(const BinnedCodebook&) const = default;
};

BinnedCodebook generate_binned_codebook(const BinSizing& sizing,
                                        const ProbabilityTable& marginal_z1, std::uint64_t seed,
                                        std::uint64_t codebook_stream = streams::kCodebook,
                                        std::uint64_t bin_stream = streams::kBinMap);

// Realized mean of squared bin loads, (1/K2) sum_j |T^{-1}(j)|^2.
double mean_squared_bin_load(const BinnedCodebook& codebook);

struct BinEncodeResult {
  std::uint32_t bin = 0;
  std::size_t index = 0;  // inner codeword chosen by the typicality encoder
  bool covered = false;
};

enum class DecodeStatus { Unique, None, Multiple };

struct BinDecodeResult {
  DecodeStatus status = DecodeStatus::None;
  std::size_t index = 0;  // valid only when status == Unique
};

const char* to_string(DecodeStatus status);

BinEncodeResult binned_encode(const BinnedCodebook& codebook, const SymbolSequence& input,
                              const ProbabilityTable& law_y1z1, const TypicalityParams& params);

BinDecodeResult binned_decode(const BinnedCodebook& codebook, std::uint64_t bin,
                              const SymbolSequence& side_info, const ProbabilityTable& law_y2z1,
                              const TypicalityParams& params);

// Decoder reusable across calls: unique jointly typical codeword within a bin.
class BinDecoder {
 public:
  BinDecoder(const ProbabilityTable& law_side_z, const TypicalityParams& params);
  BinDecodeResult decode(const BinnedCodebook& codebook, std::uint64_t bin,
                         std::span<const Symbol> side_info) const;

 private:
  JointTester pair_;
};

// Source pair (Y1, Y2) and test channel q(z1 | y1).
struct BinnedModel {
  ProbabilityTable source;
  ConditionalTable channel;

  ProbabilityTable triple() const;  // (Y1, Y2, Z1)
  double i_y1z1() const;
  double i_y2z1() const;
};

struct ErrorEventTally {
  std::size_t n_prime = 0;
  std::size_t trials = 0;
  std::size_t e0 = 0;  // (Y1, Y2) atypical
  std::size_t e1 = 0;  // no codeword typical with Y1
  std::size_t e2 = 0;  // (Y1, Y2, chosen codeword) atypical
  std::size_t e3 = 0;  // more than one typical candidate in the bin
  std::size_t overall = 0;           // (Y1, Y2, decoded codeword) atypical
  std::size_t union_violations = 0;  // trials with an error but no recorded event
  std::uint64_t k1 = 0, k2 = 0;
  double rate = 0.0;
  double second_moment = 0.0;  // realized mean squared bin load
  std::uint64_t seed = 0;

  double overall_rate() const;
  double sigma() const;
};

ErrorEventTally simulate_binned_code(const BinnedModel& model, const BinSizing& sizing,
                                     const TypicalityParams& params, std::size_t trials,
                                     std::uint64_t seed);

struct BinnedSchedule {
  std::vector<ErrorEventTally> points;
  bool nonincreasing = false;
  bool union_accounting = false;
};

// eps1 = eps4 = epsilon / 2 at each n'.
BinnedSchedule binned_schedule(const BinnedModel& model, double epsilon,
                               const std::vector<std::size_t>& lengths, std::size_t trials,
                               std::uint64_t seed);

// nPrime,trials,e0,e1,e2,e3,overall,rateBitsPerSymbol,seed
std::string tally_csv_header();
std::string to_csv_row(const ErrorEventTally& tally);

}  // namespace tslab
