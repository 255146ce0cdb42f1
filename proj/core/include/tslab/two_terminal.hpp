#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tslab/binned_code.hpp"
#include "tslab/point_code.hpp"
#include "tslab/probability.hpp"

namespace tslab {

struct RatePair {
  double r1 = 0.0;
  double r2 = 0.0;
};

// Bits per super-symbol.
struct CornerRates {
  RatePair corner0;  // (I(Y1;Z1), I(Y2;Z2|Z1))
  RatePair corner1;  // (I(Y1;Z1|Z2), I(Y2;Z2))
  double sum_rate = 0.0;  // I(Y1,Y2;Z1,Z2)
};

CornerRates corner_rates(const ChainModel& model);

// Per-coordinate distortion d(target letter, estimate letter) in [0, d_max].
struct DistortionCriterion {
  std::size_t targets = 1;
  std::size_t estimates = 1;
  std::vector<double> d;  // row-major targets x estimates
  double d_max = 1.0;

  double operator()(std::size_t target, std::size_t estimate) const {
    return d[target * estimates + estimate];
  }
  void validate() const;
  static DistortionCriterion hamming(std::size_t size);
  bool operator==(const DistortionCriterion&) const = default;
};

// psi: Z1 x Z2 -> target super-symbols. The target is a tuple of components
// (X1 for partial reconstruction, X1 and X2 for joint), each a block of
// `block_order` letters over its base alphabet; a target symbol is the
// row-major index over the component super-symbols.
struct ReconstructionMap {
  std::size_t z1 = 1;
  std::size_t z2 = 1;
  std::vector<std::size_t> component_alphabets;  // base alphabets of the target components
  std::size_t block_order = 1;
  std::vector<std::uint32_t> table;  // z1 * z2 entries

  std::size_t target_size() const;
  std::uint32_t operator()(std::size_t a, std::size_t b) const { return table[a * z2 + b]; }
  void validate() const;

  static ReconstructionMap constant(std::size_t z1, std::size_t z2,
                                    std::vector<std::size_t> components, std::size_t n,
                                    std::uint32_t value);
};

// Coordinate-wise psi; returns one base-alphabet sequence per target component,
// each of length n * n'.
SequenceTuple apply_reconstruction(const ReconstructionMap& psi, const SymbolSequence& z1,
                                   const SymbolSequence& z2);

// Letters of target component `component` at block coordinate `k` of target symbol t.
std::size_t target_letter(const ReconstructionMap& psi, std::uint32_t t, std::size_t component,
                          std::size_t k);

struct SchemeEpsilons {
  double epsilon = 0.45;  // typicality parameter
  double epsilon1 = 0.0;  // point-code and first-stage slack; 0 => epsilon / 2
  double epsilon4 = 0.0;  // binning slack; 0 => epsilon / 2

  SchemeEpsilons resolved() const;
  bool operator==(const SchemeEpsilons&) const = default;
};

struct CornerCoders;

// One corner: the `first` terminal is point-coded, the other is binned with
// the decoded first auxiliary as side information.
struct CornerScheme {
  int corner = 0;  // 0: terminal 1 first; 1: terminal 2 first
  ChainModel model;
  SchemeEpsilons eps;
  std::size_t n_prime = 1;
  std::uint64_t seed = 0;
  CodeSizing point_sizing;
  Codebook point;
  BinSizing bin_sizing;
  BinnedCodebook binned;
  std::shared_ptr<const CornerCoders> coders;  // encoders/decoders built with the scheme

  // Bits per source symbol, log2 |index set| / (n n').
  double rate1() const;
  double rate2() const;
};

enum class SchemeKind { Corner0, Corner1, TimeShared };

struct TwoTerminalScheme {
  SchemeKind kind = SchemeKind::Corner0;
  double lambda = 1.0;
  std::size_t super_blocks = 1;  // L; 1 for a pure corner
  std::shared_ptr<const CornerScheme> scheme0;
  std::shared_ptr<const CornerScheme> scheme1;

  std::size_t block_order() const;
  std::size_t inner_length() const;
  // Number of inner blocks run by scheme0 (floor(lambda L)).
  std::size_t blocks0() const;
  std::size_t input_length() const;  // L n n' source symbols per terminal
  double rate1() const;
  double rate2() const;
};

TwoTerminalScheme build_corner_scheme(const ChainModel& model, int which_corner,
                                      const SchemeEpsilons& eps, std::size_t n_prime,
                                      std::uint64_t seed);

inline constexpr std::size_t kDefaultSuperBlocks = 10;

TwoTerminalScheme build_timeshared_scheme(const TwoTerminalScheme& scheme0,
                                          const TwoTerminalScheme& scheme1, double lambda,
                                          std::size_t super_blocks = kDefaultSuperBlocks);

struct StageFlags {
  bool source_atypical = false;      // (Y1, Y2) pair
  bool first_uncovered = false;      // point encoder found nothing
  bool second_uncovered = false;     // binned encoder found nothing
  bool bin_none = false;             // no typical candidate in the bin
  bool bin_multiple = false;         // more than one candidate
  bool quadruple_atypical = false;   // (Y1, Y2, Z1-hat, Z2-hat) against the model
  bool success() const { return !quadruple_atypical; }
};

struct CodingOutcome {
  SymbolSequence z1;  // decoded auxiliary words over Z1 / Z2, length L n'
  SymbolSequence z2;
  std::vector<StageFlags> blocks;  // one per inner block
  bool success() const;
};

// Inputs are base-alphabet sequences of length L n n'.
CodingOutcome encode_decode(const TwoTerminalScheme& scheme, const SymbolSequence& x1,
                            const SymbolSequence& x2);

enum class Problem { Joint, Partial, WynerZiv, SlepianWolf, BergerYeung };

const char* to_string(Problem p);
Problem problem_from_string(const std::string& s);

struct ExperimentSpec {
  Problem problem = Problem::Joint;
  ChainModel model;
  ReconstructionMap psi;
  DistortionCriterion distortion;
  SchemeEpsilons eps;
  std::vector<std::size_t> schedule;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double lambda = 1.0;  // 1: corner0, 0: corner1, else time sharing
  std::size_t super_blocks = kDefaultSuperBlocks;
};

struct ExperimentRow {
  Problem problem = Problem::Joint;
  std::size_t n = 1;
  std::size_t n_prime = 1;
  double lambda = 1.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double target_d = 0.0;    // exact E d under psi with the model's auxiliaries
  double measured_d = 0.0;  // average per-symbol distortion (symbol error for lossless)
  double measured_sigma = 0.0;
  double error_rate = 0.0;  // coding failure rate (block error for Slepian-Wolf)
  double delta = 0.0;       // measured_d - target_d
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  bool delta_nonincreasing = false;   // within 2 sigma
  bool error_nonincreasing = false;   // within 2 sigma
};

// Exact E d_n / n for the model's auxiliaries under psi.
double exact_expected_distortion(Problem problem, const ChainModel& model,
                                 const ReconstructionMap& psi, const DistortionCriterion& d);

ExperimentReport run_rd_experiment(const ExperimentSpec& spec);

std::string experiment_csv_header();
std::string to_csv_row(const ExperimentRow& row);

}  // namespace tslab
