#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tslab {

using Symbol = std::uint32_t;
using AxisSet = std::vector<std::size_t>;

// Dense tables above this many cells are rejected outright.
inline constexpr std::size_t kMaxTableCells = std::size_t{1} << 24;
// pmf sums within this distance of 1 are renormalized; anything further is an error.
inline constexpr double kMassTolerance = 1e-9;

struct Alphabet {
  std::size_t size = 1;
  std::vector<std::string> labels;  // empty, or exactly `size` distinct names

  void validate() const;
};

// Finite joint pmf over a product of alphabets, stored row-major
// (last axis fastest).
class ProbabilityTable {
 public:
  ProbabilityTable() = default;
  ProbabilityTable(std::vector<std::size_t> axes, std::vector<double> mass);

  static ProbabilityTable uniform(std::vector<std::size_t> axes);
  static ProbabilityTable point_mass(std::vector<std::size_t> axes, std::size_t flat_cell);

  const std::vector<std::size_t>& axes() const noexcept { return axes_; }
  std::size_t rank() const noexcept { return axes_.size(); }
  std::size_t cell_count() const noexcept { return mass_.size(); }
  std::span<const double> mass() const noexcept { return mass_; }

  double at(std::span<const std::size_t> index) const { return mass_[flat_index(index)]; }
  double at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }
  double operator[](std::size_t flat) const { return mass_[flat]; }

  std::size_t flat_index(std::span<const std::size_t> index) const;
  void unravel(std::size_t flat, std::span<std::size_t> index) const;

  // Marginal over `keep`, with axes in the order given.
  ProbabilityTable marginal(const AxisSet& keep) const;
  // Same mass viewed as a single axis of size cell_count().
  ProbabilityTable flattened() const;

  bool operator==(const ProbabilityTable&) const = default;

 private:
  std::vector<std::size_t> axes_;
  std::vector<double> mass_;
};

// Row-stochastic matrix q(output | input). Rows whose input has zero mass
// under the governing source are still required to be valid pmfs.
class ConditionalTable {
 public:
  ConditionalTable() = default;
  ConditionalTable(std::size_t inputs, std::size_t outputs, std::vector<double> prob);

  static ConditionalTable identity(std::size_t size);
  static ConditionalTable constant(std::size_t inputs);
  // Binary symmetric channel with the given crossover probability.
  static ConditionalTable bsc(double crossover);
  // q(z|x) = product over block coordinates of the per-letter channel.
  ConditionalTable block_power(std::size_t n) const;

  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t outputs() const noexcept { return outputs_; }
  double operator()(std::size_t input, std::size_t output) const {
    return prob_[input * outputs_ + output];
  }
  std::span<const double> row(std::size_t input) const {
    return std::span<const double>(prob_).subspan(input * outputs_, outputs_);
  }
  std::span<const double> data() const noexcept { return prob_; }

  bool operator==(const ConditionalTable&) const = default;

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::vector<double> prob_;
};

struct SymbolSequence {
  std::size_t alphabet = 1;
  std::vector<Symbol> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
  bool operator==(const SymbolSequence&) const = default;
};

// One sequence per table axis, all of equal length.
using SequenceTuple = std::vector<SymbolSequence>;

// --- block (super-symbol) helpers -----------------------------------------

std::size_t checked_power(std::size_t base, std::size_t exponent);

// Super-symbol index of a length-n block, first coordinate most significant.
Symbol pack_block(std::span<const Symbol> block, std::size_t alphabet);
std::vector<Symbol> unpack_block(Symbol super_symbol, std::size_t alphabet, std::size_t n);

// Groups a sequence into consecutive length-n blocks.
SymbolSequence to_super_symbols(const SymbolSequence& seq, std::size_t n);
SymbolSequence from_super_symbols(const SymbolSequence& seq, std::size_t base_alphabet,
                                  std::size_t n);

// n-th i.i.d. extension of a two-axis source: p_n(x1^n, x2^n).
ProbabilityTable block_source(const ProbabilityTable& source, std::size_t n);

// --- information measures (bits) ------------------------------------------

double entropy(const ProbabilityTable& p, const AxisSet& axes);
double conditional_entropy(const ProbabilityTable& p, const AxisSet& target,
                           const AxisSet& given);
double mutual_information(const ProbabilityTable& p, const AxisSet& a, const AxisSet& b);
double conditional_mutual_information(const ProbabilityTable& p, const AxisSet& a,
                                      const AxisSet& b, const AxisSet& c);

double binary_entropy(double p);

// Weakened Fano bound 1 + log2|U| * Pr{U != g(V)}.
double fano_bound(std::size_t alphabet_size, double error_probability);

// --- chain models Z1 -> X1^n -> X2^n -> Z2 ----------------------------------

struct ChainModel {
  ProbabilityTable source;  // p(x1, x2), single letter
  ConditionalTable aux1;    // q1(z1 | x1^n)
  ConditionalTable aux2;    // q2(z2 | x2^n)
  std::size_t block_order = 1;

  std::size_t block_alphabet1() const;
  std::size_t block_alphabet2() const;

  // p_n(x1^n, x2^n) over super-symbols.
  ProbabilityTable block_source() const;
  // Joint over (X1^n, X2^n, Z1, Z2), axes in that order.
  ProbabilityTable joint() const;
};

namespace chain_axis {
inline constexpr std::size_t kY1 = 0;
inline constexpr std::size_t kY2 = 1;
inline constexpr std::size_t kZ1 = 2;
inline constexpr std::size_t kZ2 = 3;
}  // namespace chain_axis

ChainModel compose_chain(ProbabilityTable source, ConditionalTable aux1, ConditionalTable aux2,
                         std::size_t n);

struct FactorizationCheck {
  bool factorizes = false;
  double max_deviation = 0.0;
};

// Tests joint(y1,y2,z1,z2) == p(y1,y2) q1(z1|y1) q2(z2|y2) with the factors
// recovered from the table itself.
FactorizationCheck verify_factorization(const ProbabilityTable& joint, double tolerance = 1e-9);

// Information quantities of a chain model in bits per super-symbol.
struct InfoSummary {
  double h_y1 = 0, h_y2 = 0, h_y1_given_y2 = 0, h_y2_given_y1 = 0;
  double i_y1_y2 = 0;
  double i_y1_z1 = 0, i_y2_z2 = 0;
  double i_y1_z1_given_z2 = 0, i_y2_z2_given_z1 = 0;
  double i_y1y2_z1z2 = 0;
  double i_z1_z2 = 0;
  double i_y1_z2 = 0, i_y2_z1 = 0;

  std::vector<std::pair<std::string, double>> entries() const;
};

InfoSummary summarize(const ChainModel& model);

struct ChainIdentityReport {
  double i_y1_z1 = 0;
  double i_y1_z1_given_z2 = 0;
  double i_y2_z2 = 0;
  double i_y2_z2_given_z1 = 0;
  double i_y1y2_z1z2 = 0;
  double i_y1_z2 = 0;
  double decomposition_gap0 = 0;  // |I(Y1Y2;Z1Z2) - I(Y1;Z1) - I(Y2;Z2|Z1)|
  double decomposition_gap1 = 0;  // |I(Y1Y2;Z1Z2) - I(Y2;Z2) - I(Y1;Z1|Z2)|
  bool conditioning_ok = false;   // both conditional MIs <= unconditional + 1e-12
  bool decomposition_ok = false;  // both gaps <= 1e-10
  bool passed() const noexcept { return conditioning_ok && decomposition_ok; }
};

ChainIdentityReport chain_identity_check(const ChainModel& model);

// Block order 1 model with every table drawn uniformly from its simplex.
ChainModel random_chain_model(std::size_t x1, std::size_t x2, std::size_t z1, std::size_t z2,
                              std::uint64_t seed);

// --- sampling ---------------------------------------------------------------

SequenceTuple sample_iid(const ProbabilityTable& p, std::size_t n, std::uint64_t seed);

ProbabilityTable empirical_distribution(const SequenceTuple& seq);

}  // namespace tslab
