#include "tslab/probability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tslab/errors.hpp"
#include "tslab/rng.hpp"

namespace tslab {

namespace {

std::size_t product_checked(const std::vector<std::size_t>& axes) {
  std::size_t cells = 1;
  for (std::size_t a : axes) {
    require(a >= 1, "axis sizes must be >= 1");
    if (cells > kMaxTableCells / a) {
      throw BudgetError("table exceeds the 2^24 cell cap",
                        std::log2(static_cast<double>(cells)) + std::log2(static_cast<double>(a)));
    }
    cells *= a;
  }
  if (cells > kMaxTableCells) {
    throw BudgetError("table exceeds the 2^24 cell cap", std::log2(static_cast<double>(cells)));
  }
  return cells;
}

void normalize_or_throw(std::span<double> mass, const std::string& what) {
  double total = 0.0;
  for (double m : mass) {
    if (!std::isfinite(m) || m < 0.0) {
      throw ValidationError(what + ": entries must be finite and nonnegative");
    }
    total += m;
  }
  const double deviation = std::abs(total - 1.0);
  if (deviation > kMassTolerance) {
    std::ostringstream os;
    os << what << ": total mass " << total << " deviates from 1 by " << deviation;
    throw ValidationError(os.str());
  }
  if (deviation > 0.0) {
    for (double& m : mass) m /= total;
  }
}

void validate_axis_set(const ProbabilityTable& p, const AxisSet& axes, const char* name) {
  if (axes.empty()) throw ValidationError(std::string(name) + ": empty axis subset");
  std::vector<bool> seen(p.rank(), false);
  for (std::size_t a : axes) {
    if (a >= p.rank()) throw ValidationError(std::string(name) + ": axis out of range");
    if (seen[a]) throw ValidationError(std::string(name) + ": repeated axis");
    seen[a] = true;
  }
}

void require_disjoint(const AxisSet& a, const AxisSet& b, const char* name) {
  for (std::size_t x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) {
      throw ValidationError(std::string(name) + ": overlapping axis sets");
    }
  }
}

AxisSet concat(const AxisSet& a, const AxisSet& b) {
  AxisSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double entropy_of(std::span<const double> mass) {
  double h = 0.0;
  for (double m : mass) {
    if (m > 0.0) h -= m * std::log2(m);
  }
  return h;
}

}  // namespace

void Alphabet::validate() const {
  require(size >= 1, "alphabet size must be >= 1");
  if (labels.empty()) return;
  require(labels.size() == size, "alphabet label count must equal size");
  std::vector<std::string> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "alphabet labels must be distinct");
}

// --- ProbabilityTable -------------------------------------------------------

ProbabilityTable::ProbabilityTable(std::vector<std::size_t> axes, std::vector<double> mass)
    : axes_(std::move(axes)), mass_(std::move(mass)) {
  require(!axes_.empty(), "probability table needs at least one axis");
  const std::size_t cells = product_checked(axes_);
  if (mass_.size() != cells) {
    std::ostringstream os;
    os << "probability table: mass length " << mass_.size() << " != product of axis sizes "
       << cells;
    throw ValidationError(os.str());
  }
  normalize_or_throw(mass_, "probability table");
}

ProbabilityTable ProbabilityTable::uniform(std::vector<std::size_t> axes) {
  const std::size_t cells = product_checked(axes);
  return ProbabilityTable(std::move(axes),
                          std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
}

ProbabilityTable ProbabilityTable::point_mass(std::vector<std::size_t> axes,
                                              std::size_t flat_cell) {
  const std::size_t cells = product_checked(axes);
  require(flat_cell < cells, "point mass cell out of range");
  std::vector<double> mass(cells, 0.0);
  mass[flat_cell] = 1.0;
  return ProbabilityTable(std::move(axes), std::move(mass));
}

std::size_t ProbabilityTable::flat_index(std::span<const std::size_t> index) const {
  require(index.size() == axes_.size(), "index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    require(index[i] < axes_[i], "index out of range");
    flat = flat * axes_[i] + index[i];
  }
  return flat;
}

void ProbabilityTable::unravel(std::size_t flat, std::span<std::size_t> index) const {
  for (std::size_t i = axes_.size(); i-- > 0;) {
    index[i] = flat % axes_[i];
    flat /= axes_[i];
  }
}

ProbabilityTable ProbabilityTable::marginal(const AxisSet& keep) const {
  validate_axis_set(*this, keep, "marginal");
  std::vector<std::size_t> out_axes;
  out_axes.reserve(keep.size());
  for (std::size_t a : keep) out_axes.push_back(axes_[a]);

  // Stride of each source axis inside the output table (0 when summed out).
  std::vector<std::size_t> out_stride(axes_.size(), 0);
  std::size_t stride = 1;
  for (std::size_t k = keep.size(); k-- > 0;) {
    out_stride[keep[k]] = stride;
    stride *= axes_[keep[k]];
  }
  std::vector<double> out(stride, 0.0);
  std::vector<std::size_t> idx(axes_.size(), 0);
  std::size_t out_flat = 0;
  for (std::size_t flat = 0; flat < mass_.size(); ++flat) {
    out[out_flat] += mass_[flat];
    // odometer increment, keeping out_flat in sync
    for (std::size_t i = axes_.size(); i-- > 0;) {
      ++idx[i];
      out_flat += out_stride[i];
      if (idx[i] < axes_[i]) break;
      out_flat -= out_stride[i] * idx[i];
      idx[i] = 0;
    }
  }
  ProbabilityTable result;
  result.axes_ = std::move(out_axes);
  result.mass_ = std::move(out);
  return result;
}

ProbabilityTable ProbabilityTable::flattened() const {
  ProbabilityTable result;
  result.axes_ = {mass_.size()};
  result.mass_ = mass_;
  return result;
}

// --- ConditionalTable -------------------------------------------------------

ConditionalTable::ConditionalTable(std::size_t inputs, std::size_t outputs,
                                   std::vector<double> prob)
    : inputs_(inputs), outputs_(outputs), prob_(std::move(prob)) {
  require(inputs_ >= 1 && outputs_ >= 1, "conditional table dimensions must be >= 1");
  product_checked({inputs_, outputs_});
  require(prob_.size() == inputs_ * outputs_,
          "conditional table: entry count must equal inputs * outputs");
  for (std::size_t i = 0; i < inputs_; ++i) {
    normalize_or_throw(std::span<double>(prob_).subspan(i * outputs_, outputs_),
                       "conditional table row " + std::to_string(i));
  }
}

ConditionalTable ConditionalTable::identity(std::size_t size) {
  std::vector<double> prob(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) prob[i * size + i] = 1.0;
  return ConditionalTable(size, size, std::move(prob));
}

ConditionalTable ConditionalTable::constant(std::size_t inputs) {
  return ConditionalTable(inputs, 1, std::vector<double>(inputs, 1.0));
}

ConditionalTable ConditionalTable::bsc(double crossover) {
  require(crossover >= 0.0 && crossover <= 1.0, "crossover must lie in [0,1]");
  return ConditionalTable(2, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
}

ConditionalTable ConditionalTable::block_power(std::size_t n) const {
  require(n >= 1, "block order must be >= 1");
  const std::size_t in = checked_power(inputs_, n);
  const std::size_t out = checked_power(outputs_, n);
  product_checked({in, out});
  std::vector<double> prob(in * out, 0.0);
  for (std::size_t x = 0; x < in; ++x) {
    const auto xs = unpack_block(static_cast<Symbol>(x), inputs_, n);
    for (std::size_t z = 0; z < out; ++z) {
      const auto zs = unpack_block(static_cast<Symbol>(z), outputs_, n);
      double p = 1.0;
      for (std::size_t k = 0; k < n; ++k) p *= (*this)(xs[k], zs[k]);
      prob[x * out + z] = p;
    }
  }
  return ConditionalTable(in, out, std::move(prob));
}

// --- blocks -----------------------------------------------------------------

std::size_t checked_power(std::size_t base, std::size_t exponent) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint32_t>::max() / base) {
      throw BudgetError("block alphabet too large",
                        static_cast<double>(exponent) * std::log2(static_cast<double>(base)));
    }
    r *= base;
  }
  return r;
}

Symbol pack_block(std::span<const Symbol> block, std::size_t alphabet) {
  std::size_t v = 0;
  for (Symbol s : block) {
    require(s < alphabet, "symbol outside alphabet");
    v = v * alphabet + s;
  }
  return static_cast<Symbol>(v);
}

std::vector<Symbol> unpack_block(Symbol super_symbol, std::size_t alphabet, std::size_t n) {
  std::vector<Symbol> out(n);
  std::size_t v = super_symbol;
  for (std::size_t k = n; k-- > 0;) {
    out[k] = static_cast<Symbol>(v % alphabet);
    v /= alphabet;
  }
  return out;
}

SymbolSequence to_super_symbols(const SymbolSequence& seq, std::size_t n) {
  require(n >= 1, "block order must be >= 1");
  require(seq.size() % n == 0, "sequence length is not a multiple of the block order");
  SymbolSequence out{checked_power(seq.alphabet, n), {}};
  out.symbols.reserve(seq.size() / n);
  for (std::size_t i = 0; i < seq.size(); i += n) {
    out.symbols.push_back(
        pack_block(std::span<const Symbol>(seq.symbols).subspan(i, n), seq.alphabet));
  }
  return out;
}

SymbolSequence from_super_symbols(const SymbolSequence& seq, std::size_t base_alphabet,
                                  std::size_t n) {
  require(checked_power(base_alphabet, n) == seq.alphabet,
          "super-symbol alphabet does not match base alphabet and block order");
  SymbolSequence out{base_alphabet, {}};
  out.symbols.reserve(seq.size() * n);
  for (Symbol s : seq.symbols) {
    const auto block = unpack_block(s, base_alphabet, n);
    out.symbols.insert(out.symbols.end(), block.begin(), block.end());
  }
  return out;
}

ProbabilityTable block_source(const ProbabilityTable& source, std::size_t n) {
  require(source.rank() == 2, "block_source expects a two-axis source");
  require(n >= 1, "block order must be >= 1");
  const std::size_t a1 = source.axes()[0];
  const std::size_t a2 = source.axes()[1];
  const std::size_t b1 = checked_power(a1, n);
  const std::size_t b2 = checked_power(a2, n);
  product_checked({b1, b2});
  std::vector<double> mass(b1 * b2, 0.0);
  for (std::size_t x = 0; x < b1; ++x) {
    const auto xs = unpack_block(static_cast<Symbol>(x), a1, n);
    for (std::size_t y = 0; y < b2; ++y) {
      const auto ys = unpack_block(static_cast<Symbol>(y), a2, n);
      double p = 1.0;
      for (std::size_t k = 0; k < n && p > 0.0; ++k) p *= source.at({xs[k], ys[k]});
      mass[x * b2 + y] = p;
    }
  }
  return ProbabilityTable({b1, b2}, std::move(mass));
}

// --- information measures ----------------------------------------------------

double entropy(const ProbabilityTable& p, const AxisSet& axes) {
  validate_axis_set(p, axes, "entropy");
  return entropy_of(p.marginal(axes).mass());
}

double conditional_entropy(const ProbabilityTable& p, const AxisSet& target,
                           const AxisSet& given) {
  if (given.empty()) return entropy(p, target);
  require_disjoint(target, given, "conditional_entropy");
  const double h = entropy(p, concat(target, given)) - entropy(p, given);
  return std::max(0.0, h);
}

double mutual_information(const ProbabilityTable& p, const AxisSet& a, const AxisSet& b) {
  validate_axis_set(p, a, "mutual_information");
  validate_axis_set(p, b, "mutual_information");
  require_disjoint(a, b, "mutual_information");
  const double i = entropy(p, a) + entropy(p, b) - entropy(p, concat(a, b));
  return std::max(0.0, i);
}

double conditional_mutual_information(const ProbabilityTable& p, const AxisSet& a,
                                      const AxisSet& b, const AxisSet& c) {
  if (c.empty()) return mutual_information(p, a, b);
  validate_axis_set(p, a, "conditional_mutual_information");
  validate_axis_set(p, b, "conditional_mutual_information");
  validate_axis_set(p, c, "conditional_mutual_information");
  require_disjoint(a, b, "conditional_mutual_information");
  require_disjoint(a, c, "conditional_mutual_information");
  require_disjoint(b, c, "conditional_mutual_information");
  const double i = entropy(p, concat(a, c)) + entropy(p, concat(b, c)) -
                   entropy(p, concat(concat(a, b), c)) - entropy(p, c);
  return std::max(0.0, i);
}

double binary_entropy(double p) {
  require(p >= 0.0 && p <= 1.0, "binary_entropy argument must lie in [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double fano_bound(std::size_t alphabet_size, double error_probability) {
  require(alphabet_size >= 1, "Fano bound needs alphabet size >= 1");
  require(error_probability >= 0.0 && error_probability <= 1.0,
          "Fano bound error probability must lie in [0,1]");
  return 1.0 + std::log2(static_cast<double>(alphabet_size)) * error_probability;
}

// --- chain models -------------------------------------------------------------

std::size_t ChainModel::block_alphabet1() const {
  return checked_power(source.axes()[0], block_order);
}

std::size_t ChainModel::block_alphabet2() const {
  return checked_power(source.axes()[1], block_order);
}

ProbabilityTable ChainModel::block_source() const {
  return tslab::block_source(source, block_order);
}

ProbabilityTable ChainModel::joint() const {
  const ProbabilityTable pn = block_source();
  const std::size_t b1 = pn.axes()[0], b2 = pn.axes()[1];
  const std::size_t k1 = aux1.outputs(), k2 = aux2.outputs();
  const std::size_t cells = product_checked({b1, b2, k1, k2});
  std::vector<double> mass(cells, 0.0);
  std::size_t flat = 0;
  for (std::size_t y1 = 0; y1 < b1; ++y1) {
    for (std::size_t y2 = 0; y2 < b2; ++y2) {
      const double pxy = pn.at({y1, y2});
      for (std::size_t z1 = 0; z1 < k1; ++z1) {
        const double a = pxy * aux1(y1, z1);
        for (std::size_t z2 = 0; z2 < k2; ++z2) mass[flat++] = a * aux2(y2, z2);
      }
    }
  }
  return ProbabilityTable({b1, b2, k1, k2}, std::move(mass));
}

ChainModel compose_chain(ProbabilityTable source, ConditionalTable aux1, ConditionalTable aux2,
                         std::size_t n) {
  require(source.rank() == 2, "chain source must have two axes (X1, X2)");
  require(n >= 1, "block order must be >= 1");
  ChainModel model{std::move(source), std::move(aux1), std::move(aux2), n};
  if (model.aux1.inputs() != model.block_alphabet1()) {
    throw ValidationError("aux1 must condition on the X1 block alphabet of size |X1|^n = " +
                          std::to_string(model.block_alphabet1()));
  }
  if (model.aux2.inputs() != model.block_alphabet2()) {
    throw ValidationError("aux2 must condition on the X2 block alphabet of size |X2|^n = " +
                          std::to_string(model.block_alphabet2()));
  }
  product_checked({model.block_alphabet1(), model.block_alphabet2(), model.aux1.outputs(),
                   model.aux2.outputs()});
  return model;
}

FactorizationCheck verify_factorization(const ProbabilityTable& joint, double tolerance) {
  require(joint.rank() == 4, "verify_factorization expects a four-axis table");
  using namespace chain_axis;
  const ProbabilityTable p12 = joint.marginal({kY1, kY2});
  const ProbabilityTable p1z = joint.marginal({kY1, kZ1});
  const ProbabilityTable p2z = joint.marginal({kY2, kZ2});
  const ProbabilityTable p1 = joint.marginal({kY1});
  const ProbabilityTable p2 = joint.marginal({kY2});
  const auto& ax = joint.axes();
  FactorizationCheck check;
  std::size_t flat = 0;
  for (std::size_t y1 = 0; y1 < ax[0]; ++y1) {
    for (std::size_t y2 = 0; y2 < ax[1]; ++y2) {
      const double base = p12.at({y1, y2});
      for (std::size_t z1 = 0; z1 < ax[2]; ++z1) {
        const double q1 = p1[y1] > 0.0 ? p1z.at({y1, z1}) / p1[y1] : 0.0;
        for (std::size_t z2 = 0; z2 < ax[3]; ++z2) {
          const double q2 = p2[y2] > 0.0 ? p2z.at({y2, z2}) / p2[y2] : 0.0;
          const double dev = std::abs(joint[flat++] - base * q1 * q2);
          check.max_deviation = std::max(check.max_deviation, dev);
        }
      }
    }
  }
  check.factorizes = check.max_deviation <= tolerance;
  return check;
}

std::vector<std::pair<std::string, double>> InfoSummary::entries() const {
  return {
      {"H(Y1)", h_y1},
      {"H(Y2)", h_y2},
      {"H(Y1|Y2)", h_y1_given_y2},
      {"H(Y2|Y1)", h_y2_given_y1},
      {"I(Y1;Y2)", i_y1_y2},
      {"I(Y1;Z1)", i_y1_z1},
      {"I(Y2;Z2)", i_y2_z2},
      {"I(Y1;Z1|Z2)", i_y1_z1_given_z2},
      {"I(Y2;Z2|Z1)", i_y2_z2_given_z1},
      {"I(Y1,Y2;Z1,Z2)", i_y1y2_z1z2},
      {"I(Z1;Z2)", i_z1_z2},
      {"I(Y1;Z2)", i_y1_z2},
      {"I(Y2;Z1)", i_y2_z1},
  };
}

InfoSummary summarize(const ChainModel& model) {
  using namespace chain_axis;
  const ProbabilityTable j = model.joint();
  InfoSummary s;
  s.h_y1 = entropy(j, {kY1});
  s.h_y2 = entropy(j, {kY2});
  s.h_y1_given_y2 = conditional_entropy(j, {kY1}, {kY2});
  s.h_y2_given_y1 = conditional_entropy(j, {kY2}, {kY1});
  s.i_y1_y2 = mutual_information(j, {kY1}, {kY2});
  s.i_y1_z1 = mutual_information(j, {kY1}, {kZ1});
  s.i_y2_z2 = mutual_information(j, {kY2}, {kZ2});
  s.i_y1_z1_given_z2 = conditional_mutual_information(j, {kY1}, {kZ1}, {kZ2});
  s.i_y2_z2_given_z1 = conditional_mutual_information(j, {kY2}, {kZ2}, {kZ1});
  s.i_y1y2_z1z2 = mutual_information(j, {kY1, kY2}, {kZ1, kZ2});
  s.i_z1_z2 = mutual_information(j, {kZ1}, {kZ2});
  s.i_y1_z2 = mutual_information(j, {kY1}, {kZ2});
  s.i_y2_z1 = mutual_information(j, {kY2}, {kZ1});
  return s;
}

ChainIdentityReport chain_identity_check(const ChainModel& model) {
  using namespace chain_axis;
  const ProbabilityTable j = model.joint();
  const FactorizationCheck f = verify_factorization(j);
  if (!f.factorizes) {
    throw ValidationError("chain_identity_check: model does not factorize (max deviation " +
                          std::to_string(f.max_deviation) + ")");
  }
  ChainIdentityReport r;
  r.i_y1_z1 = mutual_information(j, {kY1}, {kZ1});
  r.i_y1_z1_given_z2 = conditional_mutual_information(j, {kY1}, {kZ1}, {kZ2});
  r.i_y2_z2 = mutual_information(j, {kY2}, {kZ2});
  r.i_y2_z2_given_z1 = conditional_mutual_information(j, {kY2}, {kZ2}, {kZ1});
  r.i_y1y2_z1z2 = mutual_information(j, {kY1, kY2}, {kZ1, kZ2});
  r.i_y1_z2 = mutual_information(j, {kY1}, {kZ2});
  r.decomposition_gap0 = std::abs(r.i_y1y2_z1z2 - r.i_y1_z1 - r.i_y2_z2_given_z1);
  r.decomposition_gap1 = std::abs(r.i_y1y2_z1z2 - r.i_y2_z2 - r.i_y1_z1_given_z2);
  r.conditioning_ok = r.i_y1_z1_given_z2 <= r.i_y1_z1 + 1e-12 &&
                      r.i_y2_z2_given_z1 <= r.i_y2_z2 + 1e-12;
  r.decomposition_ok = r.decomposition_gap0 <= 1e-10 && r.decomposition_gap1 <= 1e-10;
  return r;
}

namespace {

// Uniform draw from the simplex of `k` cells via normalized exponentials.
std::vector<double> simplex_draw(Rng& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log1p(-rng.uniform());
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

ChainModel random_chain_model(std::size_t x1, std::size_t x2, std::size_t z1, std::size_t z2,
                              std::uint64_t seed) {
  require(x1 >= 1 && x2 >= 1 && z1 >= 1 && z2 >= 1, "random_chain_model: alphabets must be >= 1");
  Rng rng(seed);
  ProbabilityTable source({x1, x2}, simplex_draw(rng, x1 * x2));
  auto channel = [&](std::size_t in, std::size_t out) {
    std::vector<double> rows;
    for (std::size_t i = 0; i < in; ++i) {
      const auto r = simplex_draw(rng, out);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    return ConditionalTable(in, out, std::move(rows));
  };
  ConditionalTable q1 = channel(x1, z1);
  ConditionalTable q2 = channel(x2, z2);
  return compose_chain(std::move(source), std::move(q1), std::move(q2), 1);
}

// --- sampling -------------------------------------------------------------------

SequenceTuple sample_iid(const ProbabilityTable& p, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample_iid: length must be >= 1");
  const CategoricalSampler sampler(p.mass());
  Rng rng(derive_seed(seed, streams::kSource));
  SequenceTuple out(p.rank());
  for (std::size_t a = 0; a < p.rank(); ++a) {
    out[a].alphabet = p.axes()[a];
    out[a].symbols.resize(n);
  }
  std::vector<std::size_t> idx(p.rank());
  for (std::size_t k = 0; k < n; ++k) {
    p.unravel(sampler(rng), idx);
    for (std::size_t a = 0; a < p.rank(); ++a) out[a].symbols[k] = static_cast<Symbol>(idx[a]);
  }
  return out;
}

ProbabilityTable empirical_distribution(const SequenceTuple& seq) {
  require(!seq.empty(), "empirical_distribution: empty tuple");
  const std::size_t n = seq.front().size();
  require(n >= 1, "empirical_distribution: empty sequence");
  std::vector<std::size_t> axes;
  for (const auto& s : seq) {
    require(s.size() == n, "empirical_distribution: sequences differ in length");
    axes.push_back(s.alphabet);
  }
  const std::size_t cells = product_checked(axes);
  std::vector<std::size_t> counts(cells, 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < seq.size(); ++a) {
      require(seq[a].symbols[k] < axes[a], "empirical_distribution: symbol outside alphabet");
      flat = flat * axes[a] + seq[a].symbols[k];
    }
    ++counts[flat];
  }
  std::vector<double> mass(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    mass[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
  }
  return ProbabilityTable(std::move(axes), std::move(mass));
}

}  // namespace tslab
