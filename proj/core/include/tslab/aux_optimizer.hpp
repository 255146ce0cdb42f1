#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tslab/probability.hpp"

namespace tslab {

enum class AuxKind { Free, Identity, Constant };

struct AuxSpec {
  std::size_t card_z1 = 0;  // 0 => |branch alphabet| + 2
  std::size_t card_z2 = 0;
  double grid_step = 0.1;   // weight-simplex step of region sweeps
  std::size_t restarts = 32;
  std::size_t max_iterations = 2000;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t resolved_card1(std::size_t alphabet) const { return card_z1 ? card_z1 : alphabet + 2; }
  std::size_t resolved_card2(std::size_t alphabet) const { return card_z2 ? card_z2 : alphabet + 2; }
  bool operator==(const AuxSpec&) const = default;
};

// Law p(a, b) q1(u | a) q2(v | b); the decoder forms t = psi(u, v) and pays
// cost(a, b, t).
struct AuxProblem {
  ProbabilityTable source;  // axes (A, B)
  AuxKind kind_u = AuxKind::Free;
  std::size_t card_u = 1;
  AuxKind kind_v = AuxKind::Free;
  std::size_t card_v = 1;
  std::size_t estimates = 1;
  std::vector<double> cost;  // index (a * |B| + b) * estimates + t

  std::size_t size_a() const { return source.axes()[0]; }
  std::size_t size_b() const { return source.axes()[1]; }
  void validate() const;
  bool operator==(const AuxProblem&) const = default;
};

struct AuxWitness {
  ConditionalTable q1;              // q1(u | a)
  ConditionalTable q2;              // q2(v | b)
  std::vector<std::uint32_t> psi;   // card_u * card_v, row-major in u

  bool operator==(const AuxWitness&) const = default;
};

// Lexicographic order over (q1, q2, psi) entries; breaks objective ties.
bool witness_less(const AuxWitness& a, const AuxWitness& b);

struct AuxMeasures {
  double i_a_u = 0.0;
  double i_b_v = 0.0;
  double i_a_u_given_v = 0.0;
  double i_b_v_given_u = 0.0;
  double i_ab_uv = 0.0;
  double cost = 0.0;  // E cost(A, B, psi(U, V))
};

// Exact information quantities and expected cost of a witness.
AuxMeasures evaluate(const AuxProblem& problem, const AuxWitness& witness);

// Pointwise minimizer of the expected cost, smallest estimate on ties.
std::vector<std::uint32_t> best_reconstruction(const AuxProblem& problem,
                                               const ConditionalTable& q1,
                                               const ConditionalTable& q2);

// Witness with the Identity/Constant auxiliaries of `problem` and the given
// tables for Free ones; psi is chosen pointwise.
AuxWitness complete_witness(const AuxProblem& problem, ConditionalTable q1, ConditionalTable q2);

// Identity auxiliaries where `identity_u` / `identity_v` is set, constant
// otherwise, regardless of the problem's kinds (anchors of region sweeps).
AuxWitness anchor_witness(const AuxProblem& problem, bool identity_u, bool identity_v);

struct AuxWeights {
  double alpha = 1.0;  // weight of I(A;U|V)
  double beta = 0.0;   // weight of I(B;V)
  double slope = 0.0;  // weight of E cost
};

struct AuxResult {
  AuxWitness witness;
  AuxMeasures measures;
  double objective = 0.0;
  std::size_t iterations = 0;
};

double objective(const AuxMeasures& m, const AuxWeights& w);

// Alternating minimization of alpha I(A;U|V) + beta I(B;V) + slope E cost:
// exact psi step, then q1 and q2 steps each minimizing a variational upper
// bound that is tight at the current point, so the objective never increases.
// Runs `spec.restarts` random starts plus the warm starts, keeps the best.
AuxResult minimize_aux(const AuxProblem& problem, const AuxWeights& weights, const AuxSpec& spec,
                       std::uint64_t seed, std::span<const AuxWitness> warm = {});

}  // namespace tslab
