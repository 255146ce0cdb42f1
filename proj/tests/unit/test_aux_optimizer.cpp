#include <doctest.h>

#include <cmath>

#include "tslab/aux_optimizer.hpp"
#include "tslab/errors.hpp"

using namespace tslab;

namespace {

ProbabilityTable dsbs(double p) {
  return ProbabilityTable({2, 2}, {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)});
}

// Wyner-Ziv shape: free U over A, identity V = B, Hamming on A.
AuxProblem wyner_ziv(const ProbabilityTable& src, std::size_t card_u) {
  AuxProblem p;
  p.source = src;
  p.kind_u = AuxKind::Free;
  p.card_u = card_u;
  p.kind_v = AuxKind::Identity;
  p.card_v = src.axes()[1];
  p.estimates = src.axes()[0];
  for (std::size_t a = 0; a < p.size_a(); ++a)
    for (std::size_t b = 0; b < p.size_b(); ++b)
      for (std::size_t t = 0; t < p.estimates; ++t) p.cost.push_back(a == t ? 0.0 : 1.0);
  return p;
}

ConditionalTable random_channel(std::size_t in, std::size_t out, std::uint64_t seed) {
  std::vector<double> v;
  std::uint64_t x = seed * 2654435761u + 1;
  for (std::size_t i = 0; i < in; ++i) {
    double sum = 0;
    std::vector<double> row;
    for (std::size_t j = 0; j < out; ++j) {
      x = x * 6364136223846793005ULL + 1442695040888963407ULL;
      row.push_back(0.05 + double(x >> 11) / double(1ULL << 53));
      sum += row.back();
    }
    for (double r : row) v.push_back(r / sum);
  }
  return ConditionalTable(in, out, v);
}

}  // namespace

TEST_CASE("spec validation") {
  AuxSpec s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.resolved_card1(4) == 6);
  s.card_z1 = 3;
  CHECK(s.resolved_card1(4) == 3);
  AuxSpec bad = s;
  bad.grid_step = 0.6;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.grid_step = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.restarts = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  AuxProblem p = wyner_ziv(dsbs(0.25), 3);
  CHECK_NOTHROW(p.validate());
  p.cost.pop_back();
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("measures match the chain model") {
  const ProbabilityTable src = dsbs(0.25);
  const AuxProblem p = wyner_ziv(src, 3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ConditionalTable q1 = random_channel(2, 3, s);
    const AuxWitness w = complete_witness(p, q1, ConditionalTable::identity(2));
    const AuxMeasures m = evaluate(p, w);
    const ProbabilityTable j = compose_chain(src, q1, ConditionalTable::identity(2), 1).joint();
    using namespace chain_axis;
    CHECK(m.i_a_u == doctest::Approx(mutual_information(j, {kY1}, {kZ1})).epsilon(1e-12));
    CHECK(m.i_b_v == doctest::Approx(mutual_information(j, {kY2}, {kZ2})).epsilon(1e-12));
    CHECK(m.i_a_u_given_v ==
          doctest::Approx(conditional_mutual_information(j, {kY1}, {kZ1}, {kZ2})).epsilon(1e-12));
    CHECK(m.i_ab_uv ==
          doctest::Approx(mutual_information(j, {kY1, kY2}, {kZ1, kZ2})).epsilon(1e-12));
    double cost = 0.0;
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t u = 0; u < 3; ++u)
          cost += src.at({a, b}) * q1(a, u) * (w.psi[u * 2 + b] == a ? 0.0 : 1.0);
    CHECK(m.cost == doctest::Approx(cost).epsilon(1e-12));
  }
}

TEST_CASE("pointwise reconstruction beats every table") {
  const ProbabilityTable src = dsbs(0.2);
  const AuxProblem p = wyner_ziv(src, 2);
  const ConditionalTable q1 = random_channel(2, 2, 4);
  const auto best = best_reconstruction(p, q1, ConditionalTable::identity(2));
  const double best_cost = evaluate(p, {q1, ConditionalTable::identity(2), best}).cost;
  // 2 x 2 cells, 2 estimates each: 16 tables.
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    std::vector<std::uint32_t> psi(4);
    for (std::size_t i = 0; i < 4; ++i) psi[i] = (mask >> i) & 1;
    CHECK(evaluate(p, {q1, ConditionalTable::identity(2), psi}).cost >= best_cost - 1e-15);
  }
}

TEST_CASE("anchors") {
  const AuxProblem p = wyner_ziv(dsbs(0.25), 3);
  const AuxMeasures id = evaluate(p, anchor_witness(p, true, true));
  CHECK(id.i_a_u == doctest::Approx(1.0));
  CHECK(id.i_a_u_given_v == doctest::Approx(0.8112781244591328));  // h2(0.25)
  CHECK(id.cost == doctest::Approx(0.0));
  const AuxMeasures none = evaluate(p, anchor_witness(p, false, false));
  CHECK(none.i_ab_uv == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(none.cost == doctest::Approx(0.5));
}

TEST_CASE("alternating minimization") {
  const AuxProblem p = wyner_ziv(dsbs(0.25), 3);
  AuxSpec spec;
  spec.restarts = 8;
  const AuxWeights w{1.0, 0.0, 2.0};

  const AuxResult r = minimize_aux(p, w, spec, 5);
  CHECK(r.objective == doctest::Approx(objective(r.measures, w)));
  const AuxMeasures again = evaluate(p, r.witness);
  CHECK(again.cost == doctest::Approx(r.measures.cost).epsilon(1e-12));
  CHECK(again.i_a_u_given_v == doctest::Approx(r.measures.i_a_u_given_v).epsilon(1e-12));

  SUBCASE("never worse than a warm start") {
    for (bool u : {false, true}) {
      const AuxWitness a = anchor_witness(p, u, true);
      if (a.q1.outputs() != p.card_u) continue;
      const AuxWitness warm[] = {a};
      const AuxResult s = minimize_aux(p, w, spec, 6, warm);
      CHECK(s.objective <= objective(evaluate(p, a), w) + 1e-12);
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const AuxWitness start = complete_witness(p, random_channel(2, 3, seed), ConditionalTable::identity(2));
      const AuxWitness warm[] = {start};
      AuxSpec one = spec;
      one.restarts = 1;
      const AuxResult s = minimize_aux(p, w, one, seed, warm);
      CHECK(s.objective <= objective(evaluate(p, start), w) + 1e-12);
    }
  }
  SUBCASE("deterministic") {
    const AuxResult b = minimize_aux(p, w, spec, 5);
    CHECK(b.witness == r.witness);
    CHECK(b.objective == r.objective);
  }
  SUBCASE("zero slope buys no rate") {
    const AuxResult z = minimize_aux(p, {1.0, 0.0, 0.0}, spec, 7);
    CHECK(z.measures.i_a_u_given_v == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("witness order") {
  const AuxProblem p = wyner_ziv(dsbs(0.25), 2);
  const AuxWitness a = anchor_witness(p, true, true);
  const AuxWitness b = anchor_witness(p, false, true);
  CHECK_FALSE(witness_less(a, a));
  CHECK(witness_less(a, b) != witness_less(b, a));
}
