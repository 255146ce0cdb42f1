#include <doctest.h>

#include <cmath>
#include <limits>

#include <json.hpp>

#include "tslab/errors.hpp"
#include "tslab/region.hpp"

using namespace tslab;

namespace {

double h2(double p) {
  return p <= 0 || p >= 1 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

ProbabilityTable dsbs(double p) {
  return ProbabilityTable({2, 2}, {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)});
}

const ProbabilityTable kIndependent({2, 2}, {0.2 * 0.5, 0.2 * 0.5, 0.8 * 0.5, 0.8 * 0.5});
const DistortionCriterion kHam = DistortionCriterion::hamming(2);

AuxSpec fast(std::uint64_t seed = 7) {
  AuxSpec a;
  a.seed = seed;
  a.restarts = 8;
  return a;
}

// Smallest r1 + r2 over points whose distortion is within `d`.
double min_sum_rate(const Region& r, double d) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : r.points)
    if (p.point.d <= d) best = std::min(best, p.point.r1 + p.point.r2);
  return best;
}

Region single_point(double r1, double r2) {
  Region r = corner_region(compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2),
                                         ConditionalTable::bsc(0.3), 1));
  r.points.resize(1);
  r.points[0].point = {r1, r2, 0.0};
  return r;
}

}  // namespace

TEST_CASE("Shannon rate-distortion") {
  const ProbabilityTable u = ProbabilityTable::uniform({2});
  CHECK(shannon_rd(u, kHam, 0.1) == doctest::Approx(0.531004).epsilon(0).scale(1).epsilon(1e-4));
  CHECK(std::abs(shannon_rd(u, kHam, 0.1) - (1 - h2(0.1))) <= 1e-4);
  CHECK(shannon_rd(u, kHam, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(shannon_rd(u, kHam, 0.5) == 0.0);
  CHECK(shannon_rd(u, kHam, 0.7) == 0.0);

  // Ternary uniform source: log2 3 - h2(D) - D for D <= 2/3.
  const ProbabilityTable t = ProbabilityTable::uniform({3});
  const DistortionCriterion h3 = DistortionCriterion::hamming(3);
  for (double D : {0.1, 0.3, 0.5}) {
    CHECK(std::abs(shannon_rd(t, h3, D) - (std::log2(3.0) - h2(D) - D)) <= 1e-4);
  }
  // Biased binary: h2(p) - h2(D) for D <= p.
  const ProbabilityTable b({2}, {0.8, 0.2});
  CHECK(std::abs(shannon_rd(b, kHam, 0.05) - (h2(0.2) - h2(0.05))) <= 1e-4);
  CHECK(shannon_rd(b, kHam, 0.2) == doctest::Approx(0.0).epsilon(1e-7));

  double prev = 2.0;
  for (double D = 0.0; D <= 0.55; D += 0.05) {
    const double r = shannon_rd(u, kHam, D);
    CHECK(r <= prev + 1e-9);
    prev = r;
  }
}

TEST_CASE("Wyner-Ziv rate-distortion") {
  SUBCASE("independent side information is useless") {
    const double wz = wyner_ziv_rd(kIndependent, kHam, 0.1, fast());
    CHECK(std::abs(wz - shannon_rd(kIndependent.marginal({0}), kHam, 0.1)) <= 1e-3);
  }
  SUBCASE("lossless endpoint") {
    CHECK(std::abs(wyner_ziv_rd(dsbs(0.25), kHam, 0.0, fast()) - h2(0.25)) <= 1e-3);
  }
  SUBCASE("ordering chain and monotonicity") {
    const ProbabilityTable j = dsbs(0.25);
    double prev = 2.0;
    for (double D : {0.05, 0.1, 0.15, 0.2}) {
      const double wz = wyner_ziv_rd(j, kHam, D, fast());
      const double cond = conditional_rd(j, kHam, D);
      const double sh = shannon_rd(j.marginal({0}), kHam, D);
      CHECK(cond <= wz + 1e-3);
      CHECK(wz <= sh + 1e-3);
      CHECK(wz <= prev + 1e-9);
      // Both ends know X2: h2(0.25) - h2(D) for D <= 0.25.
      CHECK(std::abs(cond - (h2(0.25) - h2(D))) <= 1e-4);
      prev = wz;
    }
  }
  SUBCASE("solution meets its target") {
    const RdSolution s = wyner_ziv_solution(dsbs(0.25), kHam, 0.1, fast());
    CHECK(s.distortion <= 0.1 + 1e-6);
    CHECK(!s.witnesses.empty());
    CHECK(s.witnesses.size() == s.weights.size());
    double w = 0;
    for (double x : s.weights) w += x;
    CHECK(w == doctest::Approx(1.0));
  }
  SUBCASE("bad inputs") {
    AuxSpec a = fast();
    a.grid_step = 0.9;
    CHECK_THROWS_AS(wyner_ziv_rd(dsbs(0.25), kHam, 0.1, a), ValidationError);
    CHECK_THROWS_AS(wyner_ziv_rd(dsbs(0.25), kHam, 0.1, fast(), 3), BudgetError);
  }
}

TEST_CASE("side-information region") {
  const ProbabilityTable j = dsbs(0.1);
  const Region r = side_info_region(j, fast());
  CHECK(region_minimum(r, Coordinate::R1, {0.0, 1.0}) == doctest::Approx(h2(0.1)).epsilon(1e-9));
  CHECK(region_minimum(r, Coordinate::R2, {1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-9));
  const HullReport h = hull_and_corners(r, 1e-7);
  bool full = false, none = false;
  for (auto c : h.corners) {
    const auto& p = r.points[c].point;
    full = full || (std::abs(p.r1 - h2(0.1)) < 1e-7 && std::abs(p.r2 - 1.0) < 1e-7);
    none = none || (std::abs(p.r1 - 1.0) < 1e-7 && std::abs(p.r2) < 1e-7);
  }
  CHECK(full);
  CHECK(none);
  for (const auto& p : r.points) CHECK(reverify(r, p));
}

TEST_CASE("Berger-Yeung region") {
  const ProbabilityTable j = dsbs(0.1);
  const Region r = berger_yeung_region(j, kHam, fast());
  const double hxy = 1.0 + h2(0.1);
  CHECK(std::abs(min_sum_rate(r, 1e-9) - hxy) <= 1e-3);
  // Z2 = X2: r1 >= H(X1|X2) with r2 = H(X2), at zero distortion.
  CHECK(region_minimum(r, Coordinate::R1, {0.0, 1.0 + 1e-9, 1e-9}) ==
        doctest::Approx(h2(0.1)).epsilon(1e-6));
  for (const auto& p : r.points) CHECK(reverify(r, p));

  for (std::uint64_t s = 0; s < 3; ++s) {
    const ProbabilityTable rnd = random_chain_model(2, 2, 1, 1, 100 + s).source;
    const Region rr = berger_yeung_region(rnd, kHam, fast(s));
    for (const auto& p : rr.points) CHECK(reverify(rr, p));
  }
}

TEST_CASE("partial and joint regions") {
  const ProbabilityTable j = dsbs(0.25);
  AuxSpec fine = fast();
  fine.grid_step = 0.05;
  const Region partial = partial_inner_region(j, kHam, 1, fine);
  for (const auto& p : partial.points) CHECK(reverify(partial, p));

  SUBCASE("full side-information rate recovers Wyner-Ziv") {
    for (double D : {0.1, 0.2}) {
      const double r1 = region_minimum(partial, Coordinate::R1, {0.0, 1.0, D});
      CHECK(std::abs(r1 - wyner_ziv_rd(j, kHam, D, fast())) <= 1e-2);
    }
  }
  SUBCASE("no side-information rate recovers Shannon") {
    for (double D : {0.1, 0.2}) {
      const double r1 = region_minimum(partial, Coordinate::R1, {0.0, 0.0, D});
      CHECK(std::abs(r1 - shannon_rd(j.marginal({0}), kHam, D)) <= 1e-2);
    }
  }
  SUBCASE("joint region covers partial for a first-letter criterion") {
    std::vector<double> d(16);
    for (std::size_t x = 0; x < 4; ++x)
      for (std::size_t e = 0; e < 4; ++e) d[x * 4 + e] = (x / 2 == e / 2) ? 0.0 : 1.0;
    const DistortionCriterion first{4, 4, d, 1.0};
    const Region joint = joint_inner_region(j, first, 1, fine);
    for (const auto& p : joint.points) CHECK(reverify(joint, p));
    CHECK(check_containment(partial, joint, 1e-3).contained);
    // Constant auxiliaries: zero rates at the best constant distortion.
    CHECK(region_minimum(joint, Coordinate::D, {0.0, 0.0, 0.0}) == doctest::Approx(0.5));
  }
  SUBCASE("second order covers first order") {
    AuxSpec a;
    a.seed = 7;
    a.grid_step = 0.25;
    const DistortionCriterion pair = DistortionCriterion::hamming(4);
    const Region one = joint_inner_region(j, pair, 1, a);
    const Region two = joint_inner_region(j, pair, 2, a);
    CHECK(check_containment(one, two, 1e-2).contained);
  }
}

TEST_CASE("order caps") {
  const ProbabilityTable t({3, 2}, {0.1, 0.2, 0.1, 0.2, 0.3, 0.1});
  CHECK_THROWS_AS(partial_inner_region(t, DistortionCriterion::hamming(3), 2, fast()),
                  BudgetError);
  CHECK_THROWS_AS(joint_inner_region(dsbs(0.1), DistortionCriterion::hamming(4), 3, fast()),
                  BudgetError);
  CHECK_THROWS_AS(partial_inner_region(t, DistortionCriterion::hamming(3), 0, fast()),
                  ValidationError);
}

TEST_CASE("single-letterization") {
  AuxSpec a;
  a.seed = 7;
  SUBCASE("deterministic source") {
    const ProbabilityTable det({2, 2}, {1.0, 0.0, 0.0, 0.0});
    const SingleLetterizationReport r = single_letterization_check(det, kHam, {0.0, 0.1}, a);
    CHECK(r.holds);
    for (double x : r.rate_order1) CHECK(x == doctest::Approx(0.0).epsilon(1e-9));
    for (double x : r.rate_order2) CHECK(x == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("independent pair") {
    const SingleLetterizationReport r = single_letterization_check(kIndependent, kHam, {0.05, 0.1}, a);
    CHECK(r.holds);
    for (std::size_t i = 0; i < r.targets.size(); ++i) {
      const double sh = shannon_rd(kIndependent.marginal({0}), kHam, r.targets[i]);
      CHECK(std::abs(r.rate_order1[i] - sh) <= 1e-2);
      CHECK(std::abs(r.rate_order2[i] - sh) <= 1e-2);
    }
  }
}

TEST_CASE("containment") {
  const Region r = side_info_region(dsbs(0.1), fast());
  const ContainmentReport self = check_containment(r, r);
  CHECK(self.contained);
  CHECK(self.worst_violation <= 1e-9);

  Region up = r, down = r;
  for (auto& p : up.points) p.point.r1 += 0.1;
  for (auto& p : down.points) p.point.r1 -= 0.1;
  CHECK(check_containment(up, r).contained);
  const ContainmentReport d = check_containment(down, r);
  CHECK_FALSE(d.contained);
  CHECK(d.worst_violation == doctest::Approx(0.1).epsilon(1e-6));

  const Region wz = wyner_ziv_region(dsbs(0.1), kHam, 1, fast());
  Region three = wz;
  three.coordinates = {Coordinate::R1, Coordinate::R2, Coordinate::D};
  CHECK_THROWS_AS(check_containment(wz, three), ValidationError);
}

TEST_CASE("hull and corners") {
  SUBCASE("single point") {
    const HullReport h = hull_and_corners(single_point(0.3, 0.4));
    REQUIRE(h.corners.size() == 1);
    CHECK(h.corners[0] == 0);
  }
  SUBCASE("chain-model corners") {
    const ChainModel m =
        compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
    const Region r = corner_region(m);
    const CornerRates c = corner_rates(m);
    const HullReport h = hull_and_corners(r);
    REQUIRE(h.corners.size() == 2);
    bool saw0 = false, saw1 = false;
    for (auto i : h.corners) {
      const auto& p = r.points[i];
      const RatePair& want = p.corner == 0 ? c.corner0 : c.corner1;
      CHECK(std::abs(p.point.r1 - want.r1) <= 1e-10);
      CHECK(std::abs(p.point.r2 - want.r2) <= 1e-10);
      (p.corner == 0 ? saw0 : saw1) = true;
    }
    CHECK(saw0);
    CHECK(saw1);
    // The segment between the corners is a facet; its midpoint is in the region.
    const auto& a = r.points[h.corners[0]].point;
    const auto& b = r.points[h.corners[1]].point;
    const Region mid = single_point(0.5 * (a.r1 + b.r1), 0.5 * (a.r2 + b.r2));
    CHECK(check_containment(mid, r).contained);
    bool segment = false;
    for (const auto& f : h.facets) segment = segment || f.vertices.size() == 2;
    CHECK(segment);
    for (const auto& f : h.facets)
      for (double x : f.normal) CHECK(x <= 0.0);
  }
  SUBCASE("empty region") {
    Region r = single_point(0, 0);
    r.points.clear();
    CHECK(hull_and_corners(r).corners.empty());
  }
}

TEST_CASE("super-symbol consistency") {
  // A product witness at order 2 reproduces the order-1 point exactly.
  AuxSpec a = fast();
  a.card_z1 = 2;
  const Region one = wyner_ziv_region(dsbs(0.25), kHam, 1, a, {0.1});
  AuxSpec a2 = a;
  a2.card_z1 = 4;
  a2.restarts = 1;
  a2.grid_step = 0.5;
  Region two = wyner_ziv_region(dsbs(0.25), kHam, 2, a2);
  for (std::size_t i = 0; i < one.witnesses.size(); ++i) {
    const AuxWitness& w = one.witnesses[i];
    if (w.q1.outputs() != 2) continue;  // the constant anchor has a single letter
    AuxWitness p;
    p.q1 = w.q1.block_power(2);
    p.q2 = ConditionalTable::identity(4);
    p.psi.resize(16);
    for (Symbol u = 0; u < 4; ++u)
      for (Symbol v = 0; v < 4; ++v) {
        const auto us = unpack_block(u, 2, 2);
        const auto vs = unpack_block(v, 2, 2);
        const std::vector<Symbol> t = {w.psi[us[0] * 2 + vs[0]], w.psi[us[1] * 2 + vs[1]]};
        p.psi[u * 4 + v] = pack_block(t, 2);
      }
    two.witnesses.push_back(p);
    const AuxMeasures m1 = witness_measures(one, i);
    const AuxMeasures m2 = witness_measures(two, two.witnesses.size() - 1);
    CHECK(m2.i_a_u_given_v == doctest::Approx(m1.i_a_u_given_v).epsilon(1e-12));
    CHECK(m2.cost == doctest::Approx(m1.cost).epsilon(1e-12));
  }
}

TEST_CASE("determinism and export") {
  const Region a = side_info_region(dsbs(0.1), fast(3));
  const Region b = side_info_region(dsbs(0.1), fast(3));
  CHECK(a == b);

  CHECK(region_csv_header() == "problem,order,r1,r2,d,witnessId");
  const auto rows = region_csv_rows(a);
  CHECK(rows.size() == a.points.size());
  CHECK(rows[0].rfind("sideInfo,1,", 0) == 0);
  const auto j = nlohmann::json::parse(witnesses_json(a));
  CHECK(j.size() == a.witnesses.size());

  CHECK(std::string(to_string(RegionProblem::BergerYeung)) == "bergerYeung");
  CHECK(region_problem_from_string("wynerZiv") == RegionProblem::WynerZiv);
  CHECK_THROWS_AS(region_problem_from_string("nope"), ValidationError);
}
