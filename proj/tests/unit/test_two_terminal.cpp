#include <doctest.h>

#include <cmath>

#include "tslab/errors.hpp"
#include "tslab/two_terminal.hpp"

using namespace tslab;

namespace {

ProbabilityTable dsbs(double p) {
  return ProbabilityTable({2, 2}, {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)});
}

ChainModel sw_model(double p) {
  return compose_chain(dsbs(p), ConditionalTable::identity(2), ConditionalTable::identity(2), 1);
}

const ReconstructionMap kPairPsi{2, 2, {2, 2}, 1, {0, 1, 2, 3}};

}  // namespace

TEST_CASE("corner rates") {
  SUBCASE("constant second auxiliary") {
    const ChainModel m =
        compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::constant(2), 1);
    const CornerRates c = corner_rates(m);
    const double i = mutual_information(m.joint(), {chain_axis::kY1}, {chain_axis::kZ1});
    CHECK(c.corner1.r1 == doctest::Approx(i).epsilon(1e-12));
    CHECK(c.corner1.r2 == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("symmetric model mirrors") {
    const ChainModel m =
        compose_chain(dsbs(0.2), ConditionalTable::bsc(0.15), ConditionalTable::bsc(0.15), 1);
    const CornerRates c = corner_rates(m);
    CHECK(c.corner0.r1 == doctest::Approx(c.corner1.r2).epsilon(1e-12));
    CHECK(c.corner0.r2 == doctest::Approx(c.corner1.r1).epsilon(1e-12));
  }
  SUBCASE("sums equal the joint information") {
    const ChainModel m =
        compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
    const CornerRates c = corner_rates(m);
    const double direct = mutual_information(m.joint(), {chain_axis::kY1, chain_axis::kY2},
                                             {chain_axis::kZ1, chain_axis::kZ2});
    CHECK(std::abs(c.corner0.r1 + c.corner0.r2 - direct) <= 1e-10);
    CHECK(std::abs(c.corner1.r1 + c.corner1.r2 - direct) <= 1e-10);
    CHECK(std::abs(c.sum_rate - direct) <= 1e-10);
  }
  SUBCASE("random models") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const CornerRates c = corner_rates(random_chain_model(3, 2, 3, 2, s));
      CHECK(std::abs(c.corner0.r1 + c.corner0.r2 - c.sum_rate) <= 1e-10);
      CHECK(std::abs(c.corner1.r1 + c.corner1.r2 - c.sum_rate) <= 1e-10);
      CHECK(c.corner0.r2 >= -1e-12);
      CHECK(c.corner1.r1 >= -1e-12);
    }
  }
}

TEST_CASE("corner schemes") {
  const SchemeEpsilons eps = SchemeEpsilons{}.resolved();
  SUBCASE("constant second auxiliary leaves no binning gain") {
    const ChainModel m =
        compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::constant(2), 1);
    const TwoTerminalScheme s = build_corner_scheme(m, 1, eps, 12, 3);
    // Z2 carries no information, so its point code is sized at I = 0.
    CHECK(s.scheme0->point_sizing.codebook_size ==
          static_cast<std::uint64_t>(std::ceil(std::exp2(12 * 2 * eps.epsilon1))));
    CHECK(s.scheme0->bin_sizing.clamped);
    CHECK(s.scheme0->bin_sizing.k2() == s.scheme0->bin_sizing.k1());
  }
  SUBCASE("same seed, same scheme") {
    const ChainModel m =
        compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
    const TwoTerminalScheme a = build_corner_scheme(m, 0, eps, 8, 5);
    const TwoTerminalScheme b = build_corner_scheme(m, 0, eps, 8, 5);
    CHECK(a.scheme0->point == b.scheme0->point);
    CHECK(a.scheme0->binned == b.scheme0->binned);
  }
  SUBCASE("rates sit within the sizing slack of the corners") {
    const ChainModel m =
        compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
    const CornerRates c = corner_rates(m);
    const TwoTerminalScheme s0 = build_corner_scheme(m, 0, eps, 12, 5);
    const TwoTerminalScheme s1 = build_corner_scheme(m, 1, eps, 12, 5);
    CHECK(s0.rate1() - c.corner0.r1 >= 2 * eps.epsilon1 - 1e-12);
    CHECK(s0.rate1() - c.corner0.r1 <= 3 * eps.epsilon1 + 1e-12);
    CHECK(s0.rate2() - c.corner0.r2 <= 3 * eps.epsilon1 + 3 * eps.epsilon4 + 1e-12);
    CHECK(s1.rate2() - c.corner1.r2 >= 2 * eps.epsilon1 - 1e-12);
    CHECK(s1.rate2() - c.corner1.r2 <= 3 * eps.epsilon1 + 1e-12);
    CHECK(s1.rate1() - c.corner1.r1 <= 3 * eps.epsilon1 + 3 * eps.epsilon4 + 1e-12);
    // log2 of the index set over n n'
    CHECK(s0.rate1() ==
          doctest::Approx(std::log2(double(s0.scheme0->point_sizing.codebook_size)) / 12));
    CHECK(s0.rate2() == doctest::Approx(double(s0.scheme0->bin_sizing.log2_k2) / 12));
  }
}

TEST_CASE("time sharing") {
  const SchemeEpsilons eps = SchemeEpsilons{}.resolved();
  const ChainModel m =
      compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
  const TwoTerminalScheme c0 = build_corner_scheme(m, 0, eps, 8, 5);
  const TwoTerminalScheme c1 = build_corner_scheme(m, 1, eps, 8, 6);

  const TwoTerminalScheme zero = build_timeshared_scheme(c0, c1, 0.0, 10);
  CHECK(zero.blocks0() == 0);
  CHECK(zero.rate1() == doctest::Approx(c1.rate1()));
  CHECK(zero.rate2() == doctest::Approx(c1.rate2()));

  const TwoTerminalScheme one = build_timeshared_scheme(c0, c1, 1.0, 10);
  CHECK(one.blocks0() == 10);
  CHECK(one.rate1() == doctest::Approx(c0.rate1()));
  CHECK(one.rate2() == doctest::Approx(c0.rate2()));

  const TwoTerminalScheme half = build_timeshared_scheme(c0, c1, 0.5, 10);
  const double mid1 = 0.5 * (c0.rate1() + c1.rate1());
  const double mid2 = 0.5 * (c0.rate2() + c1.rate2());
  CHECK(std::abs(half.rate1() - mid1) <= 0.1 * std::abs(c0.rate1() - c1.rate1()) + 1e-12);
  CHECK(std::abs(half.rate2() - mid2) <= 0.1 * std::abs(c0.rate2() - c1.rate2()) + 1e-12);
  CHECK(half.input_length() == 10 * 8);

  // A third of the blocks: floor(10/3) = 3 blocks on corner 0.
  const TwoTerminalScheme third = build_timeshared_scheme(c0, c1, 1.0 / 3, 10);
  CHECK(third.blocks0() == 3);
  CHECK(third.rate1() == doctest::Approx(0.3 * c0.rate1() + 0.7 * c1.rate1()));

  CHECK_THROWS_AS(build_timeshared_scheme(c0, c1, 1.5, 10), ValidationError);
  const TwoTerminalScheme other = build_corner_scheme(sw_model(0.1), 1, eps, 8, 6);
  CHECK_THROWS_AS(build_timeshared_scheme(c0, other, 0.5, 10), ValidationError);
}

TEST_CASE("encode and decode") {
  SUBCASE("lossless specialization reproduces the inputs on success") {
    const ChainModel m = sw_model(0.1);
    const TwoTerminalScheme s = build_corner_scheme(m, 0, SchemeEpsilons{0.25}.resolved(), 16, 7);
    std::size_t ok = 0;
    for (std::uint64_t t = 0; t < 150; ++t) {
      const SequenceTuple x = sample_iid(dsbs(0.1), 16, 1000 + t);
      const CodingOutcome o = encode_decode(s, x[0], x[1]);
      if (!o.success()) continue;
      ++ok;
      CHECK(o.z1.symbols == x[0].symbols);
      CHECK(o.z2.symbols == x[1].symbols);
      const SequenceTuple r = apply_reconstruction(kPairPsi, o.z1, o.z2);
      CHECK(r[0].symbols == o.z1.symbols);
      CHECK(r[1].symbols == o.z2.symbols);
      const SequenceTuple quad{x[0], x[1], o.z1, o.z2};
      CHECK(is_strongly_typical(quad, m.joint(), {0.25, 16}).is_typical);
    }
    CHECK(ok > 0);
  }
  SUBCASE("atypical pair flags the source event") {
    const ChainModel m =
        compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
    const TwoTerminalScheme s = build_corner_scheme(m, 0, SchemeEpsilons{}.resolved(), 8, 7);
    const SymbolSequence zeros{2, std::vector<Symbol>(8, 0)};
    const CodingOutcome o = encode_decode(s, zeros, zeros);
    REQUIRE(o.blocks.size() == 1);
    CHECK(o.blocks[0].source_atypical);
    CHECK_FALSE(o.success());
  }
  SUBCASE("length mismatch") {
    const TwoTerminalScheme s =
        build_corner_scheme(sw_model(0.1), 0, SchemeEpsilons{}.resolved(), 8, 7);
    const SymbolSequence shortx{2, std::vector<Symbol>(7, 0)};
    CHECK_THROWS_AS(encode_decode(s, shortx, shortx), ValidationError);
  }
}

TEST_CASE("reconstruction maps") {
  const SymbolSequence z1{2, {0, 1, 1, 0}};
  const SymbolSequence z2{2, {1, 1, 0, 0}};
  const ReconstructionMap c = ReconstructionMap::constant(2, 2, {2}, 1, 1);
  const SequenceTuple r = apply_reconstruction(c, z1, z2);
  REQUIRE(r.size() == 1);
  CHECK(r[0].symbols == std::vector<Symbol>(4, 1));

  const SequenceTuple p = apply_reconstruction(kPairPsi, z1, z2);
  CHECK(p[0].symbols == z1.symbols);
  CHECK(p[1].symbols == z2.symbols);

  // Order-2 targets unpack into two letters per coordinate.
  const ReconstructionMap blocks{1, 1, {2}, 2, {2}};
  const SequenceTuple b = apply_reconstruction(blocks, SymbolSequence{1, {0, 0}}, SymbolSequence{1, {0, 0}});
  CHECK(b[0].symbols.size() == 4);

  CHECK_THROWS_AS(apply_reconstruction(kPairPsi, z1, SymbolSequence{2, {0}}), ValidationError);
  CHECK_THROWS_AS(apply_reconstruction(kPairPsi, SymbolSequence{3, {2, 0, 0, 0}}, z2),
                  ValidationError);
}

TEST_CASE("expected distortion") {
  // Pair Hamming: the estimate is wrong unless both channels pass the letter.
  const ChainModel m =
      compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
  const double joint =
      exact_expected_distortion(Problem::Joint, m, kPairPsi, DistortionCriterion::hamming(4));
  CHECK(joint == doctest::Approx(1 - 0.8 * 0.7).epsilon(1e-12));

  const ReconstructionMap first{2, 2, {2}, 1, {0, 0, 1, 1}};
  CHECK(exact_expected_distortion(Problem::Partial, m, first, DistortionCriterion::hamming(2)) ==
        doctest::Approx(0.2).epsilon(1e-12));

  const ReconstructionMap zero = ReconstructionMap::constant(2, 2, {2}, 1, 0);
  CHECK(exact_expected_distortion(Problem::Partial, m, zero, DistortionCriterion::hamming(2)) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("rate-distortion experiments") {
  SUBCASE("Slepian-Wolf block error falls along the schedule") {
    ExperimentSpec s;
    s.problem = Problem::SlepianWolf;
    s.model = sw_model(0.1);
    s.psi = kPairPsi;
    s.distortion = DistortionCriterion::hamming(4);
    s.eps = SchemeEpsilons{0.25};
    s.schedule = {8, 12, 16};
    s.trials = 200;
    s.seed = 7;
    const ExperimentReport r = run_rd_experiment(s);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.error_nonincreasing);
    for (const auto& row : r.rows) {
      CHECK(row.target_d == 0.0);
      CHECK(row.error_rate >= 0.0);
      CHECK(row.error_rate <= 1.0);
    }
  }
  SUBCASE("constant reconstruction meets a loose target") {
    ExperimentSpec s;
    s.problem = Problem::Joint;
    s.model = compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
    s.psi = ReconstructionMap::constant(2, 2, {2, 2}, 1, 0);
    s.distortion = DistortionCriterion::hamming(4);
    s.schedule = {8, 12};
    s.trials = 200;
    s.seed = 3;
    const ExperimentReport r = run_rd_experiment(s);
    for (const auto& row : r.rows) CHECK(row.measured_d <= s.distortion.d_max);
  }
  SUBCASE("lossless first terminal is required for Berger-Yeung") {
    ExperimentSpec s;
    s.problem = Problem::BergerYeung;
    s.model = compose_chain(dsbs(0.1), ConditionalTable::bsc(0.2), ConditionalTable::bsc(0.3), 1);
    s.psi = ReconstructionMap{2, 2, {2}, 1, {0, 1, 0, 1}};
    s.distortion = DistortionCriterion::hamming(2);
    s.schedule = {8};
    s.trials = 10;
    CHECK_THROWS_AS(run_rd_experiment(s), ValidationError);
  }
  SUBCASE("report rows") {
    CHECK(experiment_csv_header() ==
          "problem,n,nPrime,lambda,r1,r2,targetD,measuredD,errorRate,trials,seed");
    CHECK(std::string(to_string(Problem::WynerZiv)) == "wynerZiv");
    CHECK(problem_from_string("slepianWolf") == Problem::SlepianWolf);
    CHECK_THROWS_AS(problem_from_string("bogus"), ValidationError);
  }
}
