#include <doctest.h>

#include <cmath>

#include "oracles/grid_oracle.hpp"
#include "tslab/region.hpp"

using namespace tslab;

namespace {

const std::array<double, 4> kHamming = {0, 1, 1, 0};
const DistortionCriterion kHam = DistortionCriterion::hamming(2);

}  // namespace

TEST_CASE("Shannon rate against the lattice") {
  const double grid = oracle::shannon_grid(0.5, kHamming, 1000, 0.1);
  CHECK(std::abs(shannon_rd(ProbabilityTable::uniform({2}), kHam, 0.1) - grid) <= 1e-4);
  const double biased = oracle::shannon_grid(0.7, kHamming, 1000, 0.15);
  CHECK(std::abs(shannon_rd(ProbabilityTable({2}, {0.7, 0.3}), kHam, 0.15) - biased) <= 1e-4);
}

TEST_CASE("side-information midpoint against the lattice") {
  const std::array<double, 4> p = {0.45, 0.05, 0.05, 0.45};
  const double grid = oracle::side_info_grid(p, 4, 20, 0.5);
  AuxSpec a;
  a.seed = 7;
  a.grid_step = 0.02;
  const Region r = side_info_region(ProbabilityTable({2, 2}, {p[0], p[1], p[2], p[3]}), a);
  CHECK(std::abs(region_minimum(r, Coordinate::R1, {0.0, 0.5}) - grid) <= 1e-3);
}

TEST_CASE("Wyner-Ziv rate against the lattice") {
  const std::array<double, 4> p = {0.375, 0.125, 0.125, 0.375};
  const ProbabilityTable j({2, 2}, {p[0], p[1], p[2], p[3]});
  AuxSpec a;
  a.seed = 7;
  const auto grid = oracle::wyner_ziv_grid(p, kHamming, 3, 50, {0.1, 0.2});
  CHECK(std::abs(wyner_ziv_rd(j, kHam, 0.1, a) - grid[0]) <= 1e-3);
  CHECK(std::abs(wyner_ziv_rd(j, kHam, 0.2, a) - grid[1]) <= 1e-3);
  // The lattice only ever overestimates a minimum.
  CHECK(wyner_ziv_rd(j, kHam, 0.1, a) <= grid[0] + 1e-6);
}
