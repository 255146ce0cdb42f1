#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "tslab/errors.hpp"
#include "tslab/point_code.hpp"

using namespace tslab;

namespace {

const ProbabilityTable kUniform = ProbabilityTable::uniform({2});
const ProbabilityTable kCopy({2, 2}, {0.5, 0.0, 0.0, 0.5});

Codebook manual_codebook(std::size_t n, std::vector<std::vector<Symbol>> words) {
  Codebook cb;
  cb.n_prime = n;
  cb.alphabet = 2;
  for (const auto& w : words) cb.symbols.insert(cb.symbols.end(), w.begin(), w.end());
  return cb;
}

}  // namespace

TEST_CASE("codebook sizing") {
  const CodeSizing a = choose_codebook_size(0.5, 0.05, 20);
  CHECK(a.codebook_size == 4096);
  CHECK(a.log2_size >= 12.0 - 1e-12);
  CHECK(a.log2_size <= 13.0);
  CHECK(a.in_window());
  CHECK(a.rate() == doctest::Approx(12.0 / 20));

  CHECK(choose_codebook_size(0.0, 0.05, 20).codebook_size == 4);

  try {
    choose_codebook_size(1.0, 0.05, 40);
    FAIL("expected a budget refusal");
  } catch (const BudgetError& e) {
    CHECK(std::string(e.what()).find("44") != std::string::npos);
  }
}

TEST_CASE("sizing window holds across a grid") {
  for (double i : {0.0, 0.1, 0.37, 0.8}) {
    for (double e1 : {0.05, 0.1, 0.2}) {
      for (std::size_t n : {8, 12, 16, 20}) {
        const double lo = n * (i + 2 * e1);
        if (lo > kDefaultCodebookBudgetLog2) continue;
        try {
          const CodeSizing s = choose_codebook_size(i, e1, n);
          CHECK(s.in_window());
          CHECK(s.rate() <= i + 3 * e1 + 1e-12);
          CHECK(s.codebook_size == static_cast<std::uint64_t>(std::ceil(std::exp2(lo) * (1 - 1e-12))));
        } catch (const ValidationError&) {
          // ceil overshoots the window only when n' e1 is tiny
          CHECK(std::log2(std::ceil(std::exp2(lo))) > n * (i + 3 * e1));
        }
      }
    }
  }
}

TEST_CASE("codebook generation") {
  SUBCASE("point mass gives constant codewords") {
    const Codebook cb =
        generate_codebook(fixed_codebook_size(50, 10), ProbabilityTable({3}, {0, 1, 0}), 1);
    CHECK(cb.size() == 50);
    for (Symbol s : cb.symbols) CHECK(s == 1);
  }
  SUBCASE("same seed, same codebook") {
    const CodeSizing s = fixed_codebook_size(64, 12);
    CHECK(generate_codebook(s, kUniform, 9) == generate_codebook(s, kUniform, 9));
    CHECK_FALSE(generate_codebook(s, kUniform, 9) == generate_codebook(s, kUniform, 10));
  }
  SUBCASE("pooled frequency of a million fair symbols") {
    const Codebook cb = generate_codebook(fixed_codebook_size(62500, 16), kUniform, 4);
    REQUIRE(cb.symbols.size() == 1000000);
    double ones = 0;
    for (Symbol s : cb.symbols) ones += s;
    CHECK(std::abs(ones / 1e6 - 0.5) <= 0.005);
  }
  SUBCASE("export") {
    const Codebook cb = generate_codebook(fixed_codebook_size(3, 4), kUniform, 2);
    const auto j = nlohmann::json::parse(to_json(cb));
    CHECK(j["nPrime"] == 4);
    CHECK(j["K"] == 3);
    CHECK(j["seed"] == 2);
    CHECK(j["codewords"].size() == 3);
    CHECK(j["codewords"][1].get<std::vector<int>>().size() == 4);
  }
}

TEST_CASE("encoder tie-break and fallback") {
  const std::vector<Symbol> y = {0, 1, 0, 1, 1, 0, 1, 0};
  const std::vector<Symbol> off(8, 0);
  const TypicalityParams params{0.4, 8};

  std::vector<std::vector<Symbol>> words(9, off);
  words[3] = y;
  words[7] = y;
  const Codebook cb = manual_codebook(8, words);
  const EncodeResult r = encode(cb, SymbolSequence{2, y}, kCopy, params);
  CHECK(r.covered);
  CHECK(r.index == 3);
  CHECK(encode(cb, SymbolSequence{2, y}, kCopy, params) == r);

  const Codebook single = manual_codebook(8, {off});
  const EncodeResult miss = encode(single, SymbolSequence{2, y}, kCopy, params);
  CHECK_FALSE(miss.covered);
  CHECK(miss.index == 0);

  // An atypical input is never covered, even by itself.
  const Codebook self = manual_codebook(8, {off});
  CHECK_FALSE(encode(self, SymbolSequence{2, off}, kCopy, params).covered);

  CHECK_THROWS_AS(encode(cb, SymbolSequence{3, y}, kCopy, params), ValidationError);
}

TEST_CASE("covered results re-check as typical") {
  const PointModel m{kUniform, ConditionalTable::bsc(0.25)};
  const TypicalityParams params{0.4, 12};
  const CodeSizing s = choose_codebook_size(m.mutual_information(), 0.2, 12);
  const Codebook cb = generate_codebook(s, m.z_marginal(), 3);
  const PointEncoder enc(m.joint(), params);
  std::size_t covered = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const SymbolSequence y = sample_iid(kUniform, 12, 100 + t)[0];
    const EncodeResult r = enc.encode(cb, y.symbols);
    if (!r.covered) continue;
    ++covered;
    const auto w = cb.word(r.index);
    const SequenceTuple pair{y, SymbolSequence{2, {w.begin(), w.end()}}};
    CHECK(is_strongly_typical(pair, m.joint(), params).is_typical);
  }
  CHECK(covered > 0);
}

TEST_CASE("identity channel reproduces covered inputs") {
  const PointModel m{kUniform, ConditionalTable::identity(2)};
  const TypicalityParams params{0.4, 8};
  const CodeSizing s = choose_codebook_size(m.mutual_information(), 0.1, 8);
  CHECK(s.rate() > 1.0);
  const Codebook cb = generate_codebook(s, m.z_marginal(), 5);
  const PointEncoder enc(m.joint(), params);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const SymbolSequence y = sample_iid(kUniform, 8, t)[0];
    const EncodeResult r = enc.encode(cb, y.symbols);
    if (!r.covered) continue;
    const auto w = cb.word(r.index);
    CHECK(std::vector<Symbol>(w.begin(), w.end()) == y.symbols);
  }
}

TEST_CASE("point code simulation") {
  SUBCASE("failure rate falls along the schedule") {
    const PointModel m{kUniform, ConditionalTable::bsc(0.25)};
    const PointCodeSchedule s = point_code_schedule(m, 0.4, 0.2, {8, 12, 16}, 4000, 17);
    REQUIRE(s.points.size() == 3);
    CHECK(s.nonincreasing);
    for (const auto& p : s.points) {
      CHECK(p.rate > m.mutual_information());
      CHECK(p.rate <= m.mutual_information() + 3 * 0.2 + 1e-12);
      CHECK(p.rate == doctest::Approx(std::log2(double(p.codebook_size)) / p.n_prime));
    }
  }
  SUBCASE("undersized code fails") {
    const PointModel m{kUniform, ConditionalTable::identity(2)};
    const PointCodeReport r =
        simulate_point_code(m, fixed_codebook_size(2, 16, 1.0), {0.4, 16}, 4000, 8);
    CHECK(r.failure_rate() > 0.9);
  }
  SUBCASE("reproducible") {
    const PointModel m{kUniform, ConditionalTable::bsc(0.25)};
    const CodeSizing s = choose_codebook_size(m.mutual_information(), 0.2, 8);
    const auto a = simulate_point_code(m, s, {0.4, 8}, 300, 21);
    const auto b = simulate_point_code(m, s, {0.4, 8}, 300, 21);
    CHECK(a.failures == b.failures);
  }
  SUBCASE("zero trials") {
    const PointModel m{kUniform, ConditionalTable::bsc(0.25)};
    CHECK_THROWS_AS(simulate_point_code(m, fixed_codebook_size(2, 8), {0.4, 8}, 0, 1),
                    ValidationError);
  }
}
