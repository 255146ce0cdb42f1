#include <benchmark/benchmark.h>

#include "tslab/point_code.hpp"
#include "tslab/region.hpp"
#include "tslab/typicality.hpp"

using namespace tslab;

namespace {

ProbabilityTable dsbs(double p) {
  return ProbabilityTable({2, 2}, {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)});
}

void BM_ShannonRd(benchmark::State& state) {
  const ProbabilityTable src({3}, {0.5, 0.3, 0.2});
  const auto d = DistortionCriterion::hamming(3);
  for (auto _ : state) benchmark::DoNotOptimize(shannon_rd(src, d, 0.1));
}
BENCHMARK(BM_ShannonRd);

void BM_ExactTypicality(benchmark::State& state) {
  const ProbabilityTable p = dsbs(0.1);
  const TypicalityParams params{0.4, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(exact_typicality_probability(p, params));
}
BENCHMARK(BM_ExactTypicality)->Arg(8)->Arg(16)->Arg(32);

void BM_PointEncode(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const PointModel m{ProbabilityTable({2}, {0.5, 0.5}), ConditionalTable::bsc(0.25)};
  const CodeSizing sizing = choose_codebook_size(m.mutual_information(), 0.2, n);
  const Codebook cb = generate_codebook(sizing, m.z_marginal(), 1);
  const PointEncoder enc(m.joint(), {0.4, n});
  const SymbolSequence y = sample_iid(m.source, n, 2).front();
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode(cb, y.symbols));
  state.counters["K"] = static_cast<double>(sizing.codebook_size);
}
BENCHMARK(BM_PointEncode)->Arg(8)->Arg(12)->Arg(16);

void BM_WynerZiv(benchmark::State& state) {
  AuxSpec aux;
  aux.seed = 1;
  aux.restarts = 4;
  const auto d = DistortionCriterion::hamming(2);
  for (auto _ : state) benchmark::DoNotOptimize(wyner_ziv_rd(dsbs(0.25), d, 0.1, aux));
}
BENCHMARK(BM_WynerZiv)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
