// Wyner-Ziv coding on DSBS(0.25): X1 is described through a 3-letter
// auxiliary with an erasure symbol, X2 is known at the decoder, and psi
// falls back on X2 when the description is erased. Passes when the measured
// distortion at n' = 16 lands within 0.05 of the exact expectation.

#include <cmath>
#include <cstdio>

#include "tslab/two_terminal.hpp"

using namespace tslab;

int main() {
  const double p = 0.25;
  const double a = 0.7;
  const ProbabilityTable source({2, 2}, {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)});
  // z = x with probability a, erased otherwise.
  ConditionalTable q1(2, 3, {a, 0, 1 - a, 0, a, 1 - a});

  ExperimentSpec spec;
  spec.problem = Problem::WynerZiv;
  spec.model = compose_chain(source, std::move(q1), ConditionalTable::identity(2), 1);
  spec.psi = ReconstructionMap{3, 2, {2}, 1, {0, 0, 1, 1, 0, 1}};
  spec.distortion = DistortionCriterion::hamming(2);
  spec.schedule = {16};
  spec.trials = 1000;
  spec.seed = 16;
  spec.lambda = 1.0;

  const double exact = exact_expected_distortion(spec.problem, spec.model, spec.psi,
                                                 spec.distortion);
  const ExperimentReport rep = run_rd_experiment(spec);
  const ExperimentRow& row = rep.rows.front();
  const bool ok = std::abs(row.measured_d - exact) <= 0.05;
  std::printf("%s\n%s\n", experiment_csv_header().c_str(), to_csv_row(row).c_str());
  std::printf("%s wyner-ziv n'=16: measured %.4f exact %.4f (tolerance 0.05)\n",
              ok ? "PASS" : "FAIL", row.measured_d, exact);
  return ok ? 0 : 1;
}
