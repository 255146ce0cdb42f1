#include "tslab/aux_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tslab/errors.hpp"
#include "tslab/parallel.hpp"
#include "tslab/rng.hpp"

namespace tslab {

void AuxSpec::validate() const {
  require(restarts >= 1, "aux restarts must be >= 1");
  require(max_iterations >= 1, "aux maxIterations must be >= 1");
  require(std::isfinite(grid_step) && grid_step > 0.0 && grid_step <= 0.5,
          "aux gridStep must lie in (0, 0.5]");
  require(std::isfinite(tolerance) && tolerance > 0.0, "aux tolerance must be > 0");
}

void AuxProblem::validate() const {
  require(source.rank() == 2, "aux problem source must have axes (A, B)");
  require(card_u >= 1 && card_v >= 1 && estimates >= 1, "aux cardinalities must be >= 1");
  require(cost.size() == size_a() * size_b() * estimates, "cost table size mismatch");
  require(kind_u != AuxKind::Identity || card_u == size_a(), "identity U needs |U| = |A|");
  require(kind_v != AuxKind::Identity || card_v == size_b(), "identity V needs |V| = |B|");
  require(kind_u != AuxKind::Constant || card_u == 1, "constant U needs |U| = 1");
  require(kind_v != AuxKind::Constant || card_v == 1, "constant V needs |V| = 1");
  for (double c : cost) require(std::isfinite(c) && c >= 0.0, "costs must be finite and >= 0");
}

bool witness_less(const AuxWitness& a, const AuxWitness& b) {
  const auto q1a = a.q1.data(), q1b = b.q1.data(), q2a = a.q2.data(), q2b = b.q2.data();
  if (!std::equal(q1a.begin(), q1a.end(), q1b.begin(), q1b.end())) {
    return std::lexicographical_compare(q1a.begin(), q1a.end(), q1b.begin(), q1b.end());
  }
  if (!std::equal(q2a.begin(), q2a.end(), q2b.begin(), q2b.end())) {
    return std::lexicographical_compare(q2a.begin(), q2a.end(), q2b.begin(), q2b.end());
  }
  return a.psi < b.psi;
}

AuxMeasures evaluate(const AuxProblem& pr, const AuxWitness& w) {
  const std::size_t na = pr.size_a(), nb = pr.size_b();
  const std::size_t nu = w.q1.outputs(), nv = w.q2.outputs();
  require(w.q1.inputs() == na && w.q2.inputs() == nb, "witness tables do not fit the source");
  require(w.psi.size() == nu * nv, "witness psi size mismatch");
  std::vector<double> mass(na * nb * nu * nv);
  AuxMeasures m;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      const double p = pr.source.at({a, b});
      if (p <= 0.0) continue;
      for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t v = 0; v < nv; ++v) {
          const double x = p * w.q1(a, u) * w.q2(b, v);
          mass[((a * nb + b) * nu + u) * nv + v] = x;
          m.cost += x * pr.cost[(a * nb + b) * pr.estimates + w.psi[u * nv + v]];
        }
    }
  const ProbabilityTable j({na, nb, nu, nv}, std::move(mass));
  m.i_a_u = mutual_information(j, {0}, {2});
  m.i_b_v = mutual_information(j, {1}, {3});
  m.i_a_u_given_v = conditional_mutual_information(j, {0}, {2}, {3});
  m.i_b_v_given_u = conditional_mutual_information(j, {1}, {3}, {2});
  m.i_ab_uv = mutual_information(j, {0, 1}, {2, 3});
  return m;
}

double objective(const AuxMeasures& m, const AuxWeights& w) {
  return w.alpha * m.i_a_u_given_v + w.beta * m.i_b_v + w.slope * m.cost;
}

std::vector<std::uint32_t> best_reconstruction(const AuxProblem& pr, const ConditionalTable& q1,
                                               const ConditionalTable& q2) {
  const std::size_t na = pr.size_a(), nb = pr.size_b(), nt = pr.estimates;
  const std::size_t nu = q1.outputs(), nv = q2.outputs();
  std::vector<std::uint32_t> psi(nu * nv, 0);
  std::vector<double> acc(nt);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t v = 0; v < nv; ++v) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t a = 0; a < na; ++a) {
        const double qa = q1(a, u);
        if (qa <= 0.0) continue;
        for (std::size_t b = 0; b < nb; ++b) {
          const double x = pr.source.at({a, b}) * qa * q2(b, v);
          if (x <= 0.0) continue;
          const double* c = &pr.cost[(a * nb + b) * nt];
          for (std::size_t t = 0; t < nt; ++t) acc[t] += x * c[t];
        }
      }
      psi[u * nv + v] = static_cast<std::uint32_t>(std::min_element(acc.begin(), acc.end()) - acc.begin());
    }
  return psi;
}

namespace {

ConditionalTable fixed_table(AuxKind kind, std::size_t inputs) {
  return kind == AuxKind::Identity ? ConditionalTable::identity(inputs)
                                   : ConditionalTable::constant(inputs);
}

}  // namespace

AuxWitness complete_witness(const AuxProblem& pr, ConditionalTable q1, ConditionalTable q2) {
  AuxWitness w;
  w.q1 = pr.kind_u == AuxKind::Free ? std::move(q1) : fixed_table(pr.kind_u, pr.size_a());
  w.q2 = pr.kind_v == AuxKind::Free ? std::move(q2) : fixed_table(pr.kind_v, pr.size_b());
  w.psi = best_reconstruction(pr, w.q1, w.q2);
  return w;
}

AuxWitness anchor_witness(const AuxProblem& pr, bool identity_u, bool identity_v) {
  AuxWitness w;
  w.q1 = fixed_table(identity_u ? AuxKind::Identity : AuxKind::Constant, pr.size_a());
  w.q2 = fixed_table(identity_v ? AuxKind::Identity : AuxKind::Constant, pr.size_b());
  w.psi = best_reconstruction(pr, w.q1, w.q2);
  return w;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense working copy of one alternating-minimization run.
class Solver {
 public:
  Solver(const AuxProblem& pr, const AuxWeights& w)
      : pr_(pr), w_(w), na_(pr.size_a()), nb_(pr.size_b()), nu_(pr.card_u), nv_(pr.card_v),
        nt_(pr.estimates) {
    p_.assign(pr.source.mass().begin(), pr.source.mass().end());
    pa_.assign(na_, 0.0);
    pb_.assign(nb_, 0.0);
    for (std::size_t a = 0; a < na_; ++a)
      for (std::size_t b = 0; b < nb_; ++b) {
        pa_[a] += p_[a * nb_ + b];
        pb_[b] += p_[a * nb_ + b];
      }
  }

  void start(const AuxWitness& w) {
    q1_.assign(w.q1.data().begin(), w.q1.data().end());
    q2_.assign(w.q2.data().begin(), w.q2.data().end());
    psi_ = w.psi;
  }

  void random_start(Rng& rng) {
    auto fill = [&](AuxKind kind, std::size_t in, std::size_t out, std::vector<double>& q) {
      q.assign(in * out, 0.0);
      if (kind == AuxKind::Identity) {
        for (std::size_t i = 0; i < in; ++i) q[i * out + i] = 1.0;
      } else if (kind == AuxKind::Constant) {
        std::fill(q.begin(), q.end(), 1.0);
      } else {
        for (std::size_t i = 0; i < in; ++i) {
          double s = 0.0;
          for (std::size_t o = 0; o < out; ++o) {
            q[i * out + o] = -std::log(1.0 - rng.uniform());
            s += q[i * out + o];
          }
          for (std::size_t o = 0; o < out; ++o) q[i * out + o] /= s;
        }
      }
    };
    fill(pr_.kind_u, na_, nu_, q1_);
    fill(pr_.kind_v, nb_, nv_, q2_);
    psi_.assign(nu_ * nv_, 0);
  }

  std::size_t run(std::size_t max_iterations, double tolerance) {
    double prev = kInf;
    std::size_t it = 0;
    while (it < max_iterations) {
      ++it;
      psi_step();
      if (pr_.kind_u == AuxKind::Free) q1_step();
      if (pr_.kind_v == AuxKind::Free) q2_step();
      psi_step();
      const double j = current_objective();
      if (prev - j <= tolerance) break;
      prev = j;
    }
    return it;
  }

  AuxWitness witness() const {
    AuxWitness w;
    w.q1 = ConditionalTable(na_, nu_, q1_);
    w.q2 = ConditionalTable(nb_, nv_, q2_);
    w.psi = psi_;
    return w;
  }

 private:
  double cost(std::size_t a, std::size_t b, std::size_t u, std::size_t v) const {
    return pr_.cost[(a * nb_ + b) * nt_ + psi_[u * nv_ + v]];
  }

  void psi_step() {
    std::vector<double> acc(nt_);
    for (std::size_t u = 0; u < nu_; ++u)
      for (std::size_t v = 0; v < nv_; ++v) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t a = 0; a < na_; ++a) {
          const double qa = q1_[a * nu_ + u];
          if (qa <= 0.0) continue;
          for (std::size_t b = 0; b < nb_; ++b) {
            const double x = p_[a * nb_ + b] * qa * q2_[b * nv_ + v];
            if (x <= 0.0) continue;
            const double* c = &pr_.cost[(a * nb_ + b) * nt_];
            for (std::size_t t = 0; t < nt_; ++t) acc[t] += x * c[t];
          }
        }
        psi_[u * nv_ + v] =
            static_cast<std::uint32_t>(std::min_element(acc.begin(), acc.end()) - acc.begin());
      }
  }

  // p(u | v) under the current tables; -inf logs mark impossible pairs.
  void side_posterior(std::vector<double>& log_r) const {
    std::vector<double> pav(na_ * nv_, 0.0), pv(nv_, 0.0);
    for (std::size_t a = 0; a < na_; ++a)
      for (std::size_t b = 0; b < nb_; ++b)
        for (std::size_t v = 0; v < nv_; ++v) pav[a * nv_ + v] += p_[a * nb_ + b] * q2_[b * nv_ + v];
    for (std::size_t a = 0; a < na_; ++a)
      for (std::size_t v = 0; v < nv_; ++v) pv[v] += pav[a * nv_ + v];
    log_r.assign(nu_ * nv_, -kInf);
    for (std::size_t v = 0; v < nv_; ++v) {
      if (pv[v] <= 0.0) continue;
      for (std::size_t u = 0; u < nu_; ++u) {
        double r = 0.0;
        for (std::size_t a = 0; a < na_; ++a) r += pav[a * nv_ + v] * q1_[a * nu_ + u];
        if (r > 0.0) log_r[u * nv_ + v] = std::log2(r / pv[v]);
      }
    }
  }

  // q(.|x) proportional to prior * 2^(-(c - min c) / weight); weight 0 gives the argmin.
  static void gibbs_row(std::span<double> row, std::span<const double> c,
                        std::span<const double> prior, double weight) {
    std::size_t best = 0;
    double cmin = kInf;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (prior[i] > 0.0 && c[i] < cmin) {
        cmin = c[i];
        best = i;
      }
    }
    if (!std::isfinite(cmin)) return;  // keep the row
    if (weight <= 0.0) {
      std::fill(row.begin(), row.end(), 0.0);
      row[best] = 1.0;
      return;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      row[i] = prior[i] > 0.0 && std::isfinite(c[i]) ? prior[i] * std::exp2(-(c[i] - cmin) / weight) : 0.0;
      s += row[i];
    }
    for (auto& x : row) x /= s;
  }

  void q1_step() {
    std::vector<double> log_r;
    side_posterior(log_r);
    std::vector<double> c(nu_);
    const std::vector<double> ones(nu_, 1.0);
    for (std::size_t a = 0; a < na_; ++a) {
      if (pa_[a] <= 0.0) continue;
      std::fill(c.begin(), c.end(), 0.0);
      for (std::size_t b = 0; b < nb_; ++b) {
        const double pb_a = p_[a * nb_ + b] / pa_[a];
        if (pb_a <= 0.0) continue;
        for (std::size_t v = 0; v < nv_; ++v) {
          const double pv = pb_a * q2_[b * nv_ + v];
          if (pv <= 0.0) continue;
          for (std::size_t u = 0; u < nu_; ++u) {
            const double lr = log_r[u * nv_ + v];
            c[u] += w_.slope * pv * cost(a, b, u, v);
            if (w_.alpha > 0.0) c[u] += lr == -kInf ? kInf : -w_.alpha * pv * lr;
          }
        }
      }
      gibbs_row(std::span<double>(q1_).subspan(a * nu_, nu_), c, ones, w_.alpha);
    }
  }

  void q2_step() {
    std::vector<double> log_r;
    side_posterior(log_r);
    std::vector<double> wv(nv_, 0.0), c(nv_), pu(nu_);
    for (std::size_t b = 0; b < nb_; ++b)
      for (std::size_t v = 0; v < nv_; ++v) wv[v] += pb_[b] * q2_[b * nv_ + v];
    const std::vector<double> ones(nv_, 1.0);
    for (std::size_t b = 0; b < nb_; ++b) {
      if (pb_[b] <= 0.0) continue;
      std::fill(c.begin(), c.end(), 0.0);
      std::fill(pu.begin(), pu.end(), 0.0);
      for (std::size_t a = 0; a < na_; ++a) {
        const double pa_b = p_[a * nb_ + b] / pb_[b];
        if (pa_b <= 0.0) continue;
        for (std::size_t u = 0; u < nu_; ++u) {
          const double x = pa_b * q1_[a * nu_ + u];
          if (x <= 0.0) continue;
          pu[u] += x;
          for (std::size_t v = 0; v < nv_; ++v) c[v] += w_.slope * x * cost(a, b, u, v);
        }
      }
      if (w_.alpha > 0.0) {
        for (std::size_t v = 0; v < nv_; ++v)
          for (std::size_t u = 0; u < nu_; ++u) {
            if (pu[u] <= 0.0) continue;
            const double lr = log_r[u * nv_ + v];
            c[v] += lr == -kInf ? kInf : -w_.alpha * pu[u] * lr;
          }
      }
      gibbs_row(std::span<double>(q2_).subspan(b * nv_, nv_), c, w_.beta > 0.0 ? wv : ones,
                w_.beta);
    }
  }

  double current_objective() const {
    // H(U|V) - H(U|A) for the first term, I(B;V) for the second.
    std::vector<double> puv(nu_ * nv_, 0.0), pv(nv_, 0.0), wv(nv_, 0.0);
    double h_u_a = 0.0, i_bv = 0.0, c = 0.0;
    for (std::size_t a = 0; a < na_; ++a) {
      for (std::size_t u = 0; u < nu_; ++u) {
        const double q = q1_[a * nu_ + u];
        if (q > 0.0) h_u_a -= pa_[a] * q * std::log2(q);
      }
      for (std::size_t b = 0; b < nb_; ++b) {
        const double p = p_[a * nb_ + b];
        if (p <= 0.0) continue;
        for (std::size_t u = 0; u < nu_; ++u) {
          const double x = p * q1_[a * nu_ + u];
          if (x <= 0.0) continue;
          for (std::size_t v = 0; v < nv_; ++v) {
            const double y = x * q2_[b * nv_ + v];
            puv[u * nv_ + v] += y;
            c += y * cost(a, b, u, v);
          }
        }
      }
    }
    for (std::size_t b = 0; b < nb_; ++b)
      for (std::size_t v = 0; v < nv_; ++v) wv[v] += pb_[b] * q2_[b * nv_ + v];
    for (std::size_t b = 0; b < nb_; ++b)
      for (std::size_t v = 0; v < nv_; ++v) {
        const double q = q2_[b * nv_ + v];
        if (q > 0.0 && pb_[b] > 0.0) i_bv += pb_[b] * q * std::log2(q / wv[v]);
      }
    double h_u_v = 0.0;
    for (std::size_t u = 0; u < nu_; ++u)
      for (std::size_t v = 0; v < nv_; ++v) pv[v] += puv[u * nv_ + v];
    for (std::size_t u = 0; u < nu_; ++u)
      for (std::size_t v = 0; v < nv_; ++v) {
        const double x = puv[u * nv_ + v];
        if (x > 0.0) h_u_v -= x * std::log2(x / pv[v]);
      }
    return w_.alpha * (h_u_v - h_u_a) + w_.beta * i_bv + w_.slope * c;
  }

  const AuxProblem& pr_;
  AuxWeights w_;
  std::size_t na_, nb_, nu_, nv_, nt_;
  std::vector<double> p_, pa_, pb_;
  std::vector<double> q1_, q2_;
  std::vector<std::uint32_t> psi_;
};

}  // namespace

AuxResult minimize_aux(const AuxProblem& pr, const AuxWeights& weights, const AuxSpec& spec,
                       std::uint64_t seed, std::span<const AuxWitness> warm) {
  pr.validate();
  spec.validate();
  require(weights.alpha >= 0.0 && weights.beta >= 0.0 && weights.slope >= 0.0,
          "aux weights must be >= 0");
  const std::size_t runs = spec.restarts + warm.size();
  std::vector<AuxResult> results(runs);
  // Convergence threshold on the objective decrease per sweep.
  const double step_tol = spec.tolerance * 1e-4;
  parallel_for(runs, [&](std::size_t r) {
    Solver s(pr, weights);
    if (r < warm.size()) {
      const AuxWitness& w = warm[r];
      require(w.q1.inputs() == pr.size_a() && w.q1.outputs() == pr.card_u &&
                  w.q2.inputs() == pr.size_b() && w.q2.outputs() == pr.card_v,
              "warm start does not fit the problem");
      s.start(w);
    } else {
      Rng rng(derive_seed(seed, streams::kRestart, r - warm.size()));
      s.random_start(rng);
    }
    AuxResult res;
    res.iterations = s.run(spec.max_iterations, step_tol);
    res.witness = s.witness();
    res.measures = evaluate(pr, res.witness);
    res.objective = objective(res.measures, weights);
    results[r] = std::move(res);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs; ++r) {
    const double d = results[r].objective - results[best].objective;
    if (d < -1e-12 || (d <= 1e-12 && witness_less(results[r].witness, results[best].witness))) {
      best = r;
    }
  }
  return results[best];
}

}  // namespace tslab
