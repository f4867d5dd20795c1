#include <cmath>

#include "doctest.h"
#include "random_instances.hpp"
#include "smoothsketch/errors.hpp"
#include "smoothsketch/sampling.hpp"

using namespace smoothsketch;
using testkit::vec;

namespace {

// Reference root of sum_j f(w_j, rho) = tau by plain bisection, written
// independently of the library solver.
template <typename F>
double reference_rho(const Vec& w, double tau, F f) {
  double lo = 0.0, hi = 1.0;
  auto total = [&](double rho) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) s += f(w(j), rho);
    return s;
  };
  while (total(hi) > tau) hi *= 2.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) > tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("sampling constructors validate properness") {
  CHECK_THROWS_AS(Sampling::independent(vec({0.5, 0.0})), InfeasibleTau);
  CHECK_THROWS_AS(Sampling::independent(vec({0.5, 1.5})), InfeasibleTau);
  CHECK_THROWS_AS(Sampling::serial(vec({0.5, 0.4})), InfeasibleTau);
  CHECK_NOTHROW(Sampling::serial(vec({0.25, 0.75})));
  CHECK(Sampling::full(3).tau() == 3.0);
}

TEST_CASE("draw_sketch with probability one is the identity") {
  Stream rng(1);
  const auto s = Sampling::independent(vec({1.0, 1.0}));
  for (int t = 0; t < 100; ++t) {
    const DiagonalSketch c = draw_sketch(s, rng);
    CHECK((c.dense() - Mat::Identity(2, 2)).norm() == 0.0);
  }
}

TEST_CASE("draw_sketch is unbiased and hits the serial frequencies") {
  Stream rng(2);
  const int draws = 100000;
  const auto s = Sampling::independent(vec({0.5, 0.5}));
  Vec sum = Vec::Zero(2);
  for (int t = 0; t < draws; ++t) sum += draw_sketch(s, rng).apply(vec({1.0, 1.0}));
  // Each coordinate of Cx is 2 or 0 with equal probability: sd 1.
  const Vec mean = sum / draws;
  CHECK(std::abs(mean(0) - 1.0) <= 3.0 / std::sqrt(draws));
  CHECK(std::abs(mean(1) - 1.0) <= 3.0 / std::sqrt(draws));

  const auto serial = Sampling::serial(vec({0.25, 0.75}));
  int hits = 0;
  for (int t = 0; t < draws; ++t) {
    const DiagonalSketch c = draw_sketch(serial, rng);
    REQUIRE(c.active.size() == 1);
    hits += c.active[0] == 1 ? 1 : 0;
  }
  const double freq = static_cast<double>(hits) / draws;
  CHECK(std::abs(freq - 0.75) <= 3.0 * std::sqrt(0.75 * 0.25 / draws));
}

TEST_CASE("probability matrices") {
  const auto ind = probability_matrices(Sampling::independent(vec({0.5, 0.5})));
  CHECK((ind.Ptilde - Mat::Identity(2, 2)).norm() < 1e-15);

  CHECK(probability_matrices(Sampling::full(3)).Ptilde.norm() == 0.0);

  const auto ser = probability_matrices(Sampling::serial(vec({0.5, 0.5})));
  CHECK((ser.Pbar - 2.0 * Mat::Identity(2, 2)).norm() < 1e-15);
  CHECK(ser.Ptilde(0, 1) == -1.0);
  CHECK(ser.Ptilde(1, 0) == -1.0);
}

TEST_CASE("probability matrix invariants on random samplings") {
  Stream rng(3);
  for (int t = 0; t < 40; ++t) {
    const int d = testkit::uniform_int(1, 6, rng);
    const Sampling s = testkit::random_sampling(d, rng);
    const auto pm = probability_matrices(s);
    CHECK((pm.P.diagonal() - s.probabilities()).norm() < 1e-15);
    CHECK((pm.P - pm.P.transpose()).norm() == 0.0);
    for (int j = 0; j < d; ++j) {
      for (int l = 0; l < d; ++l) {
        CHECK(pm.P(j, l) >= 0.0);
        CHECK(pm.P(j, l) <= std::min(s.probabilities()(j), s.probabilities()(l)) + 1e-15);
      }
    }
    CHECK(lambda_min_of(pm.P) >= -1e-12);
    if (s.kind() == SamplingKind::kIndependent) {
      for (int j = 0; j < d; ++j) {
        CHECK(pm.Ptilde(j, j) == doctest::Approx(1.0 / s.probabilities()(j) - 1.0));
        for (int l = 0; l < d; ++l) {
          if (l != j) CHECK(pm.Ptilde(j, l) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("Monte Carlo pair frequencies match P") {
  Stream rng(4);
  const int draws = 100000;
  for (int t = 0; t < 4; ++t) {
    const int d = testkit::uniform_int(2, 6, rng);
    const Sampling s = testkit::random_sampling(d, rng);
    const Mat p = probability_matrices(s).P;
    Mat counts = Mat::Zero(d, d);
    for (int k = 0; k < draws; ++k) {
      const DiagonalSketch c = draw_sketch(s, rng);
      for (int a : c.active) {
        for (int b : c.active) counts(a, b) += 1.0;
      }
    }
    for (int j = 0; j < d; ++j) {
      for (int l = 0; l < d; ++l) {
        const double sd = std::sqrt(p(j, l) * (1.0 - p(j, l)) / draws);
        CHECK(std::abs(counts(j, l) / draws - p(j, l)) <= 3.0 * sd + 1e-12);
      }
    }
  }
}

TEST_CASE("dcgd probabilities") {
  const auto sym = solve_dcgd_probs(vec({1, 1, 1, 1}), 2.0);
  CHECK(sym.rho == doctest::Approx(1.0).epsilon(1e-10));
  for (int j = 0; j < 4; ++j) CHECK(sym.p(j) == doctest::Approx(0.5).epsilon(1e-10));

  // 3/(3+r) + 1/(1+r) = 1  <=>  r^2 = 3.
  const auto two = solve_dcgd_probs(vec({3, 1}), 1.0);
  CHECK(std::abs(two.rho - std::sqrt(3.0)) <= 1e-10);
  CHECK(two.p(0) == doctest::Approx(3.0 / (3.0 + std::sqrt(3.0))));
  CHECK(two.p(1) == doctest::Approx(1.0 / (1.0 + std::sqrt(3.0))));
  CHECK(two.p(0) == doctest::Approx(0.63397).epsilon(1e-5));

  const auto full = solve_dcgd_probs(vec({5, 0.1, 2}), 3.0);
  CHECK(full.rho == doctest::Approx(0.0));
  for (int j = 0; j < 3; ++j) CHECK(full.p(j) == doctest::Approx(1.0));

  CHECK_THROWS_AS(solve_dcgd_probs(vec({1, 1}), 3.0), InfeasibleTau);
  CHECK_THROWS_AS(solve_dcgd_probs(vec({1, 1}), 0.0), InfeasibleTau);
}

TEST_CASE("dcgd probabilities with zero curvature keep the sampling proper") {
  const auto sol = solve_dcgd_probs(vec({2, 0, 1, 0}), 1.5);
  CHECK((sol.p.array() > 0.0).all());
  CHECK(sol.p.sum() == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(sol.p(1) <= 1e-6);
  CHECK((1.0 / sol.p(0) - 1.0) * 2.0 == doctest::Approx(sol.rho).epsilon(1e-8));
  CHECK((1.0 / sol.p(2) - 1.0) * 1.0 == doctest::Approx(sol.rho).epsilon(1e-8));
}

TEST_CASE("diana probabilities") {
  const auto flat = solve_diana_probs(Vec::Zero(5), 2.0, 0.3, 4);
  for (int j = 0; j < 5; ++j) CHECK(flat.p(j) == doctest::Approx(0.4).epsilon(1e-10));

  // L' = (4, 2): rho'^2 = 8.
  const auto two = solve_diana_probs(vec({3, 1}), 1.0, 1.0, 1);
  CHECK(two.rho == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));
  CHECK(two.p(0) == doctest::Approx(0.58579).epsilon(1e-5));
  CHECK(two.p(1) == doctest::Approx(0.41421).epsilon(1e-5));

  const auto full = solve_diana_probs(vec({3, 1}), 2.0, 1.0, 1);
  CHECK(full.p(0) == doctest::Approx(1.0));
  CHECK(full.p(1) == doctest::Approx(1.0));
}

TEST_CASE("adiana probabilities") {
  // L' = 1: sqrt(1/(1+rho)) = 1/2 gives rho = 3.
  const auto sym = solve_adiana_probs(Vec::Zero(4), 2.0, 1.0, 1);
  CHECK(sym.rho == doctest::Approx(3.0).epsilon(1e-10));
  for (int j = 0; j < 4; ++j) CHECK(sym.p(j) == doctest::Approx(0.5).epsilon(1e-10));

  const auto full = solve_adiana_probs(vec({3, 1, 2}), 3.0, 1.0, 1);
  CHECK(full.rho == doctest::Approx(0.0));

  const auto frac = solve_adiana_probs(vec({3, 1}), 1.2, 1.0, 1);
  CHECK(std::abs(frac.p.sum() - 1.2) <= 1e-10);
}

TEST_CASE("solvers agree with an independent bisection") {
  Stream rng(5);
  for (int t = 0; t < 30; ++t) {
    const int d = testkit::uniform_int(2, 12, rng);
    const Vec l = testkit::random_curvatures(d, rng);
    const double tau = 0.2 + (d - 0.4) * rng.uniform();
    const double mu = std::pow(10.0, -3.0 + 2.0 * rng.uniform());
    const int n = testkit::uniform_int(1, 10, rng);
    const Vec lp = (l.array() / (mu * n) + 1.0).matrix();

    const auto lin = [](double w, double r) { return w / (w + r); };
    const auto sq = [](double w, double r) { return std::sqrt(w / (w + r)); };

    const double r1 = reference_rho(l, tau, lin);
    CHECK(solve_dcgd_probs(l, tau).rho == doctest::Approx(r1).epsilon(1e-7));
    const double r2 = reference_rho(lp, tau, lin);
    CHECK(solve_diana_probs(l, tau, mu, n).rho == doctest::Approx(r2).epsilon(1e-7));
    const double r3 = reference_rho(lp, tau, sq);
    CHECK(solve_adiana_probs(l, tau, mu, n).rho == doctest::Approx(r3).epsilon(1e-7));
  }
}

TEST_CASE("uniform sampling") {
  const Sampling s = uniform_sampling(4, 1.0);
  for (int j = 0; j < 4; ++j) CHECK(s.probabilities()(j) == 0.25);
  const Sampling all = uniform_sampling(4, 4.0);
  CHECK(all.probabilities().minCoeff() == 1.0);
  CHECK(all.omega() == 0.0);
  CHECK(uniform_sampling(10, 2.0).omega() == doctest::Approx(4.0));
  CHECK_THROWS_AS(uniform_sampling(4, 5.0), InfeasibleTau);
}

TEST_CASE("closed-form Ltilde for independent sampling matches the eigensolve") {
  Stream rng(6);
  for (int t = 0; t < 30; ++t) {
    const int d = testkit::uniform_int(1, 8, rng);
    const Mat l = testkit::random_psd(d, testkit::uniform_int(1, d, rng), rng);
    const Vec p = testkit::random_probs(d, rng);
    const Mat pt = probability_matrices(Sampling::independent(p)).Ptilde;
    const double eig = lambda_max_of(hadamard(pt, l));
    CHECK(independent_ltilde(p, l.diagonal()) == doctest::Approx(eig).epsilon(1e-9));
  }
}
