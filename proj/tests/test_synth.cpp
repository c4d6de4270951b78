#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fairmeta/synth.hpp"

using namespace fairmeta;
using synth::PhiInterpretation;

namespace {

double correlation(const std::vector<double>& u, const std::vector<double>& v) {
  const double n = static_cast<double>(u.size());
  double mu = 0.0, mv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= n;
  mv /= n;
  double suv = 0.0, su = 0.0, sv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    suv += (u[i] - mu) * (v[i] - mv);
    su += (u[i] - mu) * (u[i] - mu);
    sv += (v[i] - mv) * (v[i] - mv);
  }
  return suv / std::sqrt(su * sv);
}

}  // namespace

TEST_CASE("labels follow the strict above-the-line rule") {
  synth::SyntheticTaskSpec spec;
  spec.slope = 0.0;
  spec.phi = 2.0;
  spec.seed = 40;
  const Dataset d = sample_train_task(spec, 500);
  for (Index i = 0; i < d.size(); ++i) {
    const bool above = d.X(i, 1) > spec.slope * d.X(i, 0);
    CHECK(d.Y[i] == (above ? 1 : 0));
  }

  // steep line, same property
  spec.slope = -4.5;
  spec.seed = 41;
  const Dataset s = sample_train_task(spec, 500);
  for (Index i = 0; i < s.size(); ++i)
    CHECK(s.Y[i] == (s.X(i, 1) > spec.slope * s.X(i, 0) ? 1 : 0));
}

TEST_CASE("rotation preserves length for every phi reading") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (double phi : {2.0, 4.0, 8.0, 16.0}) {
    for (auto interp : {PhiInterpretation::Literal, PhiInterpretation::PiOverPhi}) {
      const double angle = synth::rotation_angle(phi, interp);
      const Eigen::Matrix2d r{{std::cos(angle), -std::sin(angle)},
                              {std::sin(angle), std::cos(angle)}};
      for (int rep = 0; rep < 100; ++rep) {
        const Eigen::Vector2d x(gauss(rng), gauss(rng));
        CHECK(std::abs((r * x).norm() - x.norm()) < 1e-12);
      }
    }
  }
}

TEST_CASE("phi readings: literal is the angle itself, the alternate is pi over phi") {
  CHECK(synth::rotation_angle(2.0, PhiInterpretation::Literal) == 2.0);
  CHECK(synth::rotation_angle(16.0, PhiInterpretation::Literal) == 16.0);
  CHECK(synth::rotation_angle(2.0, PhiInterpretation::PiOverPhi) ==
        doctest::Approx(M_PI / 2.0).epsilon(1e-15));
  CHECK(synth::rotation_angle(16.0, PhiInterpretation::PiOverPhi) ==
        doctest::Approx(M_PI / 16.0).epsilon(1e-15));
  CHECK(synth::parse_phi_interpretation("literal") == PhiInterpretation::Literal);
  CHECK(synth::parse_phi_interpretation("pi-over-phi") == PhiInterpretation::PiOverPhi);
  CHECK_THROWS_AS(synth::parse_phi_interpretation("degrees"), std::invalid_argument);
}

TEST_CASE("lower phi couples the sensitive attribute to the label more strongly") {
  // Under the pi-over-phi reading, phi = 2 rotates by 90 degrees and phi = 16
  // by 11.25. With slope 1 the label line runs through both component means,
  // and the unrotated attribute boundary (the components' Bayes boundary) is
  // roughly perpendicular to it, so at small rotations a barely sees y; the
  // 90-degree rotation swings the attribute boundary onto the label line and
  // couples them. Three seeds, 100k points each.
  for (uint64_t seed : {60, 61, 62}) {
    double corr_low = 0.0, corr_high = 0.0;
    for (double phi : {2.0, 16.0}) {
      synth::SyntheticTaskSpec spec;
      spec.slope = 1.0;
      spec.phi = phi;
      spec.seed = seed;
      const Dataset d = sample_train_task(spec, 100000, PhiInterpretation::PiOverPhi);
      std::vector<double> ys(static_cast<size_t>(d.size())), as(static_cast<size_t>(d.size()));
      for (Index i = 0; i < d.size(); ++i) {
        ys[static_cast<size_t>(i)] = d.Y[i];
        as[static_cast<size_t>(i)] = d.A[i];
      }
      const double c = std::abs(correlation(ys, as));
      (phi == 2.0 ? corr_low : corr_high) = c;
    }
    CAPTURE(corr_low);
    CAPTURE(corr_high);
    CHECK(corr_low > corr_high);
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  synth::SyntheticTaskSpec spec;
  spec.slope = 2.5;
  spec.phi = 8.0;
  spec.seed = 43;
  const Dataset a = sample_train_task(spec, 50);
  const Dataset b = sample_train_task(spec, 50);
  CHECK((a.X.array() == b.X.array()).all());
  CHECK((a.Y.array() == b.Y.array()).all());
  CHECK((a.A.array() == b.A.array()).all());

  const auto [f1, e1] = synth::sample_finetune_task(99, 5, 200);
  const auto [f2, e2] = synth::sample_finetune_task(99, 5, 200);
  CHECK((f1.X.array() == f2.X.array()).all());
  CHECK((e1.X.array() == e2.X.array()).all());
  CHECK((e1.Y.array() == e2.Y.array()).all());

  const auto [f3, e3] = synth::sample_finetune_task(100, 5, 200);
  CHECK((f1.X.array() != f3.X.array()).any());
}

TEST_CASE("the biased fine-tune set is exactly k protected positives") {
  for (uint64_t seed : {7, 8, 9}) {
    const auto [fine, eval] = synth::sample_finetune_task(seed, 5, 1000);
    REQUIRE(fine.size() == 5);
    CHECK((fine.Y.array() == 1).all());
    CHECK((fine.A.array() == 0).all());
    validate(fine);
    validate(eval);
    REQUIRE(eval.size() == 1000);

    // class balance of the eval mixture: half positive within 3 binomial
    // standard errors (sqrt(0.25 / 1000) ~ 0.0158)
    const double rate = eval.Y.cast<double>().mean();
    CHECK(std::abs(rate - 0.5) < 3.0 * std::sqrt(0.25 / 1000.0));
  }
}

TEST_CASE("protected probability follows the stated density ratio") {
  // Direct check of the formula at hand-picked points: at the component
  // means the respective density dominates.
  const double angle = 0.0;
  const double at_mean1 = synth::protected_probability(Eigen::Vector2d(2.0, 2.0), angle);
  const double at_mean2 = synth::protected_probability(Eigen::Vector2d(-2.0, -2.0), angle);
  CHECK(at_mean1 > 0.5);
  CHECK(at_mean2 < 0.5);
  // values are probabilities
  CHECK(at_mean1 < 1.0);
  CHECK(at_mean2 > 0.0);

  // rotation moves the evaluation point: probability at x under angle t
  // equals probability at R(t) x under angle 0
  const Eigen::Vector2d x(1.3, -0.4);
  const double t = 0.7;
  const Eigen::Matrix2d r{{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}};
  CHECK(synth::protected_probability(x, t) ==
        doctest::Approx(synth::protected_probability(r * x, 0.0)).epsilon(1e-12));
}

TEST_CASE("sensitive attribute frequencies match the analytic Bernoulli, chi-squared at 1%") {
  // Bin points by their analytic p(a=0); within each bin the observed a=0
  // count is binomial. Chi-squared statistic over bins must stay below the
  // 1% critical value.
  synth::SyntheticTaskSpec spec;
  spec.slope = 0.5;
  spec.phi = 2.0;
  spec.seed = 77;
  const Index n = 10000;
  const Dataset d = sample_train_task(spec, n);
  const double angle = synth::rotation_angle(spec.phi, PhiInterpretation::Literal);

  const int bins = 10;
  std::vector<double> expected(bins, 0.0), observed(bins, 0.0), count(bins, 0.0);
  for (Index i = 0; i < n; ++i) {
    const double p = synth::protected_probability(Eigen::Vector2d(d.X(i, 0), d.X(i, 1)), angle);
    int b = static_cast<int>(p * bins);
    if (b == bins) b = bins - 1;
    expected[b] += p;
    observed[b] += (d.A[i] == 0) ? 1.0 : 0.0;
    count[b] += 1.0;
  }
  double chi2 = 0.0;
  int used = 0;
  for (int b = 0; b < bins; ++b) {
    if (count[b] < 20.0) continue;  // skip sparse bins, binomial approx poor
    const double var = expected[b] * (1.0 - expected[b] / count[b]);
    if (var < 1e-9) continue;
    chi2 += (observed[b] - expected[b]) * (observed[b] - expected[b]) / var;
    ++used;
  }
  // 1% upper critical values of chi-squared for 1..10 degrees of freedom
  const double crit[] = {6.635, 9.210, 11.345, 13.277, 15.086,
                         16.812, 18.475, 20.090, 21.666, 23.209};
  REQUIRE(used >= 1);
  REQUIRE(used <= 10);
  CAPTURE(chi2);
  CHECK(chi2 < crit[used - 1]);
}

TEST_CASE("cache_tasks produces the requested pool deterministically") {
  const auto tasks = synth::cache_tasks(7, 10, 40);
  REQUIRE(tasks.size() == 10);
  for (const auto& t : tasks) {
    CHECK(t.size() == 40);
    CHECK(t.dim() == 2);
    validate(t);
  }
  const auto again = synth::cache_tasks(7, 10, 40);
  CHECK((tasks[3].X.array() == again[3].X.array()).all());
  CHECK(tasks[3].tag == again[3].tag);
  const auto other = synth::cache_tasks(8, 10, 40);
  CHECK((tasks[3].X.array() != other[3].X.array()).any());
}

TEST_CASE("task spec validation enforces the documented ranges") {
  synth::SyntheticTaskSpec ok;
  ok.slope = 5.0;
  ok.phi = 16.0;
  CHECK_NOTHROW(validate(ok));

  synth::SyntheticTaskSpec bad_slope = ok;
  bad_slope.slope = 5.1;
  CHECK_THROWS_AS(validate(bad_slope), std::invalid_argument);

  synth::SyntheticTaskSpec bad_phi = ok;
  bad_phi.phi = 3.0;
  CHECK_THROWS_AS(validate(bad_phi), std::invalid_argument);

  std::mt19937_64 rng(44);
  for (int rep = 0; rep < 200; ++rep) CHECK_NOTHROW(validate(synth::sample_task_spec(rng)));
}
