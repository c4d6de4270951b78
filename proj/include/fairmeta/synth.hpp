#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fairmeta/dataset.hpp"

namespace fairmeta::synth {

// The rotation parameter phi can be read two ways: as the angle itself, in
// radians, or as the divisor in pi/phi. Literal is the default.
enum class PhiInterpretation { Literal, PiOverPhi };

const char* to_string(PhiInterpretation interp);
PhiInterpretation parse_phi_interpretation(const std::string& s);

double rotation_angle(double phi, PhiInterpretation interp);

// 2-d Gaussian with the Cholesky factor and log-density pieces precomputed.
struct Gaussian2 {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
  Eigen::Matrix2d chol;       // lower triangular, chol * chol^T = cov
  Eigen::Matrix2d precision;  // cov^-1
  double log_norm;            // -log(2 pi) - log|cov| / 2

  Gaussian2(Eigen::Vector2d m, Eigen::Matrix2d c);
  double log_density(const Eigen::Vector2d& x) const;
  Eigen::Vector2d sample(std::mt19937_64& rng) const;
};

// Mixture components: (1) is the positive-outcome distribution in the
// fine-tune task, (2) the negative.
const Gaussian2& gaussian1();  // N([2,2],   [[5,1],[1,5]])
const Gaussian2& gaussian2();  // N([-2,-2], [[10,1],[1,3]])

// p(a = 0) = N1(x') / (N1(x') + N2(x')) with x' = R(angle) x, evaluated in
// log space.
double protected_probability(const Eigen::Vector2d& x, double angle);

struct SyntheticTaskSpec {
  double slope = 0.0;  // decision line through the origin, in [-5, 5]
  double phi = 2.0;    // one of {2, 4, 8, 16}
  uint64_t seed = 0;
};

void validate(const SyntheticTaskSpec& spec);

// slope ~ U[-5, 5], phi uniform over the 4-element set.
SyntheticTaskSpec sample_task_spec(std::mt19937_64& rng);

// n rows from the half/half Gaussian mixture; y = 1 iff the point is strictly
// above the spec's line; a ~ Bernoulli of protected_probability.
Dataset sample_train_task(const SyntheticTaskSpec& spec, Index n,
                          PhiInterpretation interp = PhiInterpretation::Literal);

// The biased fine-tune protocol: labels follow the generating component
// (Gaussian (1) is the positive class), so no line separates them. The
// fine-tune set is exactly k rows with y = 1 and a = 0, found by rejection;
// the eval set is n_eval unconstrained rows from the same labeled mixture.
std::pair<Dataset, Dataset> sample_finetune_task(
    uint64_t seed, Index k_protected_positive, Index n_eval,
    PhiInterpretation interp = PhiInterpretation::Literal);

// Fixed task list reused across meta-iterations. Task i gets an independent
// spec and rows_per_task rows.
std::vector<Dataset> cache_tasks(uint64_t seed, int count, Index rows_per_task,
                                 PhiInterpretation interp = PhiInterpretation::Literal);

}  // namespace fairmeta::synth
