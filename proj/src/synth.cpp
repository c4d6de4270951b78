#include "fairmeta/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fairmeta::synth {

const char* to_string(PhiInterpretation interp) {
  return interp == PhiInterpretation::Literal ? "literal" : "pi-over-phi";
}

PhiInterpretation parse_phi_interpretation(const std::string& s) {
  if (s == "literal") return PhiInterpretation::Literal;
  if (s == "pi-over-phi") return PhiInterpretation::PiOverPhi;
  throw std::invalid_argument("unknown phi interpretation: " + s);
}

double rotation_angle(double phi, PhiInterpretation interp) {
  return interp == PhiInterpretation::Literal ? phi : std::numbers::pi / phi;
}

Gaussian2::Gaussian2(Eigen::Vector2d m, Eigen::Matrix2d c) : mean(std::move(m)), cov(std::move(c)) {
  const Eigen::LLT<Eigen::Matrix2d> llt(cov);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("Gaussian2: covariance not SPD");
  chol = llt.matrixL();
  precision = cov.inverse();
  log_norm = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(cov.determinant());
}

double Gaussian2::log_density(const Eigen::Vector2d& x) const {
  const Eigen::Vector2d d = x - mean;
  return log_norm - 0.5 * d.dot(precision * d);
}

Eigen::Vector2d Gaussian2::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector2d z;
  z << n(rng), n(rng);
  return mean + chol * z;
}

const Gaussian2& gaussian1() {
  static const Gaussian2 g{Eigen::Vector2d(2.0, 2.0),
                           (Eigen::Matrix2d() << 5.0, 1.0, 1.0, 5.0).finished()};
  return g;
}

const Gaussian2& gaussian2() {
  static const Gaussian2 g{Eigen::Vector2d(-2.0, -2.0),
                           (Eigen::Matrix2d() << 10.0, 1.0, 1.0, 3.0).finished()};
  return g;
}

static Eigen::Matrix2d rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return (Eigen::Matrix2d() << c, -s, s, c).finished();
}

double protected_probability(const Eigen::Vector2d& x, double angle) {
  const Eigen::Vector2d xr = rotation(angle) * x;
  const double logit = gaussian1().log_density(xr) - gaussian2().log_density(xr);
  return 1.0 / (1.0 + std::exp(-logit));
}

void validate(const SyntheticTaskSpec& spec) {
  if (!(spec.slope >= -5.0 && spec.slope <= 5.0))
    throw std::invalid_argument("synthetic task: slope outside [-5, 5]");
  if (spec.phi != 2.0 && spec.phi != 4.0 && spec.phi != 8.0 && spec.phi != 16.0)
    throw std::invalid_argument("synthetic task: phi not in {2, 4, 8, 16}");
}

SyntheticTaskSpec sample_task_spec(std::mt19937_64& rng) {
  static constexpr double kPhis[] = {2.0, 4.0, 8.0, 16.0};
  SyntheticTaskSpec spec;
  spec.slope = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
  spec.phi = kPhis[std::uniform_int_distribution<int>(0, 3)(rng)];
  spec.seed = rng();
  return spec;
}

// One mixture draw: the component, the point, and the sensitive attribute.
// Row order per draw is fixed so a seed maps to one sample stream.
namespace {
struct MixtureDraw {
  Eigen::Vector2d x;
  int component;  // 1 or 2
  int a;
};

MixtureDraw draw_point(std::mt19937_64& rng, double angle) {
  MixtureDraw d;
  d.component = std::bernoulli_distribution(0.5)(rng) ? 1 : 2;
  d.x = (d.component == 1 ? gaussian1() : gaussian2()).sample(rng);
  const double p0 = protected_probability(d.x, angle);
  d.a = std::bernoulli_distribution(p0)(rng) ? 0 : 1;
  return d;
}
}  // namespace

Dataset sample_train_task(const SyntheticTaskSpec& spec, Index n, PhiInterpretation interp) {
  validate(spec);
  if (n < 1) throw std::invalid_argument("sample_train_task: n must be positive");
  std::mt19937_64 rng(spec.seed);
  const double angle = rotation_angle(spec.phi, interp);
  Dataset d;
  d.X.resize(n, 2);
  d.Y.resize(n);
  d.A.resize(n);
  for (Index i = 0; i < n; ++i) {
    const MixtureDraw p = draw_point(rng, angle);
    d.X.row(i) = p.x.transpose();
    d.Y[i] = p.x[1] > spec.slope * p.x[0] ? 1 : 0;
    d.A[i] = p.a;
  }
  validate(d);
  return d;
}

std::pair<Dataset, Dataset> sample_finetune_task(uint64_t seed, Index k_protected_positive,
                                                 Index n_eval, PhiInterpretation interp) {
  if (k_protected_positive < 1 || n_eval < 1)
    throw std::invalid_argument("sample_finetune_task: counts must be positive");
  std::mt19937_64 rng(seed);
  const SyntheticTaskSpec spec = sample_task_spec(rng);
  const double angle = rotation_angle(spec.phi, interp);

  Dataset fine;
  fine.tag = "synthetic-finetune";
  fine.X.resize(k_protected_positive, 2);
  fine.Y = IntVector::Ones(k_protected_positive);
  fine.A = IntVector::Zero(k_protected_positive);
  for (Index i = 0; i < k_protected_positive;) {
    const MixtureDraw p = draw_point(rng, angle);
    if (p.component != 1 || p.a != 0) continue;
    fine.X.row(i) = p.x.transpose();
    ++i;
  }

  Dataset eval;
  eval.tag = "synthetic-finetune-eval";
  eval.X.resize(n_eval, 2);
  eval.Y.resize(n_eval);
  eval.A.resize(n_eval);
  for (Index i = 0; i < n_eval; ++i) {
    const MixtureDraw p = draw_point(rng, angle);
    eval.X.row(i) = p.x.transpose();
    eval.Y[i] = p.component == 1 ? 1 : 0;
    eval.A[i] = p.a;
  }
  validate(fine);
  validate(eval);
  return {std::move(fine), std::move(eval)};
}

std::vector<Dataset> cache_tasks(uint64_t seed, int count, Index rows_per_task,
                                 PhiInterpretation interp) {
  if (count < 1) throw std::invalid_argument("cache_tasks: count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Dataset> tasks;
  tasks.reserve(count);
  for (int t = 0; t < count; ++t) {
    const SyntheticTaskSpec spec = sample_task_spec(rng);
    Dataset d = sample_train_task(spec, rows_per_task, interp);
    d.tag = "synth-" + std::to_string(t);
    tasks.push_back(std::move(d));
  }
  return tasks;
}

}  // namespace fairmeta::synth
