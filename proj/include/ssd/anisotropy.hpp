#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ssd/vec2.hpp"

namespace ssd {

struct GammaValues {
  double g;    // gamma
  double dg;   // gamma'
  double d2g;  // gamma''
};

enum class StabilityCase { I, II, III };

struct StabilityPolicy {
  enum class Mode { Zero, Constant, AutoMinimal };
  Mode mode = Mode::AutoMinimal;
  double value = 0.0;  // Constant mode only
  StabilityCase scase = StabilityCase::II;
  int grid = 512;
  bool allow_case_iii = false;
  // Use the printed sign of the gamma' term in the Case II Q function.
  // Kept for inspection; it has no finite minimum when gamma' != 0.
  bool printed_case_ii_sign = false;
};

// Surface-energy density gamma(theta), 2pi periodic, with derivatives.
class AnisotropyModel {
 public:
  enum class Kind { Isotropic, FourFold, Custom };

  static AnisotropyModel isotropic(int q = 1);
  static AnisotropyModel four_fold(double beta, int q = 1);
  // Samples at theta_k = -pi + 2 pi k / N, k < N; periodic cubic spline.
  static AnisotropyModel custom(std::vector<double> samples, int q = 1);

  Kind kind() const { return kind_; }
  double beta() const { return beta_; }
  int q() const { return q_; }
  const std::vector<double>& samples() const { return samples_; }
  const StabilityPolicy& stability() const { return stability_; }

  AnisotropyModel& set_q(int q);
  AnisotropyModel& set_stability(StabilityPolicy p);

  GammaValues eval(double theta) const;
  double gamma(double theta) const { return eval(theta).g; }

  // Throws ConfigError when the stability policy is inconsistent with gamma.
  void validate() const;

 private:
  Kind kind_ = Kind::Isotropic;
  double beta_ = 0.0;
  int q_ = 1;
  std::vector<double> samples_;
  std::vector<double> second_;  // spline second derivatives at samples
  StabilityPolicy stability_;
};

GammaValues eval_gamma(const AnisotropyModel& model, double theta);

struct EnergyMatrix {
  double m11, m12, m21, m22;
  Vec2 apply(Vec2 v) const { return {m11 * v.r + m12 * v.z, m21 * v.r + m22 * v.z}; }
};

// B_q(theta) = [[g, -g'], [g', g]] M(theta)^(1-q) + S (I/2 - M(theta)/2).
EnergyMatrix surface_energy_matrix(const AnisotropyModel& model, double theta, double S);

// Per-theta minimal stability values on a fixed theta-hat grid. Immutable
// after construction, so one instance may be shared between threads.
class StabilitySolver {
 public:
  StabilitySolver(const AnisotropyModel& model, StabilityCase scase, int grid);

  double minimal(double theta) const;
  // Largest violation of the defining inequality at the grid points for a
  // given S (<= 0 means it holds everywhere on the grid).
  double max_defect(double theta, double S) const;
  StabilityCase stability_case() const { return case_; }
  int grid() const { return static_cast<int>(cos_.size()); }

 private:
  double requirement(double theta, double theta_hat) const;
  double limit_at_tangent(double theta) const;

  AnisotropyModel model_;
  StabilityCase case_;
  std::vector<double> cos_, sin_, g_, g2_;
};

double minimal_stability(const AnisotropyModel& model, double theta, StabilityCase scase,
                         int grid);

// S(theta) per the model's policy. The solver is used for AutoMinimal.
double stability_value(const AnisotropyModel& model, const StabilitySolver* solver,
                       double theta);

// Tangent angle convention: v / |v| = (cos theta, sin theta).
inline double tangent_angle(Vec2 v) { return std::atan2(v.z, v.r); }

struct LemmaViolation {
  Vec2 v, w;
  double lhs, rhs;
};

struct LemmaReport {
  std::size_t samples = 0;
  std::vector<LemmaViolation> violations;
};

// Monte-Carlo check of (1/|v|) (B_q(th) w).(w - v) >= |w| gamma(th_hat) - |v| gamma(th).
LemmaReport verify_stability_inequality(const AnisotropyModel& model, std::size_t samples,
                                        std::uint64_t seed = 12345);

// Single evaluation of both sides of the inequality for given S.
std::pair<double, double> lemma_sides(const AnisotropyModel& model, Vec2 v, Vec2 w, double S);

}  // namespace ssd
