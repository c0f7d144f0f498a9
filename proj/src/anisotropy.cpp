#include "ssd/anisotropy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ssd/error.hpp"
#include "ssd/kernels.hpp"

namespace ssd {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double theta) {
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t - kPi;
}

std::vector<double> periodic_spline_second(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  const double h = 2.0 * kPi / n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < n; ++k) {
    const int km = (k + n - 1) % n, kp = (k + 1) % n;
    a(k, km) += h / 6.0;
    a(k, k) += 2.0 * h / 3.0;
    a(k, kp) += h / 6.0;
    rhs(k) = (y[kp] - 2.0 * y[k] + y[km]) / h;
  }
  Eigen::VectorXd m = a.partialPivLu().solve(rhs);
  return {m.data(), m.data() + n};
}

}  // namespace

AnisotropyModel AnisotropyModel::isotropic(int q) {
  AnisotropyModel m;
  m.kind_ = Kind::Isotropic;
  m.set_q(q);
  return m;
}

AnisotropyModel AnisotropyModel::four_fold(double beta, int q) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw ConfigError("four-fold anisotropy needs 0 <= beta < 1, got " + std::to_string(beta));
  AnisotropyModel m;
  m.kind_ = Kind::FourFold;
  m.beta_ = beta;
  m.set_q(q);
  return m;
}

AnisotropyModel AnisotropyModel::custom(std::vector<double> samples, int q) {
  if (samples.size() < 8)
    throw ConfigError("custom gamma table needs at least 8 samples, got " +
                      std::to_string(samples.size()));
  for (double s : samples)
    if (!(s > 0.0)) throw ConfigError("custom gamma table must be positive");
  AnisotropyModel m;
  m.kind_ = Kind::Custom;
  m.samples_ = std::move(samples);
  m.second_ = periodic_spline_second(m.samples_);
  m.set_q(q);
  const int probe = 16 * static_cast<int>(m.samples_.size());
  for (int k = 0; k < probe; ++k)
    if (!(m.gamma(-kPi + 2.0 * kPi * k / probe) > 0.0))
      throw ConfigError("custom gamma spline is not positive everywhere");
  return m;
}

AnisotropyModel& AnisotropyModel::set_q(int q) {
  if (q != 0 && q != 1) throw ConfigError("q must be 0 or 1");
  q_ = q;
  return *this;
}

AnisotropyModel& AnisotropyModel::set_stability(StabilityPolicy p) {
  stability_ = p;
  return *this;
}

GammaValues AnisotropyModel::eval(double theta) const {
  switch (kind_) {
    case Kind::Isotropic:
      return {1.0, 0.0, 0.0};
    case Kind::FourFold: {
      const double c = std::cos(4.0 * theta), s = std::sin(4.0 * theta);
      return {1.0 + beta_ * c, -4.0 * beta_ * s, -16.0 * beta_ * c};
    }
    case Kind::Custom: {
      const int n = static_cast<int>(samples_.size());
      const double h = 2.0 * kPi / n;
      const double t = wrap_angle(theta) + kPi;
      int k = std::min(static_cast<int>(t / h), n - 1);
      const int kp = (k + 1) % n;
      const double a = (k + 1) * h - t, b = t - k * h;
      const double mk = second_[k], mp = second_[kp], yk = samples_[k], yp = samples_[kp];
      const double g = mk * a * a * a / (6 * h) + mp * b * b * b / (6 * h) +
                       (yk - mk * h * h / 6) * a / h + (yp - mp * h * h / 6) * b / h;
      const double dg = -mk * a * a / (2 * h) + mp * b * b / (2 * h) - (yk - mk * h * h / 6) / h +
                        (yp - mp * h * h / 6) / h;
      const double d2g = (mk * a + mp * b) / h;
      return {g, dg, d2g};
    }
  }
  return {1.0, 0.0, 0.0};
}

void AnisotropyModel::validate() const {
  const StabilityPolicy& p = stability_;
  if (p.mode == StabilityPolicy::Mode::Constant && !(p.value >= 0.0))
    throw ConfigError("constant stability value must be >= 0");
  if (p.mode != StabilityPolicy::Mode::AutoMinimal) return;
  if (p.grid < 256) throw ConfigError("stability grid must be >= 256");
  const int n = 4096;
  switch (p.scase) {
    case StabilityCase::I: {
      if (q_ != 0) throw ConfigError("stability Case I requires q = 0");
      for (int k = 0; k < n; ++k) {
        const double th = -kPi + 2.0 * kPi * k / n;
        const double g = gamma(th), gp = gamma(th + kPi);
        if (std::fabs(g - gp) > 1e-10 * std::fabs(g)) {
          std::ostringstream os;
          os << "stability Case I requires gamma(theta) = gamma(pi + theta); fails at theta = "
             << th;
          throw ConfigError(os.str());
        }
      }
      break;
    }
    case StabilityCase::III:
      if (!p.allow_case_iii) throw ConfigError("stability Case III requires allow_case_iii");
      if (q_ != 0) throw ConfigError("stability Case III requires q = 0");
      [[fallthrough]];
    case StabilityCase::II: {
      if (p.scase == StabilityCase::II && q_ != 1)
        throw ConfigError("stability Case II requires q = 1");
      for (int k = 0; k < n; ++k) {
        const double th = -kPi + 2.0 * kPi * k / n;
        if (3.0 * gamma(th) < gamma(th + kPi)) {
          std::ostringstream os;
          os << "stability precondition 3 gamma(theta) >= gamma(pi + theta) fails at theta = "
             << th;
          throw ConfigError(os.str());
        }
      }
      break;
    }
  }
}

GammaValues eval_gamma(const AnisotropyModel& model, double theta) { return model.eval(theta); }

EnergyMatrix surface_energy_matrix(const AnisotropyModel& model, double theta, double S) {
  const GammaValues gv = model.eval(theta);
  const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
  EnergyMatrix b;
  if (model.q() == 1) {
    b = {gv.g, -gv.dg, gv.dg, gv.g};
  } else {
    // [[g, -g'], [g', g]] * [[c2, s2], [s2, -c2]]
    b = {gv.g * c2 - gv.dg * s2, gv.g * s2 + gv.dg * c2, gv.dg * c2 + gv.g * s2,
         gv.dg * s2 - gv.g * c2};
  }
  b.m11 += S * 0.5 * (1.0 - c2);
  b.m12 -= S * 0.5 * s2;
  b.m21 -= S * 0.5 * s2;
  b.m22 += S * 0.5 * (1.0 + c2);
  return b;
}

StabilitySolver::StabilitySolver(const AnisotropyModel& model, StabilityCase scase, int grid)
    : model_(model), case_(scase) {
  if (grid < 256) throw ConfigError("stability grid must be >= 256");
  cos_.resize(grid);
  sin_.resize(grid);
  g_.resize(grid);
  g2_.resize(grid);
  for (int k = 0; k < grid; ++k) {
    const double th = -kPi + 2.0 * kPi * k / grid;
    cos_[k] = std::cos(th);
    sin_[k] = std::sin(th);
    g_[k] = model.gamma(th);
    g2_[k] = g_[k] * g_[k];
  }
}

double StabilitySolver::requirement(double theta, double theta_hat) const {
  const GammaValues gv = model_.eval(theta);
  const double gh = model_.gamma(theta_hat);
  const double c = std::cos(theta_hat), s = std::sin(theta_hat), g2 = gh * gh;
  double out;
  kernels::ThetaGrid one{&c, &s, &gh, &g2, 1};
  kernels::scalar::stability_requirement(static_cast<int>(case_) + 1,
                                         model_.stability().printed_case_ii_sign, one, gv.g,
                                         gv.dg, std::cos(theta), std::sin(theta), &out);
  return out;
}

double StabilitySolver::limit_at_tangent(double theta) const {
  const GammaValues gv = model_.eval(theta);
  switch (case_) {
    case StabilityCase::I:
      return gv.d2g + 2.0 * gv.g + gv.dg * gv.dg / gv.g;
    case StabilityCase::II:
      if (model_.stability().printed_case_ii_sign) break;
      return 0.5 * (gv.d2g - gv.g);
    case StabilityCase::III:
      break;
  }
  return -std::numeric_limits<double>::infinity();
}

double StabilitySolver::minimal(double theta) const {
  const GammaValues gv = model_.eval(theta);
  const std::size_t n = cos_.size();
  std::vector<double> req(n);
  kernels::ThetaGrid view{cos_.data(), sin_.data(), g_.data(), g2_.data(), n};
  kernels::stability_requirement(static_cast<int>(case_) + 1,
                                 model_.stability().printed_case_ii_sign, view, gv.g, gv.dg,
                                 std::cos(theta), std::sin(theta), req.data());
  const std::size_t kbest = static_cast<std::size_t>(
      std::max_element(req.begin(), req.end()) - req.begin());
  double best = req[kbest];
  if (std::isfinite(best)) {
    // Golden-section refinement between the neighbours of the best grid point.
    const double h = 2.0 * kPi / static_cast<double>(n);
    const double center = -kPi + h * static_cast<double>(kbest);
    double lo = center - h, hi = center + h;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = requirement(theta, x1), f2 = requirement(theta, x2);
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = requirement(theta, x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = requirement(theta, x1);
      }
    }
    best = std::max({best, f1, f2});
  }
  best = std::max({0.0, best, limit_at_tangent(theta)});
  return best + 1e-7 * (1.0 + best);
}

double StabilitySolver::max_defect(double theta, double S) const {
  const GammaValues gv = model_.eval(theta);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double sgn = model_.stability().printed_case_ii_sign ? 1.0 : -1.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double c = cos_[k] * ct + sin_[k] * st;
    const double sd = sin_[k] * ct - cos_[k] * st;
    double defect;
    if (case_ == StabilityCase::I) {
      const double lhs = gv.g * (gv.g * (c * c - sd * sd) + 2.0 * gv.dg * sd * c + S * sd * sd);
      defect = g2_[k] - lhs;
    } else if (case_ == StabilityCase::II) {
      const double q = g_[k] + gv.g * c + sgn * gv.dg * sd;
      defect = q - 2.0 * std::sqrt((gv.g + S * sd * sd) * gv.g);
    } else {
      const double f = 2.0 * c + gv.dg * sd;
      const double q = g_[k] + gv.g * c + gv.dg * sd;
      const double rad = (-gv.g + S * sd * sd + f) * gv.g;
      defect = rad < 0.0 ? std::numeric_limits<double>::infinity() : q - 2.0 * std::sqrt(rad);
    }
    worst = std::max(worst, defect);
  }
  return worst;
}

double minimal_stability(const AnisotropyModel& model, double theta, StabilityCase scase,
                         int grid) {
  return StabilitySolver(model, scase, grid).minimal(theta);
}

double stability_value(const AnisotropyModel& model, const StabilitySolver* solver,
                       double theta) {
  const StabilityPolicy& p = model.stability();
  switch (p.mode) {
    case StabilityPolicy::Mode::Zero:
      return 0.0;
    case StabilityPolicy::Mode::Constant:
      return p.value;
    case StabilityPolicy::Mode::AutoMinimal:
      if (solver) return solver->minimal(theta);
      return minimal_stability(model, theta, p.scase, p.grid);
  }
  return 0.0;
}

std::pair<double, double> lemma_sides(const AnisotropyModel& model, Vec2 v, Vec2 w, double S) {
  const double th = tangent_angle(v), th_hat = tangent_angle(w);
  const EnergyMatrix b = surface_energy_matrix(model, th, S);
  const double lhs = b.apply(w).dot(w - v) / v.norm();
  const double rhs = w.norm() * model.gamma(th_hat) - v.norm() * model.gamma(th);
  return {lhs, rhs};
}

LemmaReport verify_stability_inequality(const AnisotropyModel& model, std::size_t samples,
                                        std::uint64_t seed) {
  LemmaReport report;
  report.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(-kPi, kPi), loglen(std::log(0.1), std::log(10.0));
  std::unique_ptr<StabilitySolver> solver;
  if (model.stability().mode == StabilityPolicy::Mode::AutoMinimal)
    solver = std::make_unique<StabilitySolver>(model, model.stability().scase,
                                               model.stability().grid);
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = ang(rng), b = ang(rng);
    const double lv = std::exp(loglen(rng)), lw = std::exp(loglen(rng));
    const Vec2 v{lv * std::cos(a), lv * std::sin(a)};
    const Vec2 w{lw * std::cos(b), lw * std::sin(b)};
    const double S = stability_value(model, solver.get(), tangent_angle(v));
    const auto [lhs, rhs] = lemma_sides(model, v, w, S);
    if (lhs < rhs - 1e-12 * (v.norm() + w.norm())) report.violations.push_back({v, w, lhs, rhs});
  }
  return report;
}

}  // namespace ssd
