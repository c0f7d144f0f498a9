#include "ssd/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ssd/error.hpp"
#include "ssd/kernels.hpp"

namespace ssd {

void GeneratingCurve::validate() const {
  if (r.size() != z.size()) throw ConfigError("curve r and z sizes differ");
  if (J() < 4) throw ConfigError("curve needs J >= 4");
  for (int j = 1; j <= J(); ++j)
    if (!(segment(j).norm() > 0.0))
      throw DegenerateMesh("zero-length segment " + std::to_string(j));
  for (int j = 0; j <= J(); ++j) {
    if (!(r[j] >= 0.0)) throw ConfigError("negative r at node " + std::to_string(j));
    if (!(z[j] >= 0.0)) throw ConfigError("negative z at node " + std::to_string(j));
    if (j > 0 && j < J() && !(r[j] > 0.0))
      throw ConfigError("interior node " + std::to_string(j) + " on the axis");
  }
  if (z.back() != 0.0) throw ConfigError("z_J must be 0");
  if (topology == Topology::TwoContactLines) {
    if (z.front() != 0.0) throw ConfigError("z_0 must be 0 for two contact lines");
    if (!(r.front() > 0.0)) throw ConfigError("r_0 must be > 0 for two contact lines");
  } else if (r.front() != 0.0) {
    throw ConfigError("r_0 must be 0 for an island");
  }
}

GeneratingCurve sample_curve(const std::function<Vec2(double)>& x, int J, Topology topology) {
  if (J < 4) throw ConfigError("J >= 4 required, got " + std::to_string(J));
  GeneratingCurve c;
  c.topology = topology;
  c.r.resize(J + 1);
  c.z.resize(J + 1);
  double scale = 0.0;
  for (int j = 0; j <= J; ++j) {
    const Vec2 p = x(static_cast<double>(j) / J);
    c.r[j] = p.r;
    c.z[j] = p.z;
    scale = std::max({scale, std::fabs(p.r), std::fabs(p.z)});
  }
  const double tiny = 1e-12 * scale;
  auto snap = [tiny](double& v) {
    if (std::fabs(v) <= tiny) v = 0.0;
  };
  snap(c.z.front());
  snap(c.z.back());
  snap(c.r.front());
  snap(c.r.back());
  bool reverse = false;
  if (topology == Topology::TwoContactLines) {
    reverse = c.r.front() > c.r.back();
  } else {
    reverse = c.r.back() == 0.0 && c.r.front() != 0.0;
  }
  if (reverse) {
    std::reverse(c.r.begin(), c.r.end());
    std::reverse(c.z.begin(), c.z.end());
  }
  return c;
}

std::vector<SegmentFrame> segment_frames(const GeneratingCurve& curve) {
  std::vector<SegmentFrame> out(curve.J());
  for (int j = 1; j <= curve.J(); ++j) {
    const Vec2 h = curve.segment(j);
    const double len = h.norm();
    if (!(len > 0.0)) throw DegenerateMesh("zero-length segment " + std::to_string(j));
    out[j - 1] = {h * (1.0 / len), h.perp() * (-1.0 / len), len};
  }
  return out;
}

std::vector<double> segment_lengths(const GeneratingCurve& curve) {
  std::vector<double> out(curve.J());
  for (int j = 1; j <= curve.J(); ++j) out[j - 1] = curve.segment(j).norm();
  return out;
}

std::vector<Vec2> nodal_normals(const GeneratingCurve& curve) {
  const auto fr = segment_frames(curve);
  const int J = curve.J();
  std::vector<Vec2> out(J + 1);
  out[0] = fr.front().n;
  out[J] = fr.back().n;
  for (int j = 1; j < J; ++j) {
    const Vec2 s = fr[j - 1].n + fr[j].n;
    const double len = s.norm();
    out[j] = len > 0.0 ? s * (1.0 / len) : fr[j - 1].n;
  }
  return out;
}

double mass_lumped_inner(const std::vector<double>& lengths, const std::vector<double>& left,
                         const std::vector<double>& right) {
  if (left.size() != lengths.size() || right.size() != lengths.size())
    throw Error("mass_lumped_inner: size mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < lengths.size(); ++j) acc += 0.5 * lengths[j] * (left[j] + right[j]);
  return acc;
}

double mass_lumped_inner(const GeneratingCurve& curve, const NodalField& u, const NodalField& v) {
  const std::size_t n = curve.r.size();
  if (u.size() != n || v.size() != n) throw Error("mass_lumped_inner: size mismatch");
  const auto len = segment_lengths(curve);
  std::vector<double> left(len.size()), right(len.size());
  for (std::size_t j = 0; j < len.size(); ++j) {
    left[j] = u[j] * v[j];
    right[j] = u[j + 1] * v[j + 1];
  }
  return mass_lumped_inner(len, left, right);
}

double mass_lumped_inner(const GeneratingCurve& curve, const std::vector<Vec2>& u,
                         const std::vector<Vec2>& v) {
  const std::size_t n = curve.r.size();
  if (u.size() != n || v.size() != n) throw Error("mass_lumped_inner: size mismatch");
  const auto len = segment_lengths(curve);
  std::vector<double> left(len.size()), right(len.size());
  for (std::size_t j = 0; j < len.size(); ++j) {
    left[j] = u[j].dot(v[j]);
    right[j] = u[j + 1].dot(v[j + 1]);
  }
  return mass_lumped_inner(len, left, right);
}

double discrete_volume(const GeneratingCurve& curve) {
  return 2.0 * std::numbers::pi * kernels::volume_sum(curve.r.data(), curve.z.data(), curve.r.size());
}

double discrete_energy(const GeneratingCurve& curve, const NodalField& mu_S,
                       const AnisotropyModel& model, double sigma, double eps) {
  const double pi = std::numbers::pi;
  const int J = curve.J();
  double surface = 0.0;
  if (model.kind() == AnisotropyModel::Kind::FourFold ||
      model.kind() == AnisotropyModel::Kind::Isotropic) {
    const double beta = model.kind() == AnisotropyModel::Kind::FourFold ? model.beta() : 0.0;
    surface = kernels::fourfold_energy_sum(curve.r.data(), curve.z.data(), curve.r.size(), beta);
  } else {
    for (int j = 1; j <= J; ++j) {
      const Vec2 h = curve.segment(j);
      surface += 0.5 * (curve.r[j - 1] + curve.r[j]) * h.norm() * model.gamma(tangent_angle(h));
    }
  }
  double willmore = 0.0;
  if (eps != 0.0) {
    if (mu_S.size() != curve.r.size()) throw Error("discrete_energy: mu_S size mismatch");
    for (int j = 1; j <= J; ++j)
      willmore += 0.5 * curve.segment(j).norm() *
                  (curve.r[j - 1] * mu_S[j - 1] * mu_S[j - 1] + curve.r[j] * mu_S[j] * mu_S[j]);
  }
  const double ro = curve.r_outer(), ri = curve.r_inner();
  return 2.0 * pi * surface + eps * eps * pi * willmore - sigma * pi * (ro * ro - ri * ri);
}

NodalField recover_kappa(const GeneratingCurve& curve) {
  const auto fr = segment_frames(curve);
  const int J = curve.J();
  NodalField kappa(J + 1, 0.0);
  // Interior rows: kappa_j w_j = tau_{j+1} - tau_j with
  // w_j = (|h_j| n_j + |h_{j+1}| n_{j+1}) / 2, solved along w_j.
  for (int j = 1; j < J; ++j) {
    const SegmentFrame& a = fr[j - 1];
    const SegmentFrame& b = fr[j];
    const Vec2 w = (a.n * a.len + b.n * b.len) * 0.5;
    const double ww = w.dot(w);
    if (!(ww > 0.0)) throw DegenerateMesh("singular lumped mass at node " + std::to_string(j));
    kappa[j] = w.dot(b.tau - a.tau) / ww;
  }
  if (J >= 4) {
    kappa[0] = 3.0 * kappa[1] - 3.0 * kappa[2] + kappa[3];
    kappa[J] = 3.0 * kappa[J - 1] - 3.0 * kappa[J - 2] + kappa[J - 3];
  } else {
    kappa[0] = kappa[1];
    kappa[J] = kappa[J - 1];
  }
  return kappa;
}

NodalField initial_mu_S(const GeneratingCurve& curve, const NodalField& kappa) {
  const int J = curve.J();
  if (static_cast<int>(kappa.size()) != J + 1) throw Error("initial_mu_S: kappa size mismatch");
  const auto nbar = nodal_normals(curve);
  NodalField mu(J + 1);
  for (int j = 1; j < J; ++j) {
    if (!(curve.r[j] > 0.0))
      throw ConfigError("interior node " + std::to_string(j) + " has r = 0");
    mu[j] = kappa[j] - nbar[j].r / curve.r[j];
  }
  mu[0] = 2.0 * kappa[0];
  mu[J] = 2.0 * kappa[J];
  return mu;
}

NodalField seed_mu_S(const GeneratingCurve& curve, const NodalField& kappa) {
  NodalField mu = initial_mu_S(curve, kappa);
  mu.front() = 0.0;
  mu.back() = 0.0;
  return mu;
}

double mesh_ratio(const GeneratingCurve& curve) {
  const auto len = segment_lengths(curve);
  const auto [lo, hi] = std::minmax_element(len.begin(), len.end());
  if (!(*lo > 0.0)) throw DegenerateMesh("zero-length segment in mesh_ratio");
  return *hi / *lo;
}

}  // namespace ssd
