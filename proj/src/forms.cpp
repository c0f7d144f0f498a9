#include "ssd/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssd/dual.hpp"
#include "ssd/error.hpp"

namespace ssd {

namespace {

using D8 = Dual<8>;

double gamma_of(const AnisotropyModel& m, double theta) { return m.gamma(theta); }
D8 gamma_of(const AnisotropyModel& m, const D8& theta) {
  const GammaValues g = m.eval(theta.v);
  return chain(theta, g.g, g.dg);
}

template <class T>
T sq(const T& x) {
  return x * x;
}

constexpr double kSimpsonRho[3] = {0.0, 0.5, 1.0};
constexpr double kSimpsonW[3] = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};

}  // namespace

SchemeState seed_state(const GeneratingCurve& curve, double t) {
  SchemeState s;
  s.curve = curve;
  s.kappa = recover_kappa(curve);
  s.mu_S = seed_mu_S(curve, s.kappa);
  s.mu.assign(curve.r.size(), 0.0);
  s.t = t;
  return s;
}

DofMap::DofMap(Topology topology, int J) : topology_(topology), J_(J) {
  if (J < 4) throw ConfigError("J >= 4 required, got " + std::to_string(J));
  reduced_.assign(full_size(), 0);
  auto pin = [this](int node, int field) { reduced_[index(node, field)] = -1; };
  pin(J, kZ);
  pin(0, kMuS);
  pin(J, kMuS);
  if (topology == Topology::TwoContactLines)
    pin(0, kZ);
  else
    pin(0, kR);
  for (int i = 0; i < full_size(); ++i) {
    if (reduced_[i] < 0) continue;
    reduced_[i] = static_cast<int>(free_.size());
    free_.push_back(i);
  }
}

Eigen::VectorXd DofMap::pack(const SchemeState& s) const {
  if (s.curve.J() != J_ || s.mu.size() != s.curve.r.size() || s.mu_S.size() != s.curve.r.size())
    throw Error("DofMap::pack: state size mismatch");
  Eigen::VectorXd u(full_size());
  for (int j = 0; j <= J_; ++j) {
    u[index(j, kR)] = s.curve.r[j];
    u[index(j, kZ)] = s.curve.z[j];
    u[index(j, kMu)] = s.mu[j];
    u[index(j, kMuS)] = s.mu_S[j];
  }
  return u;
}

void DofMap::unpack(const Eigen::VectorXd& u, SchemeState& s) const {
  if (u.size() != full_size()) throw Error("DofMap::unpack: size mismatch");
  s.curve.topology = topology_;
  s.curve.r.resize(J_ + 1);
  s.curve.z.resize(J_ + 1);
  s.mu.resize(J_ + 1);
  s.mu_S.resize(J_ + 1);
  for (int j = 0; j <= J_; ++j) {
    s.curve.r[j] = u[index(j, kR)];
    s.curve.z[j] = u[index(j, kZ)];
    s.mu[j] = u[index(j, kMu)];
    s.mu_S[j] = u[index(j, kMuS)];
  }
}

Eigen::VectorXd DofMap::restrict_to_free(const Eigen::VectorXd& full) const {
  if (full.size() != full_size()) throw Error("DofMap::restrict_to_free: size mismatch");
  Eigen::VectorXd out(free_size());
  for (int i = 0; i < free_size(); ++i) out[i] = full[free_[i]];
  return out;
}

std::vector<FHalfSegment> f_half(const GeneratingCurve& m, const GeneratingCurve& next) {
  if (m.r.size() != next.r.size() || m.z.size() != next.z.size() || m.r.size() != m.z.size())
    throw Error("f_half: curves must share J");
  const int J = m.J();
  std::vector<FHalfSegment> out(J);
  for (int j = 1; j <= J; ++j) {
    const Vec2 a = m.segment(j), b = next.segment(j);
    auto at = [&](int node) {
      const double rm = m.r[node], R = next.r[node];
      const Vec2 g = a * (2.0 * rm) + b * (2.0 * R) + b * rm + a * R;
      return g.perp() * (-1.0 / 6.0);
    };
    out[j - 1] = {at(j - 1), at(j)};
  }
  return out;
}

double volume_pairing(const GeneratingCurve& m, const GeneratingCurve& next) {
  const auto f = f_half(m, next);
  double acc = 0.0;
  for (int j = 1; j <= m.J(); ++j) {
    const Vec2 d0{next.r[j - 1] - m.r[j - 1], next.z[j - 1] - m.z[j - 1]};
    const Vec2 d1{next.r[j] - m.r[j], next.z[j] - m.z[j]};
    const FHalfSegment& s = f[j - 1];
    // Both factors are linear on the segment, so Simpson is exact.
    const Vec2 dh = (d0 + d1) * 0.5, fh = (s.left + s.right) * 0.5;
    acc += (d0.dot(s.left) + 4.0 * dh.dot(fh) + d1.dot(s.right)) / 6.0;
  }
  return acc;
}

SchemeAssembler::SchemeAssembler(const SchemeState& state_m, const AnisotropyModel& model,
                                 const SchemeParams& params, const StabilitySolver* solver)
    : state_(state_m),
      model_(model),
      params_(params),
      dofs_(state_m.curve.topology, state_m.curve.J()) {
  if (!(params.dt > 0.0)) throw Error("time step must be positive");
  const GeneratingCurve& c = state_.curve;
  const int J = c.J();
  if (state_.mu_S.size() != c.r.size() || state_.kappa.size() != c.r.size())
    throw Error("SchemeAssembler: field size mismatch");
  if (state_.mu.size() != c.r.size()) state_.mu.assign(c.r.size(), 0.0);
  seg_.resize(J);
  for (int j = 1; j <= J; ++j) {
    Lagged& L = seg_[j - 1];
    L.r0 = c.r[j - 1];
    L.r1 = c.r[j];
    L.z0 = c.z[j - 1];
    L.z1 = c.z[j];
    L.a = c.segment(j);
    L.A = L.a.norm();
    if (!(L.A > 0.0)) throw DegenerateMesh("zero-length segment " + std::to_string(j));
    L.nm = Vec2{-L.a.z, L.a.r} * (1.0 / L.A);
    L.n1 = L.nm.r;
    const double theta = tangent_angle(L.a);
    L.S = stability_value(model_, solver, theta);
    L.Bm = surface_energy_matrix(model_, theta, L.S);
    L.Sm0 = state_.mu_S[j - 1];
    L.Sm1 = state_.mu_S[j];
    L.k0 = state_.kappa[j - 1];
    L.k1 = state_.kappa[j];
  }
}

// Local unknowns u = (R0, Z0, M0, S0, R1, Z1, M1, S1). Local rows pair with
// them: (omega_1, omega_2, phi, psi) at the left node, then the right.
// rho is normalized to [0, 1] on the segment, so h takes the place of X_rho.
template <class T>
void SchemeAssembler::segment_kernel(const Lagged& L, const T* u, T* out) const {
  const double dt = params_.dt, e2 = params_.eps * params_.eps;
  const T R[2] = {u[0], u[4]}, Z[2] = {u[1], u[5]}, M[2] = {u[2], u[6]}, S[2] = {u[3], u[7]};
  const double rm[2] = {L.r0, L.r1}, zm[2] = {L.z0, L.z1};
  const double Sm[2] = {L.Sm0, L.Sm1}, km[2] = {L.k0, L.k1};
  const double dphi[2] = {-1.0, 1.0};
  const double A = L.A, ar = L.a.r, az = L.a.z;
  const double rbar = 0.5 * (L.r0 + L.r1);

  const T br = R[1] - R[0], bz = Z[1] - Z[0];
  const T B = sqrt(br * br + bz * bz);

  for (int i = 0; i < 8; ++i) out[i] = T(0.0);

  // (X^{m+1} - X^m, f phi) / dt and (mu f, omega), Simpson-exact.
  for (int q = 0; q < 3; ++q) {
    const double rho = kSimpsonRho[q], w = kSimpsonW[q];
    const double phi[2] = {1.0 - rho, rho};
    const double rmq = rm[0] * phi[0] + rm[1] * phi[1];
    const T Rq = R[0] * phi[0] + R[1] * phi[1];
    const T gr = 2.0 * rmq * ar + 2.0 * Rq * br + rmq * br + Rq * ar;
    const T gz = 2.0 * rmq * az + 2.0 * Rq * bz + rmq * bz + Rq * az;
    const T fr = gz * (-1.0 / 6.0), fz = gr * (1.0 / 6.0);
    const T dXr = (R[0] - rm[0]) * phi[0] + (R[1] - rm[1]) * phi[1];
    const T dXz = (Z[0] - zm[0]) * phi[0] + (Z[1] - zm[1]) * phi[1];
    const T pair = dXr * fr + dXz * fz;
    const T muq = M[0] * phi[0] + M[1] * phi[1];
    for (int k = 0; k < 2; ++k) {
      out[4 * k + 2] += (w * phi[k] / dt) * pair;
      out[4 * k + 0] += (w * phi[k]) * muq * fr;
      out[4 * k + 1] += (w * phi[k]) * muq * fz;
    }
  }

  const T Bbr = L.Bm.m11 * br + L.Bm.m12 * bz;
  const T Bbz = L.Bm.m21 * br + L.Bm.m22 * bz;
  const T dS = S[1] - S[0];
  const T quart = 0.25 * (R[0] * sq(S[0]) + R[1] * sq(S[1]));
  const T half_sum = 0.5 * (S[0] + S[1]);
  const T wr = e2 * (rbar * L.nm.r * dS + quart * br + L.n1 * half_sum * ar);
  const T wz = e2 * (rbar * L.nm.z * dS + quart * bz + L.n1 * half_sum * az);
  const T gam = gamma_of(model_, atan2(bz, br));
  const T dbr = br - ar, dbz = bz - az;
  const T b_dot_db = br * dbr + bz * dbz;
  const T a_dot_db = ar * dbr + az * dbz;
  const T nm_dot_db = L.nm.r * dbr + L.nm.z * dbz;

  for (int k = 0; k < 2; ++k) {
    const double dk = dphi[k] / A;
    out[4 * k + 2] += (rbar * dk) * (M[1] - M[0]);
    out[4 * k + 0] += (-rbar * Bbr + wr) * dk - 0.5 * gam * B +
                      e2 * A * (0.25 * sq(S[k]) - 0.5 * S[k] * km[k]);
    out[4 * k + 1] += (-rbar * Bbz + wz) * dk;
    const T eq3 = 0.5 * A * (R[k] - rm[k]) * S[k] + 0.5 * A * rm[k] * (S[k] - Sm[k]) +
                  (rbar * dk) * nm_dot_db + 0.5 * R[k] * S[k] * b_dot_db / A +
                  (0.5 * L.n1 / A) * a_dot_db - 0.5 * A * (R[k] - rm[k]) * km[k];
    out[4 * k + 3] += eq3 * (1.0 / dt);
  }
}

Eigen::VectorXd SchemeAssembler::residual(const Eigen::VectorXd& u) const {
  const int n = dofs_.full_size(), J = dofs_.J();
  if (u.size() != n) throw Error("residual: unknown vector size mismatch");
  if (!u.allFinite()) throw Error("residual: NaN in guess");
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
  double loc[8], out[8];
  for (int j = 1; j <= J; ++j) {
    for (int i = 0; i < 8; ++i) loc[i] = u[4 * (j - 1) + i];
    segment_kernel<double>(seg_[j - 1], loc, out);
    for (int i = 0; i < 8; ++i) F[4 * (j - 1) + i] += out[i];
  }
  const double eta_dt = params_.eta * params_.dt, sig = params_.sigma;
  const double rJ = state_.curve.r[J], RJ = u[DofMap::index(J, kR)];
  F[DofMap::index(J, kR)] += -(RJ * RJ - rJ * rJ) / (2.0 * eta_dt) + 0.5 * sig * (RJ + rJ);
  if (dofs_.topology() == Topology::TwoContactLines) {
    const double r0 = state_.curve.r[0], R0 = u[DofMap::index(0, kR)];
    F[DofMap::index(0, kR)] += -(R0 * R0 - r0 * r0) / (2.0 * eta_dt) - 0.5 * sig * (R0 + r0);
  }
  const Eigen::VectorXd um = dofs_.pack(state_);
  for (int i = 0; i < n; ++i)
    if (dofs_.reduced(i) < 0) F[i] = u[i] - um[i];
  return F;
}

Eigen::SparseMatrix<double> SchemeAssembler::jacobian(const Eigen::VectorXd& u) const {
  const int n = dofs_.full_size(), J = dofs_.J();
  if (u.size() != n) throw Error("jacobian: unknown vector size mismatch");
  if (!u.allFinite()) throw Error("jacobian: NaN in guess");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(64 * J + n);
  D8 loc[8], out[8];
  for (int j = 1; j <= J; ++j) {
    const int base = 4 * (j - 1);
    for (int i = 0; i < 8; ++i) loc[i] = D8::variable(u[base + i], i);
    segment_kernel<D8>(seg_[j - 1], loc, out);
    for (int row = 0; row < 8; ++row) {
      if (dofs_.reduced(base + row) < 0) continue;
      for (int col = 0; col < 8; ++col)
        if (out[row].d[col] != 0.0) trip.emplace_back(base + row, base + col, out[row].d[col]);
    }
  }
  const double eta_dt = params_.eta * params_.dt, sig = params_.sigma;
  const int iJ = DofMap::index(J, kR);
  trip.emplace_back(iJ, iJ, -u[iJ] / eta_dt + 0.5 * sig);
  if (dofs_.topology() == Topology::TwoContactLines) {
    const int i0 = DofMap::index(0, kR);
    trip.emplace_back(i0, i0, -u[i0] / eta_dt - 0.5 * sig);
  }
  for (int i = 0; i < n; ++i)
    if (dofs_.reduced(i) < 0) trip.emplace_back(i, i, 1.0);
  Eigen::SparseMatrix<double> Jm(n, n);
  Jm.setFromTriplets(trip.begin(), trip.end());
  return Jm;
}

Eigen::VectorXd assemble_residual(const SchemeAssembler& as, const Eigen::VectorXd& u) {
  return as.residual(u);
}

LinearSystem assemble_jacobian(const SchemeAssembler& as, const Eigen::VectorXd& u) {
  return {as.jacobian(u), -as.residual(u)};
}

LinearSystem apply_boundary_masks(const DofMap& dofs, const LinearSystem& full) {
  const int n = dofs.full_size();
  if (full.A.rows() != n || full.A.cols() != n || full.b.size() != n)
    throw Error("apply_boundary_masks: size mismatch");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(full.A.nonZeros());
  for (int k = 0; k < full.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(full.A, k); it; ++it) {
      const int r = dofs.reduced(static_cast<int>(it.row()));
      const int c = dofs.reduced(static_cast<int>(it.col()));
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  LinearSystem out;
  out.A.resize(dofs.free_size(), dofs.free_size());
  out.A.setFromTriplets(trip.begin(), trip.end());
  out.b = dofs.restrict_to_free(full.b);
  return out;
}

double jacobian_fd_mismatch(const SchemeAssembler& as, const Eigen::VectorXd& u, double h) {
  const DofMap& dm = as.dofs();
  const Eigen::MatrixXd Ja =
      Eigen::MatrixXd(apply_boundary_masks(dm, assemble_jacobian(as, u)).A);
  Eigen::MatrixXd Jf(Ja.rows(), Ja.cols());
  const auto& fr = dm.free_dofs();
  for (std::size_t c = 0; c < fr.size(); ++c) {
    const double step = h * std::max(1.0, std::fabs(u[fr[c]]));
    Eigen::VectorXd up = u, um = u;
    up[fr[c]] += step;
    um[fr[c]] -= step;
    Jf.col(static_cast<Eigen::Index>(c)) =
        dm.restrict_to_free(as.residual(up) - as.residual(um)) / (2.0 * step);
  }
  const double scale = std::max(Ja.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (Ja - Jf).cwiseAbs().maxCoeff() / scale;
}

}  // namespace ssd
