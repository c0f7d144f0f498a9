#pragma once

#include <functional>
#include <vector>

#include "ssd/anisotropy.hpp"
#include "ssd/vec2.hpp"

namespace ssd {

enum class Topology { TwoContactLines, Island };

using NodalField = std::vector<double>;

// Generating curve X_j = (r_j, z_j), j = 0..J, over uniform rho_j = j / J.
// Node 0 is the inner contact point (or the axis point for Island), node J
// the outer contact point; the outward normal is -h^perp / |h|.
struct GeneratingCurve {
  std::vector<double> r, z;
  Topology topology = Topology::TwoContactLines;

  int J() const { return static_cast<int>(r.size()) - 1; }
  Vec2 node(int j) const { return {r[j], z[j]}; }
  Vec2 segment(int j) const { return {r[j] - r[j - 1], z[j] - z[j - 1]}; }  // h_j, j = 1..J
  double r_inner() const { return r.front(); }
  double r_outer() const { return r.back(); }

  // Full invariant check for initial data; throws ConfigError.
  void validate() const;
};

// Samples X(rho) at rho_j = j / J, snaps pinned coordinates to exact zero
// and orders nodes so node 0 is the inner contact point or axis point.
GeneratingCurve sample_curve(const std::function<Vec2(double)>& x, int J, Topology topology);

struct SegmentFrame {
  Vec2 tau;
  Vec2 n;
  double len;
};

// Frames for segments 1..J (index 0 of the result is segment 1).
std::vector<SegmentFrame> segment_frames(const GeneratingCurve& curve);
std::vector<double> segment_lengths(const GeneratingCurve& curve);

// Normalized bisector normals at interior nodes; endpoints take the
// adjacent segment normal.
std::vector<Vec2> nodal_normals(const GeneratingCurve& curve);

// (u, v)^h = 1/2 sum_j |h_j| [ (u.v)(rho_j^-) + (u.v)(rho_{j-1}^+) ].
double mass_lumped_inner(const GeneratingCurve& curve, const NodalField& u, const NodalField& v);
double mass_lumped_inner(const GeneratingCurve& curve, const std::vector<Vec2>& u,
                         const std::vector<Vec2>& v);
// Piecewise form: left[j-1] = product at rho_{j-1}^+, right[j-1] at rho_j^-.
double mass_lumped_inner(const std::vector<double>& lengths, const std::vector<double>& left,
                         const std::vector<double>& right);

// 2 pi * exact integral of r z r_rho.
double discrete_volume(const GeneratingCurve& curve);

// W = 2 pi int r gamma ds + eps^2 pi (r, mu_S^2)^h - sigma pi (r_o^2 - r_i^2).
double discrete_energy(const GeneratingCurve& curve, const NodalField& mu_S,
                       const AnisotropyModel& model, double sigma, double eps);

// Curvature kappa = X_ss . n at interior nodes from the lumped weak form,
// endpoints by quadratic extrapolation.
NodalField recover_kappa(const GeneratingCurve& curve);

// mu_S = kappa - (n.e1)/r at interior nodes, 2 kappa at both endpoints.
NodalField initial_mu_S(const GeneratingCurve& curve, const NodalField& kappa);
// initial_mu_S with endpoints set to 0 (scheme initial data in V_0^h).
NodalField seed_mu_S(const GeneratingCurve& curve, const NodalField& kappa);

double mesh_ratio(const GeneratingCurve& curve);

}  // namespace ssd
