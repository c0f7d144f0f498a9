#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "ssd/anisotropy.hpp"
#include "ssd/curve.hpp"

namespace ssd {

struct SchemeParams {
  double sigma = -0.6;
  double eta = 100.0;
  double eps = 0.01;
  double dt = 1.0 / 256.0;
};

// Curve plus nodal fields at one time level. mu_S vanishes at both ends.
struct SchemeState {
  GeneratingCurve curve;
  NodalField mu, mu_S, kappa;
  double t = 0.0;
};

// kappa from recover_kappa, mu_S from seed_mu_S, mu = 0.
SchemeState seed_state(const GeneratingCurve& curve, double t = 0.0);

enum Field : int { kR = 0, kZ = 1, kMu = 2, kMuS = 3 };

// Interleaved unknowns u[4 j + field], one row per (node, test field) in the
// same order. Pinned: z_0 (two contact lines), z_J, mu_S at both ends, r_0
// (island). Every pinned unknown removes the test row with the same index.
class DofMap {
 public:
  DofMap(Topology topology, int J);

  static int index(int node, int field) { return 4 * node + field; }
  int J() const { return J_; }
  Topology topology() const { return topology_; }
  int full_size() const { return 4 * (J_ + 1); }
  int free_size() const { return static_cast<int>(free_.size()); }
  bool pinned(int node, int field) const { return reduced_[index(node, field)] < 0; }
  int reduced(int full) const { return reduced_[full]; }
  const std::vector<int>& free_dofs() const { return free_; }

  Eigen::VectorXd pack(const SchemeState& s) const;
  void unpack(const Eigen::VectorXd& u, SchemeState& s) const;
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;

 private:
  Topology topology_;
  int J_;
  std::vector<int> reduced_;
  std::vector<int> free_;
};

// f^{m+1/2} on a segment is linear in rho; values at rho_{j-1}^+ and rho_j^-.
struct FHalfSegment {
  Vec2 left, right;
};
std::vector<FHalfSegment> f_half(const GeneratingCurve& m, const GeneratingCurve& next);

// (X^{m+1} - X^m, f^{m+1/2}) integrated exactly.
double volume_pairing(const GeneratingCurve& m, const GeneratingCurve& next);

struct LinearSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
};

// Residual and Jacobian of the fully discrete scheme for one step from
// state_m. Lagged data (frames, B_q(theta^m) with S(theta^m), kappa^m,
// mu_S^m) is computed once at construction.
class SchemeAssembler {
 public:
  SchemeAssembler(const SchemeState& state_m, const AnisotropyModel& model,
                  const SchemeParams& params, const StabilitySolver* solver = nullptr);

  const DofMap& dofs() const { return dofs_; }
  const SchemeState& state_m() const { return state_; }
  Eigen::VectorXd initial_guess() const { return dofs_.pack(state_); }

  // Full-size residual; pinned rows hold u - pinned value.
  Eigen::VectorXd residual(const Eigen::VectorXd& u) const;
  // Full-size Jacobian; pinned rows are identity rows.
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u) const;
  // S used in B_q on segment j (1-based).
  double stability_at_segment(int j) const { return seg_[j - 1].S; }

 private:
  struct Lagged {
    double r0, r1, z0, z1;
    Vec2 a;
    double A;
    Vec2 nm;
    double n1;
    EnergyMatrix Bm;
    double S;
    double Sm0, Sm1, k0, k1;
  };
  template <class T>
  void segment_kernel(const Lagged& L, const T* u, T* out) const;

  SchemeState state_;
  AnisotropyModel model_;
  SchemeParams params_;
  DofMap dofs_;
  std::vector<Lagged> seg_;
};

Eigen::VectorXd assemble_residual(const SchemeAssembler& as, const Eigen::VectorXd& u);
LinearSystem assemble_jacobian(const SchemeAssembler& as, const Eigen::VectorXd& u);
// Removes pinned rows and columns.
LinearSystem apply_boundary_masks(const DofMap& dofs, const LinearSystem& full);

// max |J - J_fd| / max |J| over free rows and columns; central differences
// with step h * max(1, |u_i|).
double jacobian_fd_mismatch(const SchemeAssembler& as, const Eigen::VectorXd& u, double h = 1e-6);

}  // namespace ssd
