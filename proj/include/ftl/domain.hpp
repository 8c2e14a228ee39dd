#ifndef FTL_DOMAIN_HPP
#define FTL_DOMAIN_HPP

#include <optional>
#include <string>

#include "ftl/field.hpp"
#include "ftl/parse.hpp"

namespace ftl {

/// Rigid polynomial model domain rho = Re z_n + P(z', conj z') < 0.
/// Internally the complex normal direction is always the last slot; input
/// files may declare any slot and are permuted on ingestion.
struct ModelDomain {
  std::string name;
  int n = 0;             // total complex dimension
  int M = 4;             // type bound used for list enumeration
  double window = 1.0;   // all computations restricted to |z| <= window
  CPoly P;               // real-valued, depends only on z_1..z_{n-1}
  CPoly rho_poly;        // Re z_n + P
  Expr rho;              // same, as an expression node
  bool levi_psd_ok = true;   // pseudoconvexity spot-check result
  double levi_min_eig = 0.0; // worst sampled Levi eigenvalue

  /// Distance proxy to the boundary for interior points: |rho(p)|.
  double delta_of(const Point& p) const;
  /// Boundary point above z': Re z_n = -P(z'), Im z_n = im_n.
  Point boundary_point(const Point& zprime, double im_n = 0.0) const;
};

struct DomainSpec {
  std::string name;
  int n = 0;
  int normal_slot = 0; // 1-based as in the input file
  std::string P_text;
  int M = 4;
  double window = 1.0;
};

/// Build and validate a model domain; throws std::runtime_error on violated
/// preconditions (parse error, P not real, gradient at 0 nonzero). A failed
/// Levi PSD spot-check is recorded, not fatal.
ModelDomain make_domain(const DomainSpec& spec);

/// Parse a domain JSON file {name, n, normal_slot, P, M, window}.
DomainSpec load_domain_spec(const std::string& path);
ModelDomain load_domain(const std::string& path);

enum class Provenance { canonical, levi_eigen, user, localized };

struct Frame {
  std::vector<Field> L; // n-1 tangent fields
  Field N;              // unitary complex normal
  Provenance prov = Provenance::canonical;
  bool degenerate = false; // levi_eigen at a degenerate point

  /// Field for a list letter slot: 0..n-2 tangential, n-1 normal.
  const Field& slot_field(int s) const { return s < (int)L.size() ? L[s] : N; }
  std::vector<Field> all_fields() const;
};

/// Canonical rigid frame L_i = d/dz_i - 2 (dP/dz_i) d/dz_n and the
/// RecipSqrt-normalized gradient normal.
Frame tangent_frame(const ModelDomain& d);

/// Levi matrix c_ij(p) = <d rho, [L_i, conj L_j]> in the given frame.
Eigen::MatrixXcd levi_matrix(const Frame& f, const ModelDomain& d,
                             const Point& p);

/// Constant-coefficient unitary recombination of the canonical frame
/// diagonalizing c_ij(p); eigenvalues sorted descending.
Frame levi_eigen_frame(const ModelDomain& d, const Point& p,
                       Eigen::VectorXd* eigenvalues = nullptr);

} // namespace ftl

#endif
