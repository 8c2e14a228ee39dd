#ifndef FTL_FIELD_HPP
#define FTL_FIELD_HPP

#include "ftl/smooth.hpp"

namespace ftl {

/// Complex vector field split into (1,0) and (0,1) coefficient lists:
/// X = sum_j holo[j] d/dz_j + sum_j anti[j] d/dconj(z_j).
struct Field {
  std::vector<Expr> holo, anti;

  int n() const { return (int)holo.size(); }
  bool type10() const;

  static Field zero(int n);
  /// d/dz_slot (or d/dconj(z_slot)).
  static Field coordinate(int n, int slot, bool conjugated = false);
};

Field conjugate(const Field& X);
Field operator+(const Field& X, const Field& Y);
Field scale(Cplx c, const Field& X);

/// Xf = sum holo_j df/dz_j + sum anti_j df/dconj(z_j).
Expr apply_field(const Field& X, const Expr& f);

/// Lie bracket of first-order operators.
Field bracket(const Field& X, const Field& Y);

/// <d rho, X> = sum_j holo_j * drho/dz_j  (pairing of the (1,0)-form d rho
/// with the (1,0)-part of X; module convention, no factor 2).
Expr pair_drho(const Field& X, const Expr& rho);

/// Evaluate the holomorphic coefficients at a point.
Point field_at(const Field& X, const Point& p);

/// One letter of a derivative list: a frame slot plus conjugation flag.
struct Letter {
  int slot = 0;   // 0..n-2 tangential, n-1 = normal
  bool bar = false;
  bool operator==(const Letter&) const = default;
  auto operator<=>(const Letter&) const = default;
};

/// A finite word over {L_1..L_{n-1}, conj, N, conj N} with the multiplicity
/// counters of the paper's list notation.
struct ListSpec {
  std::vector<Letter> word;

  int size() const { return (int)word.size(); }
  /// l_i: occurrences of slot i (either orientation).
  std::vector<int> counters(int nslots) const;
  /// l_i^1 (unbarred) and l_i^2 (barred).
  std::vector<int> counters_unbarred(int nslots) const;
  std::vector<int> counters_barred(int nslots) const;
  std::string str() const;
};

/// L^1 ... L^{k-2} ( <d rho, [L^{k-1}, L^k]> ) as an expression; the frame
/// supplies the field for each letter.
Expr list_apply(const ListSpec& spec, const std::vector<Field>& frame_fields,
                const Expr& rho);

} // namespace ftl

#endif
