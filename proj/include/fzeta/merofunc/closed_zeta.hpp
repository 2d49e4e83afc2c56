#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fzeta/merofunc/expr.hpp"

namespace fzeta::merofunc {

enum class Provenance { Analytic, NumericContour };

struct PoleRecord {
  cplx location{};
  int order = 1;           // ignored when essential
  bool essential = false;
  cplx residue{};          // leading coefficient c_{-order}
  Provenance provenance = Provenance::Analytic;
  // "ok", "unverified" (cancellation not excluded) or "cancelled" (numerator vanishes there)
  std::string status = "ok";
};

/// An isolated pole with a known leading coefficient.
struct FinitePole {
  cplx location{};
  int order = 1;
  cplx residue{};
  bool removable = false;  // analytic residue vanishes: kept for the guard, never listed
};

/// A family of poles sharing order and residue formula, usually the vertical
/// lattice re + i·period·ℤ. Non-lattice families supply their own point source.
struct PoleFamily {
  double re = 0.0;
  double period = 0.0;  // > 0 for a lattice
  int order = 1;
  bool essential = false;
  std::function<cplx(cplx)> residue;  // leading coefficient at a point of the family
  std::function<std::vector<cplx>(double im_lo, double im_hi)> points;  // empty: use the lattice
  std::function<double(cplx)> distance;  // to the nearest point; empty: use the lattice
  std::function<cplx(cplx)> numerator;  // evaluated to detect zero-pole cancellation
  bool cancellation_unverified = false;

  std::vector<cplx> points_in(double im_lo, double im_hi) const;
  double distance_to(cplx s) const;
};

struct PoleCatalog {
  std::vector<FinitePole> finite;
  std::vector<PoleFamily> families;
};

struct Meta {
  std::optional<double> D_abs;
  std::optional<double> D_hol;
  std::optional<double> D_mer;
  std::optional<double> first_length;  // ℓ₁ of the underlying string, when the zeta is geometric
};

struct ClosedZeta {
  std::string name;
  ExprPtr expr;
  Meta meta;
  std::optional<PoleCatalog> catalog;
};

// Catalog families.
ClosedZeta catalog_constant(cplx c);
ClosedZeta catalog_cantor_geometric();
ClosedZeta catalog_extended_self_similar(const ClosedZeta& zeta0, const std::vector<double>& ratios);
ClosedZeta catalog_nth_order_cantor(int n);
/// ζ₀(s)·Σ_{n=1}^{n_max} 1/((n!)^s (1 - Σ r_j^s)^n); lattice points become essential singularities.
ClosedZeta catalog_infinite_order(const ClosedZeta& zeta0, const std::vector<double>& ratios, int n_max);
/// 3^{-s} Σ_{n=1}^{n_max} 1/((n!)^s (3^s - 2)^n): disjoint union of the n-th order Cantor strings scaled by 3^{-n}/n!.
ClosedZeta catalog_cantor_infinite_order(int n_max);
ClosedZeta catalog_distance_string(const ClosedZeta& zetaL, double delta);
ClosedZeta catalog_generalized_cantor_distance(int m, double a, double delta);
ClosedZeta catalog_sierpinski_carpet(double delta);
ClosedZeta catalog_grill(const ClosedZeta& zetaA, int m);
/// Zeta of the λ-scaled object: λ^s Z(s), residues times λ^ω.
ClosedZeta scale(const ClosedZeta& Z, double lambda);

/// Named catalogs for the command line.
ClosedZeta catalog_by_name(const std::string& name, double delta);
std::vector<std::string> catalog_names();

double guard_radius(cplx s);

/// Exact evaluation. Throws PoleProximity within the guard radius of a catalog
/// pole and TruncationUnstable when a truncated series cannot be trusted at s.
cplx eval(const ClosedZeta& Z, cplx s);
Estimate<cplx> eval_with_error(const ClosedZeta& Z, cplx s);

/// Nonremovable, noncancelled catalog poles with re_lo ≤ Re ω ≤ re_hi and
/// im_lo ≤ Im ω ≤ im_hi, coincident entries merged, sorted by Im then Re.
std::vector<PoleRecord> catalog_poles(const ClosedZeta& Z, double re_lo, double re_hi, double im_lo, double im_hi);

nlohmann::json zeta_to_json(const ClosedZeta& Z);

std::string to_string(Provenance p);
void write_pole_csv(std::ostream& out, const std::vector<PoleRecord>& poles);
nlohmann::json poles_to_json(const std::vector<PoleRecord>& poles);
std::vector<PoleRecord> poles_from_json(const nlohmann::json& j);

}  // namespace fzeta::merofunc
