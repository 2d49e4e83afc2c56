#pragma once

#include <functional>
#include <vector>

#include "fzeta/merofunc/closed_zeta.hpp"

namespace fzeta::merofunc {

using Function = std::function<cplx(cplx)>;

struct ContourOptions {
  int n_nodes = 64;           // starting node count, doubled until converged
  int max_nodes = 1 << 14;
  double rel_tol = 1e-10;
};

/// c_{-n} = (1/2πi)∮ f(s)(s-ω)^{n-1} ds over |s-ω| = radius by the trapezoid
/// rule; the error is the change from the previous doubling.
Estimate<cplx> laurent_coeff(const Function& f, cplx omega, int n, double radius, const ContourOptions& opt = {});
Estimate<cplx> residue_numeric(const Function& f, cplx omega, double radius, const ContourOptions& opt = {});

/// The same for a catalog zeta; throws ContourCrossesPole when another catalog
/// pole lies inside or on the circle.
Estimate<cplx> laurent_coeff(const ClosedZeta& Z, cplx omega, int n, double radius, const ContourOptions& opt = {});
Estimate<cplx> residue_numeric(const ClosedZeta& Z, cplx omega, double radius, const ContourOptions& opt = {});

struct OrderResult {
  int order = 0;                 // -(winding number of f along the circle)
  bool essential_suspect = false;
  std::vector<Estimate<cplx>> probes;  // c_{-1}, ..., c_{-depth}
};

/// Pole order by the argument principle, with Laurent probes c_{-1..-depth}
/// flagging behaviour no pole of that order can produce.
OrderResult order_numeric(const Function& f, cplx omega, double radius, int probe_depth = 5);
OrderResult order_numeric(const ClosedZeta& Z, cplx omega, double radius, int probe_depth = 5);

/// Catalog poles in the window when a catalog exists, otherwise Newton on 1/Z
/// from a seed grid with each hit confirmed by order_numeric. Sorted by Im.
std::vector<PoleRecord> poles_in_window(const ClosedZeta& Z, double re_lo, double re_hi, double im_lo,
                                        double im_hi);
std::vector<PoleRecord> poles_in_window(const Function& f, double re_lo, double re_hi, double im_lo, double im_hi);

}  // namespace fzeta::merofunc
