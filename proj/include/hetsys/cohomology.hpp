#pragma once

#include <Eigen/Dense>

#include "hetsys/bundle.hpp"

namespace hetsys {

// Harmonic forms on the flat torus are exactly the constant-coefficient ones;
// this anchors all class bookkeeping.
struct HarmonicBasis {
  int p = 0, q = 0;
  std::vector<ComplexForm> basis;  // real constant forms
  Eigen::MatrixXd gram;            // L2 Gram matrix (flat metric)
};

// Real harmonic basis of H^{p,p}, p in {1,2}; dimension 9 on T^6.
HarmonicBasis harmonic_basis(const GridSpec& g, int p);

// Coefficients of the harmonic projection of a real (p,p)-form.
std::vector<double> class_coefficients(const HarmonicBasis& basis, const ComplexForm& a);
ComplexForm harmonic_combination(const HarmonicBasis& basis, const std::vector<double>& c);

// Zero-mode (harmonic) part.
ComplexForm harmonic_projection(const ComplexForm& a);
double harmonic_fraction(const ComplexForm& a);  // ||harm|| / ||a||

// Dbar-harmonic constant End-valued (0,1)-forms for a constant background
// connection: ker(Dbar) cap ker(Dbar^dagger) inside the constants, via the
// weighted pairing.  Residuals are asserted.
std::vector<EndField> harmonic_end01(const GaugeConnection& conn, bool trace_free);

// Hodge decomposition at the flat metric (Fourier-diagonal Laplacian).
// Parts can carry off-type pieces individually (they cancel in the sum), so
// they are returned as PolyForms.
struct HodgeParts {
  PolyForm harmonic, d_exact, d_coexact;
};
HodgeParts hodge_decompose(const HermitianMetric& m, const ComplexForm& a);

// Minimal-L2-norm gamma with i del dbar gamma = chi (mode-wise pseudo-inverse).
// Throws if chi has a harmonic component above tol (not ddbar-exact).
ComplexForm ddbar_potential(const ComplexForm& chi, double harmonic_tol = 1e-10);

// 4th-order Kodaira-Spencer operator on (2,2)-forms at a flat Kahler metric:
// E = dd db db+ d+ + db+ d+ dd db + db+ dd d+ db + d+ db db+ dd + db+ db + d+ dd.
ComplexForm kodaira_spencer_apply(const HermitianMetric& m, const ComplexForm& gamma);

// Unique solution in (ker E)^perp by conjugate gradients with the
// Fourier-diagonal symbol inverse as preconditioner.  Checks that the right
// side is orthogonal to ker E = {phi : d phi = 0, db+ d+ phi = 0}.
ComplexForm kodaira_spencer_invert(const HermitianMetric& m, const ComplexForm& rhs,
                                   double rel_tol = 1e-12, int max_iter = 0,
                                   double kernel_tol = 1e-9);

// R2[A~, A] = -i db+ d+ E^{-1}(Tr F~^F~ - Tr F^F), realified; the input is the
// (2,2) curvature-trace difference.
ComplexForm r2_from_difference(const HermitianMetric& m, const ComplexForm& diff22,
                               double harmonic_tol = 1e-9);
ComplexForm r2_secondary(const GaugeConnection& tilde, const GaugeConnection& base,
                         const HermitianMetric& m);

}  // namespace hetsys
