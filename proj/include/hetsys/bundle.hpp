#pragma once

#include "hetsys/hermitian.hpp"

namespace hetsys {

// End(E)-valued (p,q)-form on the trivialized rank-r bundle: an r x r matrix
// of ComplexForms in a fixed global unitary frame.
class EndField {
 public:
  EndField() = default;
  EndField(const GridSpec& g, int rank, int p, int q);

  static EndField identity(const GridSpec& g, int rank);   // (0,0) id matrix

  int rank() const { return rank_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int degree() const { return p_ + q_; }
  const GridSpec& grid() const { return grid_; }

  ComplexForm& entry(int i, int j) { return entries_[i * rank_ + j]; }
  const ComplexForm& entry(int i, int j) const { return entries_[i * rank_ + j]; }

  EndField operator+(const EndField& o) const;
  EndField operator-(const EndField& o) const;
  EndField operator-() const;
  EndField operator*(cplx s) const;
  friend EndField operator*(cplx s, const EndField& f) { return f * s; }
  EndField& operator+=(const EndField& o) { *this = *this + o; return *this; }
  EndField& operator-=(const EndField& o) { *this = *this - o; return *this; }

  EndField scale_form(const ComplexForm& f) const;  // f ^ (each entry), left
  EndField scale_field(const ScalarField& s) const;

  double norm_coeff() const;
  double max_abs() const;

  bool same_shape(const EndField& o) const {
    return rank_ == o.rank_ && p_ == o.p_ && q_ == o.q_ && grid_ == o.grid_;
  }

 private:
  GridSpec grid_;
  int rank_ = 0, p_ = 0, q_ = 0;
  std::vector<ComplexForm> entries_;
};

// Matrix product with entrywise form wedge.
EndField wedge_end(const EndField& a, const EndField& b);
// Conjugate transpose: (p,q) -> (q,p), (lambda^dagger)_{ij} = conj(lambda_{ji}).
EndField adjoint_end(const EndField& a);
EndField commutator(const EndField& a, const EndField& b);  // ab - ba via wedge_end
ComplexForm trace_end(const EndField& a);
EndField partial_end(const EndField& a);   // del entrywise
EndField dbar_end(const EndField& a);      // dbar entrywise
EndField project_trace_free(const EndField& a);
EndField hermitian_part(const EndField& a);  // (a + a^dagger)/2, needs p == q

// Weighted L2 pairing <A,B> = integral Tr(A B^dagger) |Omega| omega^3/3!,
// extended to (p,q)-valued fields through the form Gram matrix.
cplx inner_weighted(const HermitianMetric& m, const EndField& a, const EndField& b);
double norm_weighted(const HermitianMetric& m, const EndField& a);

// Unitary connection in a global unitary frame, stored by its (0,1)-part.
// Full connection A = -calA^dagger + calA.
struct GaugeConnection {
  int rank = 1;
  EndField calA;  // (0,1)

  static GaugeConnection flat(const GridSpec& g, int rank);
  // calA = s [[0,1],[0,0]] dzbar^0: constant non-normal, F = -[a^+,a] dz^0 dzbar^0.
  static GaugeConnection rank2_constant(const GridSpec& g, double s = 1.0);
  // calA = diag(c,-c) dzbar^0: F = 0, with nonconstant Dbar-parallel endomorphisms.
  static GaugeConnection rank2_diagonal(const GridSpec& g, cplx c);
};

enum class Cov { kD, kDbar };

// Covariant derivative on End-valued (p,q)-forms (graded commutator with the
// connection):  D  lam = del lam - calA^+ ^ lam + (-1)^{p+q} lam ^ calA^+,
//               Db lam = dbar lam + calA ^ lam - (-1)^{p+q} lam ^ calA.
EndField covariant_derivative(const GaugeConnection& conn, const EndField& s, Cov which);

// Same for a section (r x 1 column): D s = del s - calA^+ s, Db s = dbar s + calA s.
std::vector<ComplexForm> covariant_derivative_section(
    const GaugeConnection& conn, const std::vector<ComplexForm>& s, Cov which);

// Component covariant derivatives of a (0,0) endomorphism:
// D_mu u = d_mu u - [(calA^dagger)_mu, u],  Dbar_nu u = dbar_nu u + [calA_nu, u].
EndField cov_component(const GaugeConnection& conn, const EndField& u, Deriv which, int index);

struct CurvatureParts {
  EndField f20, f11, f02;
};

// F = dA + A^A with A = -calA^dagger + calA, split by type.
CurvatureParts curvature(const GaugeConnection& conn);

// Curvature along the deformation path calA -> calA + alpha + Dbar u:
// F~ = F + D(-alpha^+ + alpha) + D Dbar u - Dbar D u^+ (all commutator terms
// kept so the closed form matches the direct assembly on any background).
// Throws if Dbar alpha exceeds tol relative to alpha.
CurvatureParts deformed_curvature(const GaugeConnection& conn, const EndField& alpha,
                                  const EndField& u, double dbar_alpha_tol = 1e-8);

// Tr F ^ F as a PolyForm (pure (2,2) when F^{0,2} = F^{2,0} = 0).
PolyForm trace_FF(const CurvatureParts& F);
ComplexForm trace_FF_22(const CurvatureParts& F);

// |Omega| omega^2 ^ iF - d1 |Omega| omega^3 (x) id, an element of V(E):
// self-adjoint with vanishing integrated trace (exact when subtract_mean).
struct HymResidual {
  EndField value;   // End-valued (3,3)
  cplx d1 = 0.0;    // the subtracted normalizer
};
HymResidual hym_residual(const HermitianMetric& m, const EndField& f11,
                         bool subtract_mean);

// The same residual as a (0,0)-density against |Omega| omega^3/3! (the form
// the linearized solves work with): i Lambda F - d1' id.
EndField hym_density(const HermitianMetric& m, const EndField& f11, bool subtract_mean);

// Appendix D pair: ( <i Lambda (D Dbar - Dbar D) gamma, gamma>_w , ||Dbar gamma||_w^2 )
// under the weighted pairing; quad + kAppDSign * dbar_norm2 = 0 on conformally
// balanced HYM backgrounds for self-adjoint gamma.  The sign was fixed by the
// finite-difference integration-by-parts oracle in the test suite and is
// asserted there on every run.
inline constexpr double kAppDSign = 2.0;
struct AppDPair {
  cplx quad;
  double dbar_norm2;
};
AppDPair appD_quadratic_form(const HermitianMetric& m, const GaugeConnection& conn,
                             const EndField& gamma);

}  // namespace hetsys
