#pragma once

#include <array>

#include "hetsys/forms.hpp"

namespace hetsys {

// Pointwise hermitian positive-definite metric g_{a bbar} plus the
// holomorphic volume coefficient f (constant on the torus, Omega = f dz^012).
class HermitianMetric {
 public:
  HermitianMetric() = default;
  HermitianMetric(const GridSpec& g, std::array<ScalarField, 9> comps,
                  cplx f_vol = cplx(1.0));

  static HermitianMetric flat(const GridSpec& g);
  // Reads g_{a bbar} = -i * omega_{a bbar} off a (1,1)-form.
  static HermitianMetric from_kahler_form(const ComplexForm& omega,
                                          cplx f_vol = cplx(1.0));

  const GridSpec& grid() const { return grid_; }
  cplx f_vol() const { return f_vol_; }
  const ScalarField& g(int a, int b) const { return comps_[3 * a + b]; }
  ScalarField& g(int a, int b) { return comps_[3 * a + b]; }

  ComplexForm kahler_form() const;          // omega = i g_{a bbar} dz^a ^ dzbar^b
  const ScalarField& det() const;           // det g, lazily cached
  const ScalarField& ginv(int a, int b) const;  // matrix inverse entries
  bool is_constant() const;

  double hermiticity_defect() const;        // || conj g_{ab} - g_{ba} ||
  double min_eigenvalue() const;            // over all grid points

 private:
  void ensure_inverse() const;

  GridSpec grid_;
  std::array<ScalarField, 9> comps_;
  cplx f_vol_ = cplx(1.0);

  mutable bool have_inv_ = false;
  mutable std::array<ScalarField, 9> ginv_;
  mutable ScalarField det_;
  mutable int const_state_ = -1;  // -1 unknown, 0 varying, 1 constant
};

// |Omega|_omega = |f| (det g)^{-1/2}; throws on a non-positive determinant.
ScalarField norm_Omega(const HermitianMetric& m);

// Hodge star from the hermitian pairing: a ^ star(conj b) = <a,b> omega^3/3!.
// Bidegree (p,q) -> (3-q,3-p).
ComplexForm hodge_star(const HermitianMetric& m, const ComplexForm& a);

enum class Lefschetz { kL, kLambda, kH };
ComplexForm lefschetz(const HermitianMetric& m, const ComplexForm& a, Lefschetz which);

// Independent pointwise contraction for (1,1)-forms: Lambda a = -i g^{bbar a} a_{a bbar}.
ScalarField lambda_contract_11(const HermitianMetric& m, const ComplexForm& a);

// Codifferentials del^dagger = -star dbar star, dbar^dagger = -star del star,
// d^dagger = del^dagger + dbar^dagger (mixed bidegree output).
ComplexForm codiff_del(const HermitianMetric& m, const ComplexForm& a);
ComplexForm codiff_dbar(const HermitianMetric& m, const ComplexForm& a);
PolyForm codiff_d(const HermitianMetric& m, const ComplexForm& a);
PolyForm codiff_d(const HermitianMetric& m, const PolyForm& a);

ComplexForm laplacian_del(const HermitianMetric& m, const ComplexForm& a);
ComplexForm laplacian_dbar(const HermitianMetric& m, const ComplexForm& a);
PolyForm laplacian_d(const HermitianMetric& m, const ComplexForm& a);

// L2 pairing <a,b> = integral of a ^ star(conj b); forms must share bidegree.
cplx inner(const HermitianMetric& m, const ComplexForm& a, const ComplexForm& b);
cplx inner(const HermitianMetric& m, const PolyForm& a, const PolyForm& b);
double norm_l2(const HermitianMetric& m, const ComplexForm& a);
double norm_l2(const HermitianMetric& m, const PolyForm& a);

// Chern connection Gamma^k_{ab} = g^{k gbar} d_a g_{b gbar} and its curvature
// R^m_n = -dbar Gamma^m_{.n} as a matrix of (1,1)-forms.
struct ChernData {
  // gamma[k][al][be] = Gamma^k_{al be}
  std::array<std::array<std::array<ScalarField, 3>, 3>, 3> gamma;
  // curvature[mu][nu] = R^mu_nu, a (1,1)-form
  std::array<std::array<ComplexForm, 3>, 3> curvature;
};
ChernData chern(const HermitianMetric& m);

ComplexForm chern_trace(const ChernData& c);        // Tr R, a (1,1)-form
ComplexForm chern_trace_wedge(const ChernData& c);  // Tr R ^ R, a (2,2)-form

// Inverse of omega -> |Omega|_omega omega^2 on positive (2,2)-forms, computed
// by damped pointwise Newton on the 3x3 hermitian unknown.
HermitianMetric michelsohn_root(const ComplexForm& psi, cplx f_vol,
                                const HermitianMetric& guess);

PolyForm balanced_residual(const HermitianMetric& m);  // d(|Omega| omega^2)

struct TorsionDilaton {
  PolyForm H;        // i (del - dbar) omega, parts (2,1) and (1,2)
  ScalarField Phi;   // -1/2 log |Omega|
};
TorsionDilaton torsion_and_dilaton(const HermitianMetric& m);

// 3x3 matrix rep of a (2,2)-form: m22(|Omega| omega^2) = |Omega| det(g) g^{-1}.
// Hermitian positive-definite exactly when the form is a positive (2,2)-form.
void form22_to_matrix(const ComplexForm& psi, std::vector<std::array<cplx, 9>>& out);
ComplexForm matrix_to_form22(const GridSpec& g, const std::vector<std::array<cplx, 9>>& mats);

}  // namespace hetsys
