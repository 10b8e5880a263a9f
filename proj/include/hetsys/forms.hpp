#pragma once

#include <map>
#include <vector>

#include "hetsys/spectral.hpp"

namespace hetsys {

// Increasing multi-index combinatorics over {0,1,2}.
namespace multi {

inline int count(int p) {
  static const int c[4] = {1, 3, 3, 1};
  return c[p];
}

// Lexicographically ordered increasing index sets of size p.
inline const std::vector<std::vector<int>>& sets(int p) {
  static const std::vector<std::vector<int>> tab[4] = {
      {{}},
      {{0}, {1}, {2}},
      {{0, 1}, {0, 2}, {1, 2}},
      {{0, 1, 2}},
  };
  return tab[p];
}

int position(const std::vector<int>& sorted_set);

// Sign to merge two disjoint increasing sets into one increasing set
// (counts the transpositions); returns 0 if they intersect.
int merge_sign(const std::vector<int>& a, const std::vector<int>& b,
               std::vector<int>& merged);

// Sign to prepend index a to the increasing set s; 0 if a is already in s.
int insert_sign(int a, const std::vector<int>& s, std::vector<int>& out);

}  // namespace multi

// (p,q)-form: one ScalarField per pair of strictly increasing multi-indices,
// coefficients against dz^I ^ dzbar^J.
class ComplexForm {
 public:
  ComplexForm() = default;
  ComplexForm(const GridSpec& g, int p, int q);

  int p() const { return p_; }
  int q() const { return q_; }
  int degree() const { return p_ + q_; }
  int n_components() const { return multi::count(p_) * multi::count(q_); }
  const GridSpec& grid() const { return grid_; }

  ScalarField& comp(int i_holo, int i_anti) {
    return comps_[i_holo * multi::count(q_) + i_anti];
  }
  const ScalarField& comp(int i_holo, int i_anti) const {
    return comps_[i_holo * multi::count(q_) + i_anti];
  }
  ScalarField& comp_flat(int i) { return comps_[i]; }
  const ScalarField& comp_flat(int i) const { return comps_[i]; }

  ComplexForm operator+(const ComplexForm& o) const;
  ComplexForm operator-(const ComplexForm& o) const;
  ComplexForm operator-() const;
  ComplexForm operator*(cplx s) const;
  friend ComplexForm operator*(cplx s, const ComplexForm& f) { return f * s; }
  ComplexForm& operator+=(const ComplexForm& o) { *this = *this + o; return *this; }
  ComplexForm& operator-=(const ComplexForm& o) { *this = *this - o; return *this; }

  ComplexForm scale_field(const ScalarField& s) const;  // pointwise multiply

  double norm_coeff() const;   // sqrt(sum of component L2 norms^2)
  double max_abs() const;

  bool same_shape(const ComplexForm& o) const {
    return p_ == o.p_ && q_ == o.q_ && grid_ == o.grid_;
  }

 private:
  GridSpec grid_;
  int p_ = 0, q_ = 0;
  std::vector<ScalarField> comps_;
};

ComplexForm wedge(const ComplexForm& a, const ComplexForm& b);
ComplexForm conjugate(const ComplexForm& a);
ComplexForm partial(const ComplexForm& a);   // del: (p,q) -> (p+1,q)
ComplexForm dbar(const ComplexForm& a);      // delbar: (p,q) -> (p,q+1)

// Mixed-bidegree form, keyed by (p,q).  The exterior derivative and curvature
// naturally produce these.
class PolyForm {
 public:
  PolyForm() = default;
  explicit PolyForm(const ComplexForm& f) { add(f); }

  void add(const ComplexForm& f);
  bool has(int p, int q) const { return parts_.count({p, q}) != 0; }
  const ComplexForm& part(int p, int q) const;
  const std::map<std::pair<int, int>, ComplexForm>& parts() const { return parts_; }

  PolyForm operator+(const PolyForm& o) const;
  PolyForm operator-(const PolyForm& o) const;
  PolyForm operator*(cplx s) const;

  double norm_coeff() const;

 private:
  std::map<std::pair<int, int>, ComplexForm> parts_;
};

PolyForm exterior_d(const ComplexForm& a);
PolyForm exterior_d(const PolyForm& a);
PolyForm wedge(const PolyForm& a, const PolyForm& b);
PolyForm conjugate(const PolyForm& a);

// Integral of a (3,3)-form over the torus, normalized so that the flat
// volume form omega^3/3! integrates to 1.  The normalization constant is
// computed once from the wedge algebra and asserted to be a unit.
cplx integrate_top(const ComplexForm& a);
cplx top_normalization();

// ||conj(a) - a|| relative to ||a||; zero for real forms.
double reality_defect(const ComplexForm& a);

ComplexForm real_part_form(const ComplexForm& a);  // (a + conj a)/2, needs p==q

}  // namespace hetsys
