#include "hetsys/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetsys {

namespace multi {

int position(const std::vector<int>& s) {
  const auto& tab = sets(static_cast<int>(s.size()));
  for (std::size_t i = 0; i < tab.size(); ++i)
    if (tab[i] == s) return static_cast<int>(i);
  throw std::logic_error("multi-index not found");
}

int merge_sign(const std::vector<int>& a, const std::vector<int>& b,
               std::vector<int>& merged) {
  merged.clear();
  merged.reserve(a.size() + b.size());
  merged.insert(merged.end(), a.begin(), a.end());
  merged.insert(merged.end(), b.begin(), b.end());
  // Count inversions of the concatenation; detect duplicates.
  int inv = 0;
  for (std::size_t i = 0; i < merged.size(); ++i)
    for (std::size_t j = i + 1; j < merged.size(); ++j) {
      if (merged[i] == merged[j]) return 0;
      if (merged[i] > merged[j]) ++inv;
    }
  std::sort(merged.begin(), merged.end());
  return (inv % 2 == 0) ? 1 : -1;
}

int insert_sign(int a, const std::vector<int>& s, std::vector<int>& out) {
  out.clear();
  int before = 0;
  for (int v : s) {
    if (v == a) return 0;
    if (v < a) ++before;
  }
  out = s;
  out.insert(out.begin() + before, a);
  return (before % 2 == 0) ? 1 : -1;
}

}  // namespace multi

ComplexForm::ComplexForm(const GridSpec& g, int p, int q) : grid_(g), p_(p), q_(q) {
  if (p < 0 || p > 3 || q < 0 || q > 3) throw std::invalid_argument("bidegree out of range");
  comps_.assign(static_cast<std::size_t>(n_components()), ScalarField(g));
}

ComplexForm ComplexForm::operator+(const ComplexForm& o) const {
  if (!same_shape(o)) throw std::invalid_argument("form shape mismatch");
  ComplexForm out = *this;
  for (int i = 0; i < n_components(); ++i) out.comps_[i] = comps_[i] + o.comps_[i];
  return out;
}

ComplexForm ComplexForm::operator-(const ComplexForm& o) const {
  if (!same_shape(o)) throw std::invalid_argument("form shape mismatch");
  ComplexForm out = *this;
  for (int i = 0; i < n_components(); ++i) out.comps_[i] = comps_[i] - o.comps_[i];
  return out;
}

ComplexForm ComplexForm::operator-() const { return *this * cplx(-1.0); }

ComplexForm ComplexForm::operator*(cplx s) const {
  ComplexForm out = *this;
  for (auto& c : out.comps_) c = c * s;
  return out;
}

ComplexForm ComplexForm::scale_field(const ScalarField& s) const {
  ComplexForm out = *this;
  for (auto& c : out.comps_) c = mul(c, s);
  return out;
}

double ComplexForm::norm_coeff() const {
  double s = 0.0;
  for (const auto& c : comps_) { const double n = c.norm(); s += n * n; }
  return std::sqrt(s);
}

double ComplexForm::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps_) m = std::max(m, c.max_abs());
  return m;
}

ComplexForm wedge(const ComplexForm& a, const ComplexForm& b) {
  if (a.p() + b.p() > 3 || a.q() + b.q() > 3)
    throw std::invalid_argument("wedge degree overflow");
  ComplexForm out(a.grid(), a.p() + b.p(), a.q() + b.q());
  const auto& Ia = multi::sets(a.p());
  const auto& Ja = multi::sets(a.q());
  const auto& Ib = multi::sets(b.p());
  const auto& Jb = multi::sets(b.q());
  std::vector<int> mh, ma;
  // Moving dzbar^{J1} past dz^{I2} costs (-1)^{q_a * p_b}.
  const int cross = ((a.q() * b.p()) % 2 == 0) ? 1 : -1;
  for (std::size_t i1 = 0; i1 < Ia.size(); ++i1)
    for (std::size_t j1 = 0; j1 < Ja.size(); ++j1) {
      const ScalarField& fa = a.comp(static_cast<int>(i1), static_cast<int>(j1));
      for (std::size_t i2 = 0; i2 < Ib.size(); ++i2) {
        const int sh = multi::merge_sign(Ia[i1], Ib[i2], mh);
        if (sh == 0) continue;
        const int ph = multi::position(mh);
        for (std::size_t j2 = 0; j2 < Jb.size(); ++j2) {
          const int sa = multi::merge_sign(Ja[j1], Jb[j2], ma);
          if (sa == 0) continue;
          const int pa = multi::position(ma);
          const double sign = static_cast<double>(cross * sh * sa);
          out.comp(ph, pa) += mul(fa, b.comp(static_cast<int>(i2), static_cast<int>(j2))) * cplx(sign);
        }
      }
    }
  return out;
}

ComplexForm conjugate(const ComplexForm& a) {
  ComplexForm out(a.grid(), a.q(), a.p());
  const auto& I = multi::sets(a.p());
  const auto& J = multi::sets(a.q());
  const int sign = ((a.p() * a.q()) % 2 == 0) ? 1 : -1;
  for (std::size_t i = 0; i < I.size(); ++i)
    for (std::size_t j = 0; j < J.size(); ++j)
      out.comp(static_cast<int>(j), static_cast<int>(i)) =
          a.comp(static_cast<int>(i), static_cast<int>(j)).conj() * cplx(sign);
  return out;
}

ComplexForm partial(const ComplexForm& a) {
  if (a.p() >= 3) throw std::invalid_argument("partial: degree overflow");
  ComplexForm out(a.grid(), a.p() + 1, a.q());
  const auto& I = multi::sets(a.p());
  std::vector<int> ins;
  for (std::size_t i = 0; i < I.size(); ++i) {
    for (int al = 0; al < 3; ++al) {
      const int s = multi::insert_sign(al, I[i], ins);
      if (s == 0) continue;
      const int pos = multi::position(ins);
      for (int j = 0; j < multi::count(a.q()); ++j)
        out.comp(pos, j) += derivative(a.comp(static_cast<int>(i), j), Deriv::kHolo, al) * cplx(s);
    }
  }
  return out;
}

ComplexForm dbar(const ComplexForm& a) {
  if (a.q() >= 3) throw std::invalid_argument("dbar: degree overflow");
  ComplexForm out(a.grid(), a.p(), a.q() + 1);
  const auto& J = multi::sets(a.q());
  std::vector<int> ins;
  // dzbar^b passes the p holomorphic factors first.
  const int pass = (a.p() % 2 == 0) ? 1 : -1;
  for (std::size_t j = 0; j < J.size(); ++j) {
    for (int be = 0; be < 3; ++be) {
      const int s = multi::insert_sign(be, J[j], ins);
      if (s == 0) continue;
      const int pos = multi::position(ins);
      for (int i = 0; i < multi::count(a.p()); ++i)
        out.comp(i, pos) +=
            derivative(a.comp(i, static_cast<int>(j)), Deriv::kAntiholo, be) * cplx(pass * s);
    }
  }
  return out;
}

void PolyForm::add(const ComplexForm& f) {
  auto key = std::make_pair(f.p(), f.q());
  auto it = parts_.find(key);
  if (it == parts_.end()) parts_.emplace(key, f);
  else it->second = it->second + f;
}

const ComplexForm& PolyForm::part(int p, int q) const {
  auto it = parts_.find({p, q});
  if (it == parts_.end()) throw std::out_of_range("missing bidegree part");
  return it->second;
}

PolyForm PolyForm::operator+(const PolyForm& o) const {
  PolyForm out = *this;
  for (const auto& [k, f] : o.parts_) out.add(f);
  return out;
}

PolyForm PolyForm::operator-(const PolyForm& o) const {
  PolyForm out = *this;
  for (const auto& [k, f] : o.parts_) out.add(-f);
  return out;
}

PolyForm PolyForm::operator*(cplx s) const {
  PolyForm out;
  for (const auto& [k, f] : parts_) out.add(f * s);
  return out;
}

double PolyForm::norm_coeff() const {
  double s = 0.0;
  for (const auto& [k, f] : parts_) { const double n = f.norm_coeff(); s += n * n; }
  return std::sqrt(s);
}

PolyForm exterior_d(const ComplexForm& a) {
  PolyForm out;
  if (a.p() < 3) out.add(partial(a));
  else {
    // partial would overflow only if the result is nonzero; on (3,q) it is 0.
  }
  if (a.q() < 3) out.add(dbar(a));
  return out;
}

PolyForm exterior_d(const PolyForm& a) {
  PolyForm out;
  for (const auto& [k, f] : a.parts()) {
    PolyForm df = exterior_d(f);
    for (const auto& [k2, g] : df.parts()) out.add(g);
  }
  return out;
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  PolyForm out;
  for (const auto& [ka, fa] : a.parts())
    for (const auto& [kb, fb] : b.parts()) {
      if (fa.p() + fb.p() > 3 || fa.q() + fb.q() > 3) continue;
      out.add(wedge(fa, fb));
    }
  return out;
}

PolyForm conjugate(const PolyForm& a) {
  PolyForm out;
  for (const auto& [k, f] : a.parts()) out.add(conjugate(f));
  return out;
}

namespace {

// Coefficient of the flat volume form omega^3/3! against dz^{012} ^ dzbar^{012},
// computed once through the wedge code itself.
cplx volume_coefficient() {
  static const cplx c = [] {
    GridSpec g(4);
    ComplexForm omega(g, 1, 1);
    for (int a = 0; a < 3; ++a)
      omega.comp(a, a) = ScalarField::constant(g, cplx(0.0, 1.0));
    ComplexForm w3 = wedge(wedge(omega, omega), omega) * cplx(1.0 / 6.0);
    const cplx val = w3.comp(0, 0).mean();
    if (std::abs(std::abs(val) - 1.0) > 1e-12)
      throw std::logic_error("volume normalization is not a unit");
    return val;
  }();
  return c;
}

}  // namespace

cplx top_normalization() { return cplx(1.0) / volume_coefficient(); }

cplx integrate_top(const ComplexForm& a) {
  if (a.p() != 3 || a.q() != 3) throw std::invalid_argument("integrate_top needs a (3,3)-form");
  return integrate(a.comp(0, 0)) * top_normalization();
}

double reality_defect(const ComplexForm& a) {
  if (a.p() != a.q()) throw std::invalid_argument("reality needs p == q");
  const double base = a.norm_coeff();
  const double diff = (conjugate(a) - a).norm_coeff();
  return base > 0 ? diff / base : diff;
}

ComplexForm real_part_form(const ComplexForm& a) {
  if (a.p() != a.q()) throw std::invalid_argument("real part needs p == q");
  return (a + conjugate(a)) * cplx(0.5);
}

}  // namespace hetsys
