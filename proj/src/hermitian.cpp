#include "hetsys/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hetsys {

namespace {

using Mat3 = std::array<cplx, 9>;  // row-major 3x3

cplx det3(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 adjugate3(const Mat3& m) {
  Mat3 a;
  a[0] = m[4] * m[8] - m[5] * m[7];
  a[1] = m[2] * m[7] - m[1] * m[8];
  a[2] = m[1] * m[5] - m[2] * m[4];
  a[3] = m[5] * m[6] - m[3] * m[8];
  a[4] = m[0] * m[8] - m[2] * m[6];
  a[5] = m[2] * m[3] - m[0] * m[5];
  a[6] = m[3] * m[7] - m[4] * m[6];
  a[7] = m[1] * m[6] - m[0] * m[7];
  a[8] = m[0] * m[4] - m[1] * m[3];
  return a;
}

Mat3 mul3(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const cplx aik = a[3 * i + k];
      for (int j = 0; j < 3; ++j) c[3 * i + j] += aik * b[3 * k + j];
    }
  return c;
}

cplx trace3(const Mat3& m) { return m[0] + m[4] + m[8]; }

void hermitize3(Mat3& m) {
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const cplx v = 0.5 * (m[3 * i + j] + std::conj(m[3 * j + i]));
      m[3 * i + j] = v;
      m[3 * j + i] = std::conj(v);
    }
}

// Sylvester criterion for a hermitian 3x3.
bool positive_definite3(const Mat3& m) {
  const double m1 = m[0].real();
  const double m2 = (m[0] * m[4] - m[1] * m[3]).real();
  const double m3 = det3(m).real();
  return m1 > 0.0 && m2 > 0.0 && m3 > 0.0;
}

double fro_norm3(const Mat3& m) {
  double s = 0.0;
  for (const auto& v : m) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace

HermitianMetric::HermitianMetric(const GridSpec& g, std::array<ScalarField, 9> comps,
                                 cplx f_vol)
    : grid_(g), comps_(std::move(comps)), f_vol_(f_vol) {}

HermitianMetric HermitianMetric::flat(const GridSpec& g) {
  std::array<ScalarField, 9> c;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      c[3 * a + b] = ScalarField::constant(g, a == b ? cplx(1.0) : cplx(0.0));
  return HermitianMetric(g, std::move(c));
}

HermitianMetric HermitianMetric::from_kahler_form(const ComplexForm& omega, cplx f_vol) {
  if (omega.p() != 1 || omega.q() != 1)
    throw std::invalid_argument("metric needs a (1,1)-form");
  std::array<ScalarField, 9> c;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) c[3 * a + b] = omega.comp(a, b) * cplx(0.0, -1.0);
  return HermitianMetric(omega.grid(), std::move(c), f_vol);
}

ComplexForm HermitianMetric::kahler_form() const {
  ComplexForm f(grid_, 1, 1);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) f.comp(a, b) = g(a, b) * cplx(0.0, 1.0);
  return f;
}

void HermitianMetric::ensure_inverse() const {
  if (have_inv_) return;
  const std::size_t n = grid_.size();
  std::array<const std::vector<cplx>*, 9> gv;
  for (int i = 0; i < 9; ++i) gv[i] = &comps_[i].values();
  std::array<std::vector<cplx>, 9> inv;
  for (auto& v : inv) v.resize(n);
  std::vector<cplx> det(n);
  for (std::size_t x = 0; x < n; ++x) {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m[i] = (*gv[i])[x];
    const cplx d = det3(m);
    det[x] = d;
    const Mat3 adj = adjugate3(m);
    for (int i = 0; i < 9; ++i) inv[i][x] = adj[i] / d;
  }
  for (int i = 0; i < 9; ++i) ginv_[i] = ScalarField::from_values(grid_, std::move(inv[i]));
  det_ = ScalarField::from_values(grid_, std::move(det));
  have_inv_ = true;
}

const ScalarField& HermitianMetric::det() const { ensure_inverse(); return det_; }

const ScalarField& HermitianMetric::ginv(int a, int b) const {
  ensure_inverse();
  return ginv_[3 * a + b];
}

bool HermitianMetric::is_constant() const {
  if (const_state_ >= 0) return const_state_ == 1;
  bool c = true;
  for (int i = 0; i < 9 && c; ++i) {
    const ScalarField& f = comps_[i];
    const cplx mean = f.mean();
    double off = 0.0;
    for (const auto& v : f.spectrum()) off += std::norm(v);
    off -= std::norm(mean);
    if (off > 1e-28 * std::max(1.0, std::norm(mean))) c = false;
  }
  const_state_ = c ? 1 : 0;
  return c;
}

double HermitianMetric::hermiticity_defect() const {
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double n = (g(a, b).conj() - g(b, a)).norm();
      s += n * n;
    }
  return std::sqrt(s);
}

double HermitianMetric::min_eigenvalue() const {
  const std::size_t n = grid_.size();
  std::array<const std::vector<cplx>*, 9> gv;
  for (int i = 0; i < 9; ++i) gv[i] = &comps_[i].values();
  double lo = 1e300;
  for (std::size_t x = 0; x < n; ++x) {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m[i] = (*gv[i])[x];
    hermitize3(m);
    // Characteristic polynomial l^3 - tr l^2 + tr(adj) l - det; Newton from
    // below converges to the smallest root for hermitian input.
    const double tr = trace3(m).real();
    const double dt = det3(m).real();
    const double tra = trace3(adjugate3(m)).real();
    double l = 0.0;
    for (int it = 0; it < 80; ++it) {
      const double p = ((l - tr) * l + tra) * l - dt;
      const double dp = (3.0 * l - 2.0 * tr) * l + tra;
      if (std::abs(dp) < 1e-300) break;
      const double step = p / dp;
      l -= step;
      if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(l))) break;
    }
    lo = std::min(lo, l);
  }
  return lo;
}

ScalarField norm_Omega(const HermitianMetric& m) {
  const auto& det = m.det().values();
  const double f2 = std::norm(m.f_vol());
  std::vector<cplx> out(det.size());
  for (std::size_t i = 0; i < det.size(); ++i) {
    const double d = det[i].real();
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "singular metric: det " << d << " at grid point " << i;
      throw std::domain_error(os.str());
    }
    out[i] = std::sqrt(f2 / d);
  }
  return ScalarField::from_values(m.grid(), std::move(out));
}

// ---------------------------------------------------------------------------
// Hodge star

namespace {

// Combinatorial tables for star on input bidegree (P,Q): the defining
// relation pairs against the basis of (Q,P) and lands in (3-Q,3-P).
struct StarTable {
  int D = 0;                   // components of (Q,P)
  std::vector<int> sigma;      // complementary index into (3-Q,3-P)
  std::vector<double> wsign;   // e_i ^ f_sigma(i) = wsign_i dz^012 ^ dzbar^012
};

std::vector<int> complement(const std::vector<int>& s) {
  std::vector<int> out;
  for (int v = 0; v < 3; ++v)
    if (std::find(s.begin(), s.end(), v) == s.end()) out.push_back(v);
  return out;
}

const StarTable& star_table(int P, int Q) {
  static StarTable tables[4][4];
  static std::once_flag flags[4][4];
  std::call_once(flags[P][Q], [P, Q] {
    StarTable t;
    const auto& I = multi::sets(Q);
    const auto& J = multi::sets(P);
    t.D = multi::count(Q) * multi::count(P);
    t.sigma.resize(t.D);
    t.wsign.resize(t.D);
    std::vector<int> merged;
    const int cross = ((P * (3 - Q)) % 2 == 0) ? 1 : -1;  // dzbar^J past dz^{Ic}
    for (std::size_t i = 0; i < I.size(); ++i)
      for (std::size_t j = 0; j < J.size(); ++j) {
        const int idx = static_cast<int>(i) * multi::count(P) + static_cast<int>(j);
        const std::vector<int> Ic = complement(I[i]);
        const std::vector<int> Jc = complement(J[j]);
        const int sh = multi::merge_sign(I[i], Ic, merged);
        const int sa = multi::merge_sign(J[j], Jc, merged);
        t.sigma[idx] = multi::position(Ic) * multi::count(3 - P) + multi::position(Jc);
        t.wsign[idx] = static_cast<double>(sh * sa * cross);
      }
    tables[P][Q] = t;
  });
  return tables[P][Q];
}

// Gram matrix of the hermitian pairing on (p,q)-forms at one point:
// <dz^I dzbar^J, dz^K dzbar^L> = det(Ginv(K_b,I_a)) * conj(det(Ginv(L_b,J_a))).
void gram_at_point(int p, int q, const Mat3& ginv, std::vector<cplx>& gram) {
  const auto& I = multi::sets(p);
  const auto& J = multi::sets(q);
  const int cp = multi::count(p);
  const int cq = multi::count(q);
  const int D = cp * cq;
  gram.resize(static_cast<std::size_t>(D) * D);
  auto minor_det = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
    const int n = static_cast<int>(rows.size());
    if (n == 0) return cplx(1.0);
    if (n == 1) return ginv[3 * cols[0] + rows[0]];
    if (n == 2)
      return ginv[3 * cols[0] + rows[0]] * ginv[3 * cols[1] + rows[1]] -
             ginv[3 * cols[1] + rows[0]] * ginv[3 * cols[0] + rows[1]];
    Mat3 m;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m[3 * a + b] = ginv[3 * cols[b] + rows[a]];
    return det3(m);
  };
  for (int ih = 0; ih < cp; ++ih)
    for (int ia = 0; ia < cq; ++ia)
      for (int kh = 0; kh < cp; ++kh)
        for (int ka = 0; ka < cq; ++ka) {
          const cplx holo = minor_det(I[ih], I[kh]);
          const cplx anti = minor_det(J[ia], J[ka]);
          gram[static_cast<std::size_t>(ih * cq + ia) * D + (kh * cq + ka)] =
              holo * std::conj(anti);
        }
}

}  // namespace

ComplexForm hodge_star(const HermitianMetric& m, const ComplexForm& c) {
  const int P = c.p(), Q = c.q();
  const StarTable& tab = star_table(P, Q);
  const GridSpec& grid = c.grid();
  const std::size_t n = grid.size();

  ComplexForm h = conjugate(c);  // bidegree (Q,P)
  const int D = tab.D;

  std::vector<const std::vector<cplx>*> hv(D);
  for (int j = 0; j < D; ++j) hv[j] = &h.comp_flat(j).values();
  std::array<const std::vector<cplx>*, 9> giv;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) giv[3 * a + b] = &m.ginv(a, b).values();
  const auto& detv = m.det().values();

  std::vector<std::vector<cplx>> out(D);
  for (auto& v : out) v.assign(n, cplx(0.0));

  const bool constant = m.is_constant();
  std::vector<cplx> gram;
  if (constant) {
    Mat3 gi;
    for (int i = 0; i < 9; ++i) gi[i] = (*giv[i])[0];
    gram_at_point(Q, P, gi, gram);
  }
  std::vector<cplx> gram_local;
  for (std::size_t x = 0; x < n; ++x) {
    const std::vector<cplx>* G = &gram;
    if (!constant) {
      Mat3 gi;
      for (int i = 0; i < 9; ++i) gi[i] = (*giv[i])[x];
      gram_at_point(Q, P, gi, gram_local);
      G = &gram_local;
    }
    const cplx vvol = cplx(0.0, 1.0) * detv[x];
    for (int i = 0; i < D; ++i) {
      cplx v(0.0);
      for (int j = 0; j < D; ++j)
        v += (*G)[static_cast<std::size_t>(i) * D + j] * std::conj((*hv[j])[x]);
      out[tab.sigma[i]][x] = v * vvol * tab.wsign[i];
    }
  }

  ComplexForm res(grid, 3 - Q, 3 - P);
  for (int i = 0; i < D; ++i)
    res.comp_flat(i) = ScalarField::from_values(grid, std::move(out[i]));
  // Pointwise products with ginv/det alias for varying metrics.
  if (grid.dealias_products && !constant) {
    for (int i = 0; i < res.n_components(); ++i)
      res.comp_flat(i) = dealias(res.comp_flat(i));
  }
  return res;
}

// ---------------------------------------------------------------------------
// L2 pairing

cplx inner(const HermitianMetric& m, const ComplexForm& a, const ComplexForm& b) {
  if (a.p() != b.p() || a.q() != b.q())
    throw std::invalid_argument("inner: bidegree mismatch");
  const GridSpec& grid = a.grid();
  const std::size_t n = grid.size();
  const int D = a.n_components();
  std::vector<const std::vector<cplx>*> av(D), bv(D);
  for (int i = 0; i < D; ++i) {
    av[i] = &a.comp_flat(i).values();
    bv[i] = &b.comp_flat(i).values();
  }
  std::array<const std::vector<cplx>*, 9> giv;
  for (int i = 0; i < 9; ++i) giv[i] = &m.ginv(i / 3, i % 3).values();
  const auto& detv = m.det().values();
  const bool constant = m.is_constant();
  std::vector<cplx> gram;
  if (constant) {
    Mat3 gi;
    for (int i = 0; i < 9; ++i) gi[i] = (*giv[i])[0];
    gram_at_point(a.p(), a.q(), gi, gram);
  }
  std::vector<cplx> gram_local;
  cplx acc(0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const std::vector<cplx>* G = &gram;
    if (!constant) {
      Mat3 gi;
      for (int i = 0; i < 9; ++i) gi[i] = (*giv[i])[x];
      gram_at_point(a.p(), a.q(), gi, gram_local);
      G = &gram_local;
    }
    cplx s(0.0);
    for (int i = 0; i < D; ++i) {
      cplx row(0.0);
      for (int j = 0; j < D; ++j)
        row += (*G)[static_cast<std::size_t>(i) * D + j] * std::conj((*bv[j])[x]);
      s += (*av[i])[x] * row;
    }
    acc += s * detv[x];
  }
  // <a,b> vol integrates as mean(s * i det g) * top normalization.
  return acc / static_cast<double>(n) * cplx(0.0, 1.0) * top_normalization();
}

cplx inner(const HermitianMetric& m, const PolyForm& a, const PolyForm& b) {
  cplx s(0.0);
  for (const auto& [k, f] : a.parts())
    if (b.has(k.first, k.second)) s += inner(m, f, b.part(k.first, k.second));
  return s;
}

double norm_l2(const HermitianMetric& m, const ComplexForm& a) {
  return std::sqrt(std::max(0.0, inner(m, a, a).real()));
}

double norm_l2(const HermitianMetric& m, const PolyForm& a) {
  double s = 0.0;
  for (const auto& [k, f] : a.parts()) { const double v = norm_l2(m, f); s += v * v; }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Lefschetz triple

namespace {

// Lambda = sign * (star L star): the composition equals the pointwise adjoint
// of L up to a per-bidegree unit, calibrated once against the pairing and
// asserted; the double-star degree signs are asserted in the same pass.
struct LambdaCalibration {
  int table[4][4] = {};
};

const LambdaCalibration& lambda_calibration() {
  static LambdaCalibration cal;
  static std::once_flag flag;
  std::call_once(flag, [] {
    GridSpec g(4);
    for (int trial = 0; trial < 2; ++trial) {
      std::mt19937_64 rng(911 + trial);
      auto u = [&] { return 0.4 * (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5); };
      std::array<ScalarField, 9> comps;
      Mat3 base{};
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
          cplx v = (a == b) ? cplx(1.0 + 0.3 * u(), 0.0) : cplx(u(), u());
          base[3 * a + b] = v;
          base[3 * b + a] = std::conj(v);
        }
      for (int i = 0; i < 9; ++i) comps[i] = ScalarField::constant(g, base[i]);
      HermitianMetric m(g, std::move(comps));
      ComplexForm om = m.kahler_form();
      for (int p = 1; p <= 3; ++p)
        for (int q = 1; q <= 3; ++q) {
          ComplexForm a(g, p, q);
          for (int i = 0; i < a.n_components(); ++i)
            a.comp_flat(i) = ScalarField::constant(g, cplx(u(), u()));
          ComplexForm phi(g, p - 1, q - 1);
          for (int i = 0; i < phi.n_components(); ++i)
            phi.comp_flat(i) = ScalarField::constant(g, cplx(u(), u()));
          ComplexForm sls = hodge_star(m, wedge(om, hodge_star(m, a)));
          const cplx lhs = inner(m, sls, phi);
          const cplx rhs = inner(m, a, wedge(om, phi));
          const cplx ratio = rhs / lhs;
          const int s = ratio.real() > 0 ? 1 : -1;
          if (std::abs(ratio - cplx(static_cast<double>(s))) > 1e-8)
            throw std::logic_error(
                "Lambda calibration: star L star is not a unit multiple of the adjoint");
          if (trial == 0) cal.table[p][q] = s;
          else if (cal.table[p][q] != s)
            throw std::logic_error("Lambda calibration: sign differs between metrics");
        }
    }
    GridSpec g2(4);
    HermitianMetric flat = HermitianMetric::flat(g2);
    std::mt19937_64 rng(2024);
    auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
    for (int p = 0; p <= 3; ++p)
      for (int q = 0; q <= 3; ++q) {
        ComplexForm a(g2, p, q);
        for (int i = 0; i < a.n_components(); ++i)
          a.comp_flat(i) = ScalarField::constant(g2, cplx(u(), u()));
        ComplexForm ss = hodge_star(flat, hodge_star(flat, a));
        const double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
        if ((ss - a * cplx(sign)).norm_coeff() > 1e-10 * std::max(1.0, a.norm_coeff()))
          throw std::logic_error("star table failed the double-star sign assertion");
      }
  });
  return cal;
}

}  // namespace

ComplexForm lefschetz(const HermitianMetric& m, const ComplexForm& a, Lefschetz which) {
  switch (which) {
    case Lefschetz::kL: {
      if (a.p() + 1 > 3 || a.q() + 1 > 3)
        throw std::invalid_argument("Lefschetz L: degree overflow");
      return wedge(m.kahler_form(), a);
    }
    case Lefschetz::kH:
      return a * cplx(static_cast<double>(a.degree() - 3));
    case Lefschetz::kLambda: {
      if (a.p() == 0 || a.q() == 0)
        throw std::invalid_argument("Lambda needs p,q >= 1");
      const int s = lambda_calibration().table[a.p()][a.q()];
      return hodge_star(m, wedge(m.kahler_form(), hodge_star(m, a))) *
             cplx(static_cast<double>(s));
    }
  }
  throw std::logic_error("unreachable");
}

ScalarField lambda_contract_11(const HermitianMetric& m, const ComplexForm& a) {
  if (a.p() != 1 || a.q() != 1) throw std::invalid_argument("needs a (1,1)-form");
  ScalarField s(m.grid());
  for (int al = 0; al < 3; ++al)
    for (int be = 0; be < 3; ++be)
      s += mul(m.ginv(be, al), a.comp(al, be));
  return s * cplx(0.0, -1.0);  // i Lambda a = g^{bbar a} a_{a bbar}
}

// ---------------------------------------------------------------------------
// Codifferentials and Laplacians

namespace {
ComplexForm star_bar(const HermitianMetric& m, const ComplexForm& a) {
  return hodge_star(m, conjugate(a));
}
}  // namespace

ComplexForm codiff_del(const HermitianMetric& m, const ComplexForm& a) {
  if (a.p() == 0) throw std::invalid_argument("codiff_del needs p >= 1");
  return -star_bar(m, partial(star_bar(m, a)));
}

ComplexForm codiff_dbar(const HermitianMetric& m, const ComplexForm& a) {
  if (a.q() == 0) throw std::invalid_argument("codiff_dbar needs q >= 1");
  return -star_bar(m, dbar(star_bar(m, a)));
}

PolyForm codiff_d(const HermitianMetric& m, const ComplexForm& a) {
  PolyForm out;
  if (a.p() >= 1) out.add(codiff_del(m, a));
  if (a.q() >= 1) out.add(codiff_dbar(m, a));
  return out;
}

PolyForm codiff_d(const HermitianMetric& m, const PolyForm& a) {
  PolyForm out;
  for (const auto& [k, f] : a.parts()) {
    PolyForm c = codiff_d(m, f);
    for (const auto& [k2, g2] : c.parts()) out.add(g2);
  }
  return out;
}

ComplexForm laplacian_del(const HermitianMetric& m, const ComplexForm& a) {
  ComplexForm out(a.grid(), a.p(), a.q());
  if (a.p() < 3) out += codiff_del(m, partial(a));
  if (a.p() > 0) out += partial(codiff_del(m, a));
  return out;
}

ComplexForm laplacian_dbar(const HermitianMetric& m, const ComplexForm& a) {
  ComplexForm out(a.grid(), a.p(), a.q());
  if (a.q() < 3) out += codiff_dbar(m, dbar(a));
  if (a.q() > 0) out += dbar(codiff_dbar(m, a));
  return out;
}

PolyForm laplacian_d(const HermitianMetric& m, const ComplexForm& a) {
  PolyForm da = exterior_d(a);
  PolyForm out = codiff_d(m, da);
  PolyForm ca = codiff_d(m, a);
  PolyForm dca = exterior_d(ca);
  return out + dca;
}

// ---------------------------------------------------------------------------
// Chern connection and curvature

ChernData chern(const HermitianMetric& m) {
  ChernData out;
  const GridSpec& g = m.grid();
  std::array<std::array<ScalarField, 3>, 3> dg[3];  // dg[al][be][ga] = d_al g_{be ga}
  for (int al = 0; al < 3; ++al)
    for (int be = 0; be < 3; ++be)
      for (int ga = 0; ga < 3; ++ga)
        dg[al][be][ga] = derivative(m.g(be, ga), Deriv::kHolo, al);
  // Gamma^k_{al be} = g^{k gbar} d_al g_{be gbar}, g^{k gbar} = Ginv(ga, k)
  for (int k = 0; k < 3; ++k)
    for (int al = 0; al < 3; ++al)
      for (int be = 0; be < 3; ++be) {
        ScalarField s(g);
        for (int ga = 0; ga < 3; ++ga) s += mul(m.ginv(ga, k), dg[al][be][ga]);
        out.gamma[k][al][be] = s;
      }
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) {
      ComplexForm r(g, 1, 1);
      for (int al = 0; al < 3; ++al)
        for (int be = 0; be < 3; ++be)
          r.comp(al, be) = -derivative(out.gamma[mu][al][nu], Deriv::kAntiholo, be);
      out.curvature[mu][nu] = r;
    }
  return out;
}

ComplexForm chern_trace(const ChernData& c) {
  ComplexForm t = c.curvature[0][0];
  t += c.curvature[1][1];
  t += c.curvature[2][2];
  return t;
}

ComplexForm chern_trace_wedge(const ChernData& c) {
  const GridSpec& g = c.curvature[0][0].grid();
  ComplexForm out(g, 2, 2);
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu)
      out += wedge(c.curvature[mu][nu], c.curvature[nu][mu]);
  return out;
}

// ---------------------------------------------------------------------------
// (2,2)-form <-> matrix and the Michelsohn root

void form22_to_matrix(const ComplexForm& psi, std::vector<std::array<cplx, 9>>& out) {
  if (psi.p() != 2 || psi.q() != 2) throw std::invalid_argument("needs a (2,2)-form");
  const std::size_t n = psi.grid().size();
  out.assign(n, Mat3{});
  std::array<const std::vector<cplx>*, 9> pv;
  for (int i = 0; i < 9; ++i) pv[i] = &psi.comp_flat(i).values();
  for (std::size_t x = 0; x < n; ++x) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        // m22(a,b) = 1/2 (-1)^{a+b} psi_{(Ic_b, Jc_a)}; complement of {x} sits
        // at multi-index position 2-x.
        const int comp = (2 - b) * 3 + (2 - a);
        const double sign = ((a + b) % 2 == 0) ? 0.5 : -0.5;
        out[x][3 * a + b] = sign * (*pv[comp])[x];
      }
  }
}

ComplexForm matrix_to_form22(const GridSpec& g, const std::vector<std::array<cplx, 9>>& mats) {
  ComplexForm psi(g, 2, 2);
  const std::size_t n = g.size();
  std::array<std::vector<cplx>, 9> comps;
  for (auto& c : comps) c.resize(n);
  for (std::size_t x = 0; x < n; ++x)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double sign = ((a + b) % 2 == 0) ? 2.0 : -2.0;
        comps[(2 - b) * 3 + (2 - a)][x] = sign * mats[x][3 * a + b];
      }
  for (int i = 0; i < 9; ++i)
    psi.comp_flat(i) = ScalarField::from_values(g, std::move(comps[i]));
  return psi;
}

HermitianMetric michelsohn_root(const ComplexForm& psi, cplx f_vol,
                                const HermitianMetric& guess) {
  const GridSpec& grid = psi.grid();
  const std::size_t n = grid.size();
  std::vector<Mat3> target;
  form22_to_matrix(psi, target);

  std::array<const std::vector<cplx>*, 9> gv;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) gv[3 * a + b] = &guess.g(a, b).values();

  const double c = std::abs(f_vol);
  std::array<std::vector<cplx>, 9> out;
  for (auto& v : out) v.resize(n);

  double worst_res = 0.0;
  std::size_t worst_pt = 0;
  for (std::size_t x = 0; x < n; ++x) {
    Mat3 mt = target[x];
    hermitize3(mt);
    if (!positive_definite3(mt)) {
      std::ostringstream os;
      os << "michelsohn_root: (2,2)-form is not positive at grid point " << x;
      throw std::domain_error(os.str());
    }
    Mat3 G;
    for (int i = 0; i < 9; ++i) G[i] = (*gv[i])[x];
    hermitize3(G);
    if (!positive_definite3(G))
      G = Mat3{cplx(1), 0, 0, 0, cplx(1), 0, 0, 0, cplx(1)};
    const double scale = std::max(1.0, fro_norm3(mt));
    bool done = false;
    double final_res = 0.0;
    for (int it = 0; it < 50; ++it) {
      const cplx dG = det3(G);
      const double sd = std::sqrt(dG.real());
      const Mat3 adj = adjugate3(G);
      Mat3 r;
      for (int i = 0; i < 9; ++i) r[i] = mt[i] - c * sd / dG * adj[i];
      final_res = fro_norm3(r);
      if (final_res <= 1e-13 * scale) { done = true; break; }
      // Newton step: (tr(rG) G - G r G) / (c sqrt(det G))
      const Mat3 rG = mul3(r, G);
      const cplx t = trace3(rG);
      const Mat3 GrG = mul3(G, rG);
      Mat3 step;
      for (int i = 0; i < 9; ++i) step[i] = (t * G[i] - GrG[i]) / (c * sd);
      hermitize3(step);
      double lam = 1.0;
      for (int h = 0; h < 60; ++h) {
        Mat3 trial;
        for (int i = 0; i < 9; ++i) trial[i] = G[i] + lam * step[i];
        hermitize3(trial);
        if (positive_definite3(trial)) { G = trial; break; }
        lam *= 0.5;
      }
    }
    if (!done && final_res / scale > worst_res) {
      worst_res = final_res / scale;
      worst_pt = x;
    }
    for (int i = 0; i < 9; ++i) out[i][x] = G[i];
  }
  if (worst_res > 1e-12) {
    std::ostringstream os;
    os << "michelsohn_root: pointwise Newton stalled, relative residual "
       << worst_res << " at grid point " << worst_pt;
    throw std::runtime_error(os.str());
  }
  std::array<ScalarField, 9> comps;
  for (int i = 0; i < 9; ++i)
    comps[i] = ScalarField::from_values(grid, std::move(out[i]));
  return HermitianMetric(grid, std::move(comps), f_vol);
}

PolyForm balanced_residual(const HermitianMetric& m) {
  ComplexForm om = m.kahler_form();
  ComplexForm w2 = wedge(om, om);
  ComplexForm s22 = w2.scale_field(norm_Omega(m));
  return exterior_d(s22);
}

TorsionDilaton torsion_and_dilaton(const HermitianMetric& m) {
  TorsionDilaton out;
  ComplexForm om = m.kahler_form();
  out.H = (PolyForm(partial(om)) - PolyForm(dbar(om))) * cplx(0.0, 1.0);
  const ScalarField no_field = norm_Omega(m);
  const auto& no = no_field.values();
  std::vector<cplx> phi(no.size());
  for (std::size_t i = 0; i < no.size(); ++i) phi[i] = -0.5 * std::log(no[i].real());
  out.Phi = ScalarField::from_values(m.grid(), std::move(phi));
  return out;
}

}  // namespace hetsys
