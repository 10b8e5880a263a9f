#include "hetsys/cohomology.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "hetsys/symbols.hpp"

namespace hetsys {

namespace symbols {

Eigen::MatrixXcd partial_sym(int p, int q, const std::array<int, 6>& k) {
  const int cq = multi::count(q);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(multi::count(p + 1) * cq,
                                              multi::count(p) * cq);
  const auto& I = multi::sets(p);
  std::vector<int> ins;
  for (std::size_t i = 0; i < I.size(); ++i)
    for (int a = 0; a < 3; ++a) {
      const int s = multi::insert_sign(a, I[i], ins);
      if (s == 0) continue;
      const int pos = multi::position(ins);
      for (int j = 0; j < cq; ++j)
        M(pos * cq + j, static_cast<int>(i) * cq + j) =
            static_cast<double>(s) * hol_mult(k, a);
    }
  return M;
}

Eigen::MatrixXcd dbar_sym(int p, int q, const std::array<int, 6>& k) {
  const int cp = multi::count(p);
  const int cq = multi::count(q);
  const int cq1 = multi::count(q + 1);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(cp * cq1, cp * cq);
  const auto& J = multi::sets(q);
  const double pass = (p % 2 == 0) ? 1.0 : -1.0;
  std::vector<int> ins;
  for (std::size_t j = 0; j < J.size(); ++j)
    for (int b = 0; b < 3; ++b) {
      const int s = multi::insert_sign(b, J[j], ins);
      if (s == 0) continue;
      const int pos = multi::position(ins);
      for (int i = 0; i < cp; ++i)
        M(i * cq1 + pos, i * cq + static_cast<int>(j)) =
            pass * static_cast<double>(s) * anti_mult(k, b);
    }
  return M;
}

const ModeSet& banded_modes(const GridSpec& g) {
  static std::mutex mu;
  static std::map<std::array<int, 6>, ModeSet>* cache =
      new std::map<std::array<int, 6>, ModeSet>();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache->find(g.n);
  if (it != cache->end()) return it->second;
  ModeSet ms;
  GridIndexer ix(g);
  std::array<int, 6> idx;
  for (std::size_t f = 0; f < g.size(); ++f) {
    ix.decode(f, idx);
    bool keep = true;
    std::array<int, 6> k;
    for (int a = 0; a < 6; ++a) {
      k[a] = g.freq(a, idx[a]);
      if (std::abs(k[a]) > g.dealias_limit(a)) { keep = false; break; }
    }
    if (keep) {
      ms.flat.push_back(f);
      ms.k.push_back(k);
    }
  }
  auto [pos, ok] = cache->emplace(g.n, std::move(ms));
  return pos->second;
}

Eigen::VectorXcd gather_mode(const ComplexForm& f, std::size_t flat) {
  Eigen::VectorXcd v(f.n_components());
  for (int i = 0; i < f.n_components(); ++i) v(i) = f.comp_flat(i).spectrum()[flat];
  return v;
}

}  // namespace symbols

namespace {

using symbols::banded_modes;

// Assemble a form from per-mode component vectors.
class ModeWorkspace {
 public:
  ModeWorkspace(const GridSpec& g, int p, int q)
      : grid_(g), p_(p), q_(q),
        spec_(static_cast<std::size_t>(multi::count(p) * multi::count(q))) {
    for (auto& v : spec_) v.assign(g.size(), cplx(0.0));
  }
  void set(std::size_t flat, const Eigen::VectorXcd& v) {
    for (int i = 0; i < static_cast<int>(spec_.size()); ++i) spec_[i][flat] = v(i);
  }
  ComplexForm take() {
    ComplexForm f(grid_, p_, q_);
    for (int i = 0; i < static_cast<int>(spec_.size()); ++i)
      f.comp_flat(i) = ScalarField::from_spectrum(grid_, std::move(spec_[i]));
    return f;
  }

 private:
  GridSpec grid_;
  int p_, q_;
  std::vector<std::vector<cplx>> spec_;
};

// Per-mode data for the Kodaira-Spencer solve.
struct KSModeData {
  Eigen::MatrixXcd pinv;    // pseudo-inverse of the 9x9 symbol
  Eigen::MatrixXcd kernel;  // orthonormal kernel basis (9 x dim)
};

struct KSCache {
  std::vector<KSModeData> modes;  // aligned with banded_modes
};

Eigen::MatrixXcd ks_symbol(const std::array<int, 6>& k) {
  using namespace symbols;
  // adjoint symbols are conjugate transposes in the orthonormal mode basis
  auto P = [&](int p, int q) { return partial_sym(p, q, k); };
  auto Q = [&](int p, int q) { return dbar_sym(p, q, k); };
  // term 1: dd db db+ d+  on (2,2): d+ :(2,2)->(1,2), db+ :(1,2)->(1,1), db, dd
  Eigen::MatrixXcd t1 = P(1, 2) * Q(1, 1) * Q(1, 1).adjoint() * P(1, 2).adjoint();
  // term 2: db+ d+ dd db
  Eigen::MatrixXcd t2 = Q(2, 2).adjoint() * P(2, 3).adjoint() * P(2, 3) * Q(2, 2);
  // term 3: db+ dd d+ db : db:(2,2)->(2,3), d+:(2,3)->(1,3), dd:(1,3)->(2,3), db+:(2,3)->(2,2)
  Eigen::MatrixXcd t3 = Q(2, 2).adjoint() * P(1, 3) * P(1, 3).adjoint() * Q(2, 2);
  // term 4: d+ db db+ dd : dd:(2,2)->(3,2), db+:(3,2)<-(3,... db+:(3,2)->(3,1)? no:
  // db+ on (3,2) -> (3,1), db back to (3,2), d+ -> (2,2)
  Eigen::MatrixXcd t4 = P(2, 2).adjoint() * Q(3, 1) * Q(3, 1).adjoint() * P(2, 2);
  // term 5: db+ db ; term 6: d+ dd
  Eigen::MatrixXcd t5 = Q(2, 2).adjoint() * Q(2, 2);
  Eigen::MatrixXcd t6 = P(2, 2).adjoint() * P(2, 2);
  return t1 + t2 + t3 + t4 + t5 + t6;
}

const KSCache& ks_cache(const GridSpec& g) {
  static std::mutex mu;
  static std::map<std::array<int, 6>, KSCache>* cache =
      new std::map<std::array<int, 6>, KSCache>();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache->find(g.n);
  if (it != cache->end()) return it->second;
  const auto& ms = banded_modes(g);
  KSCache kc;
  kc.modes.resize(ms.flat.size());
  for (std::size_t m = 0; m < ms.flat.size(); ++m) {
    Eigen::MatrixXcd E = ks_symbol(ms.k[m]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(sv(0), 1.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    int kdim = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
      else ++kdim;
    }
    kc.modes[m].pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    kc.modes[m].kernel = svd.matrixV().rightCols(kdim);
  }
  auto [pos, ok] = cache->emplace(g.n, std::move(kc));
  return pos->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// Harmonic bases and projections

HarmonicBasis harmonic_basis(const GridSpec& g, int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("harmonic basis for p in {1,2}");
  HarmonicBasis hb;
  hb.p = hb.q = p;
  const int c = multi::count(p);
  // Reality: conj(dz^I dzbar^J) = (-1)^{p^2} dz^J dzbar^I, so the coefficient
  // matrix is anti-hermitian for p = 1 (i times hermitian) and hermitian for p = 2.
  const cplx diag = (p == 1) ? cplx(0, 1) : cplx(1, 0);
  for (int i = 0; i < c; ++i) {
    ComplexForm f(g, p, p);
    f.comp(i, i) = ScalarField::constant(g, diag);
    hb.basis.push_back(f);
  }
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j) {
      ComplexForm u(g, p, p), v(g, p, p);
      u.comp(i, j) = ScalarField::constant(g, diag);
      u.comp(j, i) = ScalarField::constant(g, diag);
      v.comp(i, j) = ScalarField::constant(g, diag * cplx(0, 1));
      v.comp(j, i) = ScalarField::constant(g, diag * cplx(0, -1));
      hb.basis.push_back(u);
      hb.basis.push_back(v);
    }
  // verify reality and harmonicity, then build the Gram matrix
  HermitianMetric flat = HermitianMetric::flat(g);
  const int n = static_cast<int>(hb.basis.size());
  hb.gram.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (reality_defect(hb.basis[i]) > 1e-12)
      throw std::logic_error("harmonic basis element is not real");
    for (int j = 0; j < n; ++j)
      hb.gram(i, j) = inner(flat, hb.basis[i], hb.basis[j]).real();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(hb.gram);
  if (llt.info() != Eigen::Success)
    throw std::logic_error("harmonic Gram matrix is not positive-definite");
  return hb;
}

std::vector<double> class_coefficients(const HarmonicBasis& basis, const ComplexForm& a) {
  HermitianMetric flat = HermitianMetric::flat(a.grid());
  const int n = static_cast<int>(basis.basis.size());
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = inner(flat, a, basis.basis[i]).real();
  Eigen::VectorXd c = basis.gram.ldlt().solve(rhs);
  return std::vector<double>(c.data(), c.data() + n);
}

ComplexForm harmonic_combination(const HarmonicBasis& basis, const std::vector<double>& c) {
  if (c.size() != basis.basis.size()) throw std::invalid_argument("coefficient count");
  ComplexForm out(basis.basis[0].grid(), basis.p, basis.q);
  for (std::size_t i = 0; i < c.size(); ++i) out += basis.basis[i] * cplx(c[i]);
  return out;
}

ComplexForm harmonic_projection(const ComplexForm& a) {
  ComplexForm out(a.grid(), a.p(), a.q());
  for (int i = 0; i < a.n_components(); ++i)
    out.comp_flat(i) = ScalarField::constant(a.grid(), a.comp_flat(i).mean());
  return out;
}

double harmonic_fraction(const ComplexForm& a) {
  const double n = a.norm_coeff();
  return n > 0 ? harmonic_projection(a).norm_coeff() / n : 0.0;
}

std::vector<EndField> harmonic_end01(const GaugeConnection& conn, bool trace_free) {
  const GridSpec& g = conn.calA.grid();
  const int r = conn.rank;
  // candidate space: constant matrices (x) dzbar^b
  std::vector<EndField> cand;
  std::vector<std::pair<int, int>> mat_idx;
  // matrix basis: elementary (orthonormal under Tr(AB^dagger))
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) mat_idx.push_back({i, j});
  for (int b = 0; b < 3; ++b)
    for (auto [i, j] : mat_idx) {
      EndField e(g, r, 0, 1);
      e.entry(i, j).comp(0, b) = ScalarField::constant(g, 1.0);
      cand.push_back(e);
    }
  const int N = static_cast<int>(cand.size());
  // Dbar into constant (0,2)s and Dbar^dagger via the pairing adjoint
  auto pack02 = [&](const EndField& f) {
    Eigen::VectorXcd v(3 * r * r);
    int t = 0;
    for (int cmp = 0; cmp < 3; ++cmp)
      for (auto [i, j] : mat_idx) v(t++) = f.entry(i, j).comp_flat(cmp).mean();
    return v;
  };
  Eigen::MatrixXcd M1(3 * r * r, N);  // Dbar on candidates
  for (int c = 0; c < N; ++c)
    M1.col(c) = pack02(covariant_derivative(conn, cand[c], Cov::kDbar));
  // Dbar from (0,0) constants
  std::vector<EndField> cand0;
  for (auto [i, j] : mat_idx) {
    EndField e(g, r, 0, 0);
    e.entry(i, j).comp_flat(0) = ScalarField::constant(g, 1.0);
    cand0.push_back(e);
  }
  Eigen::MatrixXcd D0(N, r * r);
  for (int c = 0; c < r * r; ++c) {
    EndField db = covariant_derivative(conn, cand0[c], Cov::kDbar);
    Eigen::VectorXcd v(N);
    int t = 0;
    for (int b = 0; b < 3; ++b)
      for (auto [i, j] : mat_idx) v(t++) = db.entry(i, j).comp(0, b).mean();
    D0.col(c) = v;
  }
  // Laplacian on the candidate space: M1^H M1 + D0 D0^H (orthonormal bases)
  Eigen::MatrixXcd L = M1.adjoint() * M1 + D0 * D0.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(L);
  int kdim = 0;
  for (int c = 0; c < N; ++c)
    if (es.eigenvalues()(c) <= 1e-10) ++kdim;
  Eigen::MatrixXcd K = es.eigenvectors().leftCols(kdim);
  if (trace_free) {
    // project the kernel subspace onto trace-free matrix parts (the split is
    // Delta-invariant for constant backgrounds) and re-orthonormalize
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(N, N);
    for (int b = 0; b < 3; ++b)
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
          P(b * r * r + i * r + i, b * r * r + j * r + j) -=
              cplx(1.0 / static_cast<double>(r));
    Eigen::MatrixXcd PK = P * K;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(PK, Eigen::ComputeThinU);
    int rank = 0;
    for (int c = 0; c < svd.singularValues().size(); ++c)
      if (svd.singularValues()(c) > 1e-8) ++rank;
    K = svd.matrixU().leftCols(rank);
  }
  std::vector<EndField> out;
  for (int c = 0; c < K.cols(); ++c) {
    EndField h(g, r, 0, 1);
    for (int t = 0; t < N; ++t) {
      const cplx w = K(t, c);
      if (std::abs(w) < 1e-15) continue;
      const int b = t / (r * r);
      const int ij = t % (r * r);
      h.entry(ij / r, ij % r).comp(0, b) += ScalarField::constant(g, w);
    }
    const double res = covariant_derivative(conn, h, Cov::kDbar).norm_coeff();
    if (res > 1e-10 * std::max(1.0, h.norm_coeff()))
      throw std::logic_error("harmonic_end01: candidate fails the Dbar residual");
    out.push_back(h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hodge decomposition

namespace {
double flat_laplacian_multiplier(const std::array<int, 6>& k) {
  double s = 0.0;
  for (int a = 0; a < 6; ++a) s += static_cast<double>(k[a]) * k[a];
  return 2.0 * kPi * kPi * s;
}

void assert_flat_metric(const HermitianMetric& m) {
  if (!m.is_constant())
    throw std::invalid_argument("operation supports only the flat background metric");
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const cplx want = (a == b) ? cplx(1.0) : cplx(0.0);
      if (std::abs(m.g(a, b).mean() - want) > 1e-12)
        throw std::invalid_argument("operation supports only the flat background metric");
    }
}
}  // namespace

HodgeParts hodge_decompose(const HermitianMetric& m, const ComplexForm& a) {
  assert_flat_metric(m);
  const GridSpec& g = a.grid();
  HodgeParts out;
  out.harmonic = PolyForm(harmonic_projection(a));
  // X = Delta^{-1}(a - harm a): componentwise multiplier on the flat torus
  ComplexForm X(g, a.p(), a.q());
  GridIndexer ix(g);
  for (int c = 0; c < a.n_components(); ++c) {
    const auto& spec = a.comp_flat(c).spectrum();
    std::vector<cplx> xs(spec.size(), cplx(0.0));
    std::array<int, 6> idx, k;
    for (std::size_t f = 0; f < spec.size(); ++f) {
      ix.decode(f, idx);
      bool zero = true;
      for (int ax = 0; ax < 6; ++ax) {
        k[ax] = g.freq(ax, idx[ax]);
        if (k[ax] != 0) zero = false;
      }
      if (zero) continue;
      xs[f] = spec[f] / flat_laplacian_multiplier(k);
    }
    X.comp_flat(c) = ScalarField::from_spectrum(g, std::move(xs));
  }
  PolyForm dX = exterior_d(X);
  PolyForm cX = codiff_d(m, X);
  out.d_exact = exterior_d(cX);
  out.d_coexact = codiff_d(m, dX);
  return out;
}

ComplexForm ddbar_potential(const ComplexForm& chi, double harmonic_tol) {
  if (chi.p() != 2 || chi.q() != 2) throw std::invalid_argument("chi must be (2,2)");
  const GridSpec& g = chi.grid();
  const double hf = harmonic_fraction(chi);
  if (hf > harmonic_tol) {
    std::ostringstream os;
    os << "ddbar_potential: harmonic component fraction " << hf
       << " obstructs ddbar-exactness";
    throw std::invalid_argument(os.str());
  }
  const auto& ms = banded_modes(g);
  ModeWorkspace ws(g, 1, 1);
  for (std::size_t m = 0; m < ms.flat.size(); ++m) {
    bool zero_mode = true;
    for (int a = 0; a < 6; ++a) zero_mode = zero_mode && (ms.k[m][a] == 0);
    if (zero_mode) continue;
    // S = i * del(1,2) * dbar(1,1)
    Eigen::MatrixXcd S = cplx(0, 1) * symbols::partial_sym(1, 2, ms.k[m]) *
                         symbols::dbar_sym(1, 1, ms.k[m]);
    Eigen::VectorXcd rhs = symbols::gather_mode(chi, ms.flat[m]);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(S);
    ws.set(ms.flat[m], cod.solve(rhs));
  }
  return ws.take();
}

// ---------------------------------------------------------------------------
// Kodaira-Spencer

ComplexForm kodaira_spencer_apply(const HermitianMetric& m, const ComplexForm& ga) {
  assert_flat_metric(m);
  if (ga.p() != 2 || ga.q() != 2) throw std::invalid_argument("E acts on (2,2)-forms");
  ComplexForm out(ga.grid(), 2, 2);
  // dd db db+ d+
  out += partial(dbar(codiff_dbar(m, codiff_del(m, ga))));
  // db+ d+ dd db
  out += codiff_dbar(m, codiff_del(m, partial(dbar(ga))));
  // db+ dd d+ db
  out += codiff_dbar(m, partial(codiff_del(m, dbar(ga))));
  // d+ db db+ dd
  out += codiff_del(m, dbar(codiff_dbar(m, partial(ga))));
  // db+ db + d+ dd
  out += codiff_dbar(m, dbar(ga));
  out += codiff_del(m, partial(ga));
  return out;
}

ComplexForm kodaira_spencer_invert(const HermitianMetric& m, const ComplexForm& rhs,
                                   double rel_tol, int max_iter, double kernel_tol) {
  assert_flat_metric(m);
  if (rhs.p() != 2 || rhs.q() != 2) throw std::invalid_argument("E acts on (2,2)-forms");
  const GridSpec& g = rhs.grid();
  const auto& ms = banded_modes(g);
  const KSCache& kc = ks_cache(g);

  // kernel-orthogonality check and projection of the right side
  double kernel_mass = 0.0;
  double total_mass = 0.0;
  ModeWorkspace pr(g, 2, 2);
  for (std::size_t mm = 0; mm < ms.flat.size(); ++mm) {
    Eigen::VectorXcd v = symbols::gather_mode(rhs, ms.flat[mm]);
    total_mass += v.squaredNorm();
    const auto& K = kc.modes[mm].kernel;
    if (K.cols() > 0) {
      Eigen::VectorXcd kpart = K * (K.adjoint() * v);
      kernel_mass += kpart.squaredNorm();
      v -= kpart;
    }
    pr.set(ms.flat[mm], v);
  }
  if (total_mass > 0 && std::sqrt(kernel_mass / total_mass) > kernel_tol) {
    std::ostringstream os;
    os << "kodaira_spencer_invert: right side has kernel fraction "
       << std::sqrt(kernel_mass / total_mass);
    throw std::invalid_argument(os.str());
  }
  ComplexForm b = pr.take();

  auto precond = [&](const ComplexForm& x) {
    ModeWorkspace w(g, 2, 2);
    for (std::size_t mm = 0; mm < ms.flat.size(); ++mm)
      w.set(ms.flat[mm], kc.modes[mm].pinv * symbols::gather_mode(x, ms.flat[mm]));
    ComplexForm out = w.take();
    return out;
  };
  auto dot = [&](const ComplexForm& x, const ComplexForm& y) {
    cplx s(0.0);
    for (int c = 0; c < x.n_components(); ++c) {
      const auto& xs = x.comp_flat(c).spectrum();
      const auto& ys = y.comp_flat(c).spectrum();
      for (std::size_t i = 0; i < xs.size(); ++i) s += xs[i] * std::conj(ys[i]);
    }
    return s;
  };

  // preconditioned CG on the self-adjoint PSD operator restricted to (ker)^perp
  const double bnorm = b.norm_coeff();
  ComplexForm x(g, 2, 2);
  if (bnorm == 0.0) return x;
  ComplexForm r = b;
  ComplexForm z = precond(r);
  ComplexForm p = z;
  cplx rz = dot(r, z);
  if (max_iter <= 0) max_iter = 10 * static_cast<int>(ms.flat.size());
  for (int it = 0; it < max_iter; ++it) {
    ComplexForm Ap = kodaira_spencer_apply(m, p);
    const cplx pAp = dot(p, Ap);
    const cplx alpha = rz / pAp;
    x += p * alpha;
    r -= Ap * alpha;
    if (r.norm_coeff() <= rel_tol * bnorm) break;
    ComplexForm z2 = precond(r);
    const cplx rz2 = dot(r, z2);
    const cplx beta = rz2 / rz;
    p = z2 + p * beta;
    z = z2;
    rz = rz2;
  }
  if ((kodaira_spencer_apply(m, x) - b).norm_coeff() > 1e3 * rel_tol * bnorm)
    throw std::runtime_error("kodaira_spencer_invert: CG stagnated");
  return x;
}

ComplexForm r2_from_difference(const HermitianMetric& m, const ComplexForm& diff22,
                               double harmonic_tol) {
  const double hf = harmonic_fraction(diff22);
  if (hf > harmonic_tol) {
    std::ostringstream os;
    os << "r2: curvature-trace difference has harmonic fraction " << hf;
    throw std::invalid_argument(os.str());
  }
  if (diff22.norm_coeff() == 0.0) return ComplexForm(diff22.grid(), 1, 1);
  ComplexForm ga = kodaira_spencer_invert(m, diff22);
  ComplexForm r2 = codiff_dbar(m, codiff_del(m, ga)) * cplx(0, -1.0);
  ComplexForm re = real_part_form(r2);
  return re;
}

ComplexForm r2_secondary(const GaugeConnection& tilde, const GaugeConnection& base,
                         const HermitianMetric& m) {
  ComplexForm diff = trace_FF_22(curvature(tilde)) - trace_FF_22(curvature(base));
  return r2_from_difference(m, diff);
}

}  // namespace hetsys
