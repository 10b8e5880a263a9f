#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hetsys/forms.hpp"
#include "oracles.hpp"

using namespace hetsys;

namespace {

ComplexForm random_form(const GridSpec& g, int p, int q, std::uint64_t seed,
                        int max_mode = 1) {
  ComplexForm f(g, p, q);
  for (int i = 0; i < f.n_components(); ++i)
    f.comp_flat(i) = random_bandlimited(g, max_mode, seed * 101 + i, false);
  return f;
}

ComplexForm basis_dz(const GridSpec& g, int a) {
  ComplexForm f(g, 1, 0);
  f.comp(a, 0) = ScalarField::constant(g, 1.0);
  return f;
}

ComplexForm flat_omega(const GridSpec& g) {
  ComplexForm f(g, 1, 1);
  for (int a = 0; a < 3; ++a) f.comp(a, a) = ScalarField::constant(g, cplx(0, 1));
  return f;
}

double rel(double d, double s) { return s > 0 ? d / s : d; }

}  // namespace

TEST_CASE("wedge antisymmetry dz^a ^ dz^a = 0") {
  GridSpec g(4);
  ComplexForm dz0 = basis_dz(g, 0);
  CHECK(wedge(dz0, dz0).norm_coeff() < 1e-15);

  ComplexForm a = random_form(g, 1, 0, 3);
  ComplexForm b = random_form(g, 0, 1, 4);
  // a^b = (-1)^{deg a deg b} b^a
  ComplexForm ab = wedge(a, b);
  ComplexForm ba = wedge(b, a);
  CHECK(rel((ab + ba).norm_coeff(), ab.norm_coeff()) < 1e-13);
}

TEST_CASE("flat volume normalization and determinant oracle") {
  GridSpec g(4);
  ComplexForm om = flat_omega(g);
  ComplexForm w3 = wedge(wedge(om, om), om) * cplx(1.0 / 6.0);
  CHECK(std::abs(integrate_top(w3) - cplx(1.0)) < 1e-13);

  // Varying hermitian metric: (3,3) coefficient of omega^3/3! is i*det(g).
  ComplexForm omv(g, 1, 1);
  std::array<std::array<ScalarField, 3>, 3> gm;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      ScalarField re = random_bandlimited(g, 1, 7 + 3 * a + b, true) * 0.1;
      if (a == b) re += ScalarField::constant(g, 1.0);
      ScalarField im = (a == b) ? ScalarField(g)
                                : random_bandlimited(g, 1, 40 + 3 * a + b, true) * 0.1;
      gm[a][b] = re + im * cplx(0, 1);
    }
  // hermitize
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      gm[b][a] = gm[a][b].conj();
      omv.comp(a, b) = gm[a][b] * cplx(0, 1);
      omv.comp(b, a) = gm[b][a] * cplx(0, 1);
    }
  GridSpec gr = g; gr.dealias_products = false;  // oracle needs exact products
  ComplexForm omr(gr, 1, 1);
  std::array<std::array<ScalarField, 3>, 3> gmr;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      gmr[a][b] = ScalarField::from_values(gr, gm[a][b].values());
      omr.comp(a, b) = gmr[a][b] * cplx(0, 1);
    }
  ComplexForm w3v = wedge(wedge(omr, omr), omr) * cplx(1.0 / 6.0);
  ScalarField det = oracle::det3(gmr);
  CHECK(rel((w3v.comp(0, 0) - det * cplx(0, 1)).norm(), det.norm()) < 1e-12);
}

TEST_CASE("random wedge against the naive exterior-algebra oracle") {
  GridSpec g(4);
  g.dealias_products = false;
  SUBCASE("(1,1) ^ (2,2)") {
    ComplexForm a = random_form(g, 1, 1, 21);
    ComplexForm b = random_form(g, 2, 2, 22);
    ComplexForm w = wedge(a, b);
    auto na = oracle::NaiveForm::from_complex_form(a);
    auto nb = oracle::NaiveForm::from_complex_form(b);
    auto nw = na.wedge_with(nb);
    CHECK(rel(nw.diff_norm(w), w.norm_coeff()) < 1e-12);
  }
  SUBCASE("(2,1) ^ (1,2)") {
    ComplexForm a = random_form(g, 2, 1, 31);
    ComplexForm b = random_form(g, 1, 2, 32);
    ComplexForm w = wedge(a, b);
    auto nw = oracle::NaiveForm::from_complex_form(a).wedge_with(
        oracle::NaiveForm::from_complex_form(b));
    CHECK(rel(nw.diff_norm(w), w.norm_coeff()) < 1e-12);
  }
  SUBCASE("(1,0) ^ (1,1)") {
    ComplexForm a = random_form(g, 1, 0, 41);
    ComplexForm b = random_form(g, 1, 1, 42);
    ComplexForm w = wedge(a, b);
    auto nw = oracle::NaiveForm::from_complex_form(a).wedge_with(
        oracle::NaiveForm::from_complex_form(b));
    CHECK(rel(nw.diff_norm(w), w.norm_coeff()) < 1e-12);
  }
}

TEST_CASE("dolbeault operators") {
  GridSpec g(6);

  SUBCASE("d of a constant form vanishes") {
    ComplexForm f(g, 1, 1);
    f.comp(0, 0) = ScalarField::constant(g, 1.0);
    CHECK(exterior_d(f).norm_coeff() < 1e-15);
  }

  SUBCASE("del^2 = dbar^2 = 0 and del dbar = -dbar del") {
    for (auto [p, q] : {std::pair{0, 0}, {1, 0}, {1, 1}, {0, 2}}) {
      ComplexForm f = random_form(g, p, q, 50 + 10 * p + q, 2);
      if (p + 2 <= 3) CHECK(partial(partial(f)).norm_coeff() <
                            1e-11 * std::max(1.0, f.norm_coeff()));
      if (q + 2 <= 3) CHECK(dbar(dbar(f)).norm_coeff() <
                            1e-11 * std::max(1.0, f.norm_coeff()));
      if (p + 1 <= 3 && q + 1 <= 3) {
        ComplexForm pd = partial(dbar(f));
        ComplexForm dp = dbar(partial(f));
        CHECK(rel((pd + dp).norm_coeff(), pd.norm_coeff()) < 1e-11);
      }
    }
  }

  SUBCASE("Leibniz rule for d against wedge") {
    ComplexForm a = random_form(g, 1, 0, 61, 1);
    ComplexForm b = random_form(g, 1, 1, 62, 1);
    PolyForm lhs = exterior_d(wedge(a, b));
    PolyForm rhs = wedge(exterior_d(a), PolyForm(b)) +
                   wedge(PolyForm(a), exterior_d(b)) * cplx(-1.0);
    CHECK(rel((lhs - rhs).norm_coeff(), lhs.norm_coeff()) < 1e-11);
  }

  SUBCASE("Stokes: integral of d(5-form) vanishes") {
    ComplexForm a32 = random_form(g, 3, 2, 71, 2);
    ComplexForm a23 = random_form(g, 2, 3, 72, 2);
    PolyForm d5 = exterior_d(a32) + exterior_d(a23);
    cplx total(0.0);
    for (const auto& [k, f] : d5.parts())
      if (k.first == 3 && k.second == 3) total += integrate_top(f);
    CHECK(std::abs(total) < 1e-11);
  }
}

TEST_CASE("conjugation") {
  GridSpec g(4);
  SUBCASE("i dz^0 ^ dzbar^0 is real") {
    ComplexForm f(g, 1, 1);
    f.comp(0, 0) = ScalarField::constant(g, cplx(0, 1));
    CHECK((conjugate(f) - f).norm_coeff() < 1e-15);
  }
  SUBCASE("conj dz^0 = dzbar^0") {
    ComplexForm f = basis_dz(g, 0);
    ComplexForm c = conjugate(f);
    CHECK(c.p() == 0);
    CHECK(c.q() == 1);
    CHECK((c.comp(0, 0) - ScalarField::constant(g, 1.0)).norm() < 1e-15);
  }
  SUBCASE("involution on random forms") {
    ComplexForm f = random_form(g, 2, 1, 81);
    CHECK(rel((conjugate(conjugate(f)) - f).norm_coeff(), f.norm_coeff()) < 1e-14);
  }
  SUBCASE("i del dbar of a real function is a real (1,1)-form") {
    ScalarField phi = random_bandlimited(g, 1, 91, true);
    ComplexForm f(g, 0, 0);
    f.comp(0, 0) = phi;
    ComplexForm ddb = partial(dbar(f)) * cplx(0, 1);
    CHECK(reality_defect(ddb) < 1e-12);
  }
}
