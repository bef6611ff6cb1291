#include "support.hpp"

#include "../oracles/face_enumeration.hpp"
#include "specflow/minsub.hpp"

#include <doctest.h>

using namespace specflow;
using testkit::vec;

namespace {

/// A random q with the fixed signs of the pattern and uniform free entries.
Vector random_face_certificate(const SignPattern& pat, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector q(pat.size());
  for (Index i = 0; i < pat.size(); ++i) {
    const signed char s = pat.sign[std::size_t(i)];
    q(i) = s != 0 ? double(s) : d(rng);
  }
  return q;
}

}  // namespace

TEST_SUITE("minsub") {

TEST_CASE("sign pattern uses the relative threshold") {
  const SignPattern p = sign_pattern(tv1d(4), vec({1, 1, -1, -1}));
  CHECK(p.sign == std::vector<signed char>{0, -1, 0});
  CHECK(p.free_count() == 2);
  const SignPattern q = sign_pattern(l1(3), vec({1e-12, -2, 3}));
  CHECK(q.sign == std::vector<signed char>{0, -1, 1});
  const SignPattern r = sign_pattern(linf(3), vec({2, -2 + 1e-12, 1}));
  CHECK(r.sign == std::vector<signed char>{1, -1, 0});
}

TEST_CASE("min_norm_subgradient fixtures") {
  const Subgradient a = min_norm_subgradient(tv1d(4), vec({1, 1, -1, -1}));
  CHECK(testkit::max_abs_diff(a.p, vec({0.5, 0.5, -0.5, -0.5})) <= 1e-12);
  CHECK(testkit::max_abs_diff(a.q, vec({-0.5, -1, -0.5})) <= 1e-12);

  const Subgradient b = min_norm_subgradient(l1(3), vec({2, -1, 0}));
  CHECK(testkit::max_abs_diff(b.p, vec({1, -1, 0})) <= 1e-12);

  CHECK(testkit::max_abs_diff(min_norm_subgradient(linf(2), vec({3, 1})).p, vec({1, 0})) == 0.0);
  CHECK(testkit::max_abs_diff(min_norm_subgradient(linf(2), vec({2, 2})).p, vec({0.5, 0.5})) == 0.0);
  CHECK(testkit::max_abs_diff(min_norm_subgradient(linf(3), vec({-2, 2, 1})).p, vec({-0.5, 0.5, 0})) == 0.0);

  for (const Functional& F : testkit::builtin_family()) {
    const Vector kernel_elem = F.kernel_basis().cols() ? Vector(F.kernel_basis().col(0)) : Vector::Zero(F.dim());
    CHECK(min_norm_subgradient(F, kernel_elem).p.norm() <= 1e-12);
  }
}

TEST_CASE("is_eigenvector fixtures") {
  const Functional tv4 = tv1d(4);
  const EigenCheck a = is_eigenvector(tv4, certify(tv4, vec({0.5, 0.5, -0.5, -0.5})));
  CHECK(a.eigenvector);
  CHECK(std::abs(a.defect) <= 1e-12);

  const Functional id = l1(3);
  CHECK(is_eigenvector(id, certify(id, vec({1, -1, 0}))).eigenvector);

  const Functional tv3 = tv1d(3);
  Subgradient c{vec({-0.5, 0.5, 0}), vec({0.5, 0}), 0.0};
  const EigenCheck cc = is_eigenvector(tv3, c);
  CHECK_FALSE(cc.eigenvector);
  CHECK(cc.defect == doctest::Approx(1.0));  // Ap = (1, -1/2), so J(p) = 3/2

  Subgradient bad{vec({0.5, 0.5, -0.5, -0.5}), vec({0, 0, 0}), 0.0};
  CHECK_THROWS_AS(is_eigenvector(tv4, bad), PreconditionError);
  Subgradient missing{vec({0.5, 0.5, -0.5, -0.5}), Vector(0), 0.0};
  CHECK_THROWS_AS(is_eigenvector(tv4, missing), PreconditionError);
}

TEST_CASE("check_minsub fixtures") {
  const Functional tv4 = tv1d(4);
  const Vector u = vec({1, 1, -1, -1});
  const MinsubCheck a = check_minsub(tv4, u, min_norm_subgradient(tv4, u));
  CHECK(a.holds);
  CHECK(a.worst <= 1e-12);

  std::mt19937_64 rng(21);
  const Functional id = l1(8);
  for (int trial = 0; trial < 50; ++trial) {
    Vector v = testkit::dyadic(8, rng, 2, 1.0);
    CHECK(check_minsub(id, v, min_norm_subgradient(id, v)).holds);
  }

  // Non-dominant A = ((1,2),(0,1)) at pattern (+, free): p = (1,1), <p, q> ranges over [2, 4].
  // The infimum alone equals ||p||^2; only the supremum exposes the failure.
  Matrix b(2, 2);
  b << 1, 2, 0, 1;
  const Functional F = custom(b);
  const Vector w = vec({1, 0});
  const Subgradient sg = min_norm_subgradient(F, w);
  CHECK(testkit::max_abs_diff(sg.p, vec({1, 1})) <= 1e-12);
  const MinsubCheck c = check_minsub(F, w, sg);
  CHECK_FALSE(c.holds);
  CHECK(c.inf == doctest::Approx(2.0));
  CHECK(c.sup == doctest::Approx(4.0));
  CHECK_FALSE(is_eigenvector(F, sg).eigenvector);
}

TEST_CASE("check_minsub agrees with face vertex enumeration") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> entry(-2, 2);
  int compared = 0;
  while (compared < 100) {
    Matrix a(4, 3);
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) a(i, j) = entry(rng);
    if ((a.rowwise().norm().array() == 0.0).any()) continue;
    const Functional F = custom(a);
    const Vector u = testkit::dyadic(3, rng, 2, 1.0);
    const Subgradient sg = min_norm_subgradient(F, u);
    const MinsubCheck mc = check_minsub(F, u, sg);
    const oracle::FaceExtremes ex = oracle::face_vertex_extremes(a, sign_pattern(F, u).sign, sg.p);
    CHECK(mc.inf == doctest::Approx(ex.inf).epsilon(1e-12).scale(1.0));
    CHECK(mc.sup == doctest::Approx(ex.sup).epsilon(1e-12).scale(1.0));
    ++compared;
  }
}

TEST_CASE("QP optimum matches exhaustive face minimization") {
  std::mt19937_64 rng(23);
  for (Index n = 2; n <= 6; ++n) {
    const Functional F = tv1d(n);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector u = testkit::dyadic(n, rng, 2, 1.0);
      const SignPattern pat = sign_pattern(F, u);
      const Subgradient sg = min_norm_for_pattern(F, pat);
      const Vector ref = oracle::face_min_norm(F.op(), pat.sign);
      CHECK(testkit::max_abs_diff(sg.p, ref) <= 1e-9);
    }
  }
}

TEST_CASE("minimality, scale invariance and kernel orthogonality") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (const Functional& F : testkit::builtin_family()) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector u = testkit::dyadic(F.dim(), rng, 3, 1.0);
      const Subgradient sg = min_norm_subgradient(F, u);
      const double c = scale(rng);
      CHECK(testkit::max_abs_diff(min_norm_subgradient(F, c * u).p, sg.p) <= 1e-8);
      const Matrix& k = F.kernel_basis();
      for (Index j = 0; j < k.cols(); ++j) CHECK(std::abs(sg.p.dot(k.col(j))) <= 1e-10);
      if (F.is_linf()) continue;
      const SignPattern pat = sign_pattern(F, u);
      for (int s = 0; s < 20; ++s) {
        const Vector q = random_face_certificate(pat, rng);
        CHECK(sg.p.norm() <= F.apply_adjoint(q).norm() + 1e-8);
      }
    }
  }
}

TEST_CASE("an eigenvector subgradient is the QP optimum") {
  std::mt19937_64 rng(25);
  for (const Functional& F : testkit::builtin_family()) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector u = testkit::gaussian(F.dim(), rng);
      const Subgradient sg = min_norm_subgradient(F, u);
      if (!is_eigenvector(F, sg).eigenvector || F.is_linf()) continue;
      const Vector ref = F.dim() <= 6 ? oracle::face_min_norm(F.op(), sign_pattern(F, u).sign) : sg.p;
      CHECK(sg.p.norm() <= ref.norm() + 1e-10);
      // Every face certificate is at least as long.
      const SignPattern pat = sign_pattern(F, u);
      for (int s = 0; s < 10; ++s)
        CHECK(sg.p.norm() <= F.apply_adjoint(random_face_certificate(pat, rng)).norm() + 1e-10);
    }
  }
}

TEST_CASE("eigenvalue_of fixtures") {
  const Eigenvalue a = eigenvalue_of(tv1d(4), vec({1, 1, -1, -1}));
  CHECK(a.lambda == doctest::Approx(0.5));
  CHECK(a.certified);
  const Eigenvalue b = eigenvalue_of(linf(2), vec({1, 1}));
  CHECK(b.lambda == doctest::Approx(0.5));
  CHECK(b.certified);
  const Eigenvalue c = eigenvalue_of(l1(2), vec({1, 2}));
  CHECK(c.lambda == doctest::Approx(0.6));
  CHECK_FALSE(c.certified);
  CHECK_THROWS_AS(eigenvalue_of(l1(2), Vector::Zero(2)), PreconditionError);
}

}  // TEST_SUITE
