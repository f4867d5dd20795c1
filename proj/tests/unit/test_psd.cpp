#include "doctest.h"
#include "random_instances.hpp"
#include "smoothsketch/errors.hpp"
#include "smoothsketch/psd.hpp"

using namespace smoothsketch;

namespace {

Mat m2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("identity factorization") {
  const auto l = SmoothnessMatrix::from_dense(Mat::Identity(2, 2));
  CHECK(l.lambda_max() == doctest::Approx(1.0));
  CHECK(l.rank() == 2);
  CHECK((l.sqrt() - Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK((l.pinv_sqrt() - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("diag(4,0) has a zero block in the pseudo-inverse") {
  for (bool diag_path : {true, false}) {
    const auto l = diag_path ? SmoothnessMatrix::from_diagonal(testkit::vec({4.0, 0.0}))
                             : SmoothnessMatrix::from_dense(m2(4, 0, 0, 0) + Mat::Zero(2, 2));
    CHECK(l.lambda_max() == doctest::Approx(4.0));
    CHECK(l.rank() == 1);
    CHECK((l.sqrt() - m2(2, 0, 0, 0)).norm() < 1e-14);
    CHECK((l.pinv_sqrt() - m2(0.5, 0, 0, 0)).norm() < 1e-14);
  }
}

TEST_CASE("2x2 eigenvalues from the characteristic polynomial") {
  // det([[2-t,1],[1,2-t]]) = (2-t)^2 - 1 = 0 gives t = 3, 1.
  const auto l = SmoothnessMatrix::from_dense(m2(2, 1, 1, 2));
  REQUIRE(l.eigenvalues().size() == 2);
  CHECK(l.eigenvalues()(0) == doctest::Approx(3.0));
  CHECK(l.eigenvalues()(1) == doctest::Approx(1.0));
  CHECK(l.lambda_max() == doctest::Approx(3.0));
}

TEST_CASE("zero matrix") {
  const auto l = SmoothnessMatrix::from_dense(Mat::Zero(3, 3));
  CHECK(l.lambda_max() == 0.0);
  CHECK(l.rank() == 0);
  CHECK(l.pinv_sqrt().norm() == 0.0);
}

TEST_CASE("pseudo-inverse of the all-ones matrix") {
  // [[1,1],[1,1]] = 2 u u^T with u = (1,1)/sqrt(2); its pseudo-inverse is u u^T / 2.
  const auto l = SmoothnessMatrix::from_dense(m2(1, 1, 1, 1));
  CHECK((l.pinv() - m2(1, 1, 1, 1) / 4.0).norm() < 1e-12);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(SmoothnessMatrix::from_dense(m2(1, 0.5, 0.4, 1)), NotSymmetric);
  CHECK_THROWS_AS(SmoothnessMatrix::from_dense(m2(1, 0, 0, -1)), NotPSD);
  CHECK_THROWS_AS(SmoothnessMatrix::from_dense(Mat::Zero(2, 3)), Error);
}

TEST_CASE("hadamard") {
  const Mat b = m2(2, 5, 5, 3);
  CHECK((hadamard(Mat::Identity(2, 2), b) - m2(2, 0, 0, 3)).norm() == 0.0);
  CHECK((hadamard(Mat::Ones(2, 2), b) - b).norm() == 0.0);
  CHECK((hadamard(m2(0, 1, 1, 0), b) - m2(0, 5, 5, 0)).norm() == 0.0);
  CHECK_THROWS_AS(hadamard(Mat::Ones(2, 2), Mat::Ones(3, 3)), DimMismatch);
}

TEST_CASE("lambda_max_of") {
  CHECK(lambda_max_of(testkit::vec({1, 7, 3}).asDiagonal().toDenseMatrix()) == doctest::Approx(7.0));
  CHECK(lambda_max_of(Mat::Zero(3, 3)) == 0.0);
  CHECK(lambda_max_of(m2(2, 1, 1, 2)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(lambda_max_of(m2(1, 2, 0, 1)), NotSymmetric);
}

TEST_CASE("projection onto the range") {
  const auto l = SmoothnessMatrix::from_diagonal(testkit::vec({1.0, 0.0}));
  const Vec p = l.project_onto_range(testkit::vec({3.0, 5.0}));
  CHECK(p(0) == doctest::Approx(3.0));
  CHECK(p(1) == doctest::Approx(0.0));

  const auto full = SmoothnessMatrix::from_dense(m2(2, 1, 1, 2));
  const Vec v = testkit::vec({-1.5, 4.0});
  CHECK((full.project_onto_range(v) - v).norm() < 1e-14);

  const auto rank1 = SmoothnessMatrix::from_dense(m2(1, 1, 1, 1) / 2.0);
  CHECK(rank1.project_onto_range(testkit::vec({1.0, -1.0})).norm() < 1e-14);
  CHECK(rank1.distance_to_range(testkit::vec({1.0, -1.0})) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("random low-rank matrices: factorization identities") {
  Stream rng(11);
  for (int t = 0; t < 30; ++t) {
    const int d = testkit::uniform_int(2, 8, rng);
    const int r = testkit::uniform_int(1, d, rng);
    const Mat a = testkit::random_psd(d, r, rng);
    const auto l = SmoothnessMatrix::from_dense(a);
    CHECK(l.rank() == r);
    const double tol = 1e-9 * (1.0 + l.lambda_max());
    CHECK((l.sqrt() * l.sqrt() - a).norm() <= tol);

    // L^{1/2} L^{dagger 1/2} is the identity on range(L).
    const Vec v = l.apply_sqrt(testkit::normal_vec(d, rng));
    CHECK((l.apply_sqrt(l.apply_pinv_sqrt(v)) - v).norm() <= 1e-9 * (1.0 + v.norm()));

    // 0 <= L^{1/2} L^dagger L^{1/2} <= I.
    const Mat m = l.sqrt() * l.pinv() * l.sqrt();
    const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-9);

    // Projection is idempotent and the pinv norm matches the dense formula.
    const Vec w = testkit::normal_vec(d, rng);
    const Vec pw = l.project_onto_range(w);
    CHECK((l.project_onto_range(pw) - pw).norm() <= 1e-12 * (1.0 + w.norm()));
    CHECK(l.pinv_norm_sq(pw) == doctest::Approx(pw.dot(l.pinv() * pw)).epsilon(1e-9));

    // Row and column helpers agree with the dense factors.
    const int j = testkit::uniform_int(0, d - 1, rng);
    CHECK(l.pinv_sqrt_row_dot(j, w) == doctest::Approx(l.pinv_sqrt().row(j).dot(w)).epsilon(1e-12));
    Vec acc = Vec::Zero(d);
    l.add_sqrt_column(j, 2.5, acc);
    CHECK((acc - 2.5 * l.sqrt().col(j)).norm() < 1e-12 * (1.0 + acc.norm()));
  }
}

TEST_CASE("Schur product of PSD matrices is PSD") {
  Stream rng(12);
  for (int t = 0; t < 30; ++t) {
    const int d = testkit::uniform_int(2, 7, rng);
    const Mat a = testkit::random_psd(d, testkit::uniform_int(1, d, rng), rng);
    const Mat b = testkit::random_psd(d, testkit::uniform_int(1, d, rng), rng);
    CHECK(lambda_min_of(hadamard(a, b)) >= -1e-10 * (1.0 + lambda_max_of(a) * lambda_max_of(b)));
  }
}

TEST_CASE("diagonal fast path matches the dense path") {
  const Vec diag = testkit::vec({3.0, 0.5, 0.0, 2.0});
  const auto fast = SmoothnessMatrix::from_diagonal(diag);
  const auto dense_input = SmoothnessMatrix::from_dense(Mat(diag.asDiagonal()));
  CHECK(fast.is_diagonal());
  CHECK(dense_input.is_diagonal());
  CHECK(fast.rank() == 3);
  const Vec v = testkit::vec({1.0, -2.0, 0.7, 4.0});
  CHECK((fast.apply_sqrt(v) - fast.sqrt() * v).norm() < 1e-14);
  CHECK((fast.apply_pinv_sqrt(v) - fast.pinv_sqrt() * v).norm() < 1e-14);
  CHECK((fast.apply(v) - Mat(diag.asDiagonal()) * v).norm() < 1e-14);
  CHECK(fast.lambda_max() == 3.0);
}
