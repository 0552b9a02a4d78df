#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <coadjoint/linalg.hpp>

using namespace coadjoint;

namespace {

Mat hat3(double x, double y, double z) {
    Mat m(3, 3);
    m(0, 1) = -z; m(0, 2) = y;
    m(1, 0) = z;  m(1, 2) = -x;
    m(2, 0) = -y; m(2, 1) = x;
    return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s = std::max(s, std::abs(a(i, j) - b(i, j)));
    return s;
}

// Deterministic pseudo-random doubles in [-1, 1] for test fixtures.
double unit(int k) {
    double x = std::sin(12.9898 * (k + 1)) * 43758.5453123;
    return 2.0 * (x - std::floor(x)) - 1.0;
}

}  // namespace

TEST_CASE("vector helpers") {
    Vec a{1.0, 2.0, 3.0};
    Vec b{-1.0, 0.5, 2.0};
    REQUIRE(dot(a, b) == 6.0);
    REQUIRE(norm_inf(b) == 2.0);
    REQUIRE(norm2(Vec{3.0, 4.0}) == 5.0);
    REQUIRE_THROWS_AS(dot(a, Vec{1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(added(a, Vec{1.0}), std::invalid_argument);

    Vec y = a;
    axpy(2.0, b, y);
    REQUIRE(y[0] == -1.0);
    REQUIRE(y[1] == 3.0);
    REQUIRE(y[2] == 7.0);

    REQUIRE(all_finite(a));
    REQUIRE_FALSE(all_finite(Vec{1.0, std::nan("")}));
    REQUIRE_FALSE(all_finite(Vec{1.0, INFINITY}));

    Vec s = scaled(a, -2.0);
    REQUIRE(s[2] == -6.0);
}

TEST_CASE("matrix arithmetic") {
    Mat a(2, 3);
    a(0, 0) = 1.0; a(0, 1) = 2.0; a(0, 2) = 3.0;
    a(1, 0) = -4.0; a(1, 1) = 5.0; a(1, 2) = -6.0;

    Mat t = a.transposed();
    REQUIRE(t.rows() == 3);
    REQUIRE(t.cols() == 2);
    REQUIRE(t(2, 1) == -6.0);

    // one_norm is the max column sum
    REQUIRE(a.one_norm() == 9.0);
    REQUIRE(a.max_abs() == 6.0);

    Vec x{1.0, 1.0, 1.0};
    Vec ax = a * x;
    REQUIRE(ax[0] == 6.0);
    REQUIRE(ax[1] == -5.0);

    Mat i2 = Mat::identity(2);
    Mat prod = i2 * a;
    REQUIRE(max_abs_diff(prod, a) == 0.0);

    REQUIRE_THROWS_AS(a + Mat(3, 3), std::invalid_argument);
}

TEST_CASE("matrix_exp closed forms") {
    SECTION("diagonal") {
        Mat d(3, 3);
        d(0, 0) = 0.3; d(1, 1) = -1.7; d(2, 2) = 4.0;
        Mat e = matrix_exp(d);
        REQUIRE(std::abs(e(0, 0) - std::exp(0.3)) < 1e-14);
        REQUIRE(std::abs(e(1, 1) - std::exp(-1.7)) < 1e-14);
        REQUIRE(std::abs(e(2, 2) - std::exp(4.0)) < 1e-14 * std::exp(4.0));
        REQUIRE(std::abs(e(0, 1)) == 0.0);
    }

    SECTION("planar rotation") {
        const double th = 1.234;
        Mat a(2, 2);
        a(0, 1) = -th;
        a(1, 0) = th;
        Mat e = matrix_exp(a);
        REQUIRE(std::abs(e(0, 0) - std::cos(th)) < 1e-14);
        REQUIRE(std::abs(e(0, 1) + std::sin(th)) < 1e-14);
        REQUIRE(std::abs(e(1, 0) - std::sin(th)) < 1e-14);
    }

    SECTION("Rodrigues formula for a 3x3 skew matrix") {
        const double wx = 0.3, wy = -0.5, wz = 0.7;
        const double th = std::sqrt(wx * wx + wy * wy + wz * wz);
        Mat k = hat3(wx / th, wy / th, wz / th);
        Mat expected = Mat::identity(3) + std::sin(th) * k + (1.0 - std::cos(th)) * (k * k);
        Mat e = matrix_exp(hat3(wx, wy, wz));
        REQUIRE(max_abs_diff(e, expected) < 1e-14);
    }

    SECTION("nilpotent series terminates exactly") {
        Mat n(3, 3);
        n(0, 1) = 2.0; n(0, 2) = -3.0; n(1, 2) = 5.0;
        Mat expected = Mat::identity(3) + n + 0.5 * (n * n);
        Mat e = matrix_exp(n);
        REQUIRE(max_abs_diff(e, expected) < 1e-13);
    }

    SECTION("exp(a) exp(-a) = 1") {
        Mat a(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) a(i, j) = unit(4 * i + j);
        Mat prod = matrix_exp(a) * matrix_exp(a * -1.0);
        REQUIRE(max_abs_diff(prod, Mat::identity(4)) < 1e-12);
    }

    SECTION("antisymmetric generator exponentiates to an orthogonal matrix") {
        Mat a(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) {
                a(i, j) = 2.0 * unit(6 * i + j);  // scale pushes into the squaring branch
                a(j, i) = -a(i, j);
            }
        Mat q = matrix_exp(a);
        REQUIRE(max_abs_diff(q.transposed() * q, Mat::identity(6)) < 1e-12);
    }

    SECTION("input validation") {
        REQUIRE_THROWS_AS(matrix_exp(Mat(2, 3)), std::invalid_argument);
        Mat bad(2, 2);
        bad(0, 0) = std::nan("");
        REQUIRE_THROWS_AS(matrix_exp(bad), std::invalid_argument);
    }
}

TEST_CASE("LU factorization") {
    SECTION("solve against a known system") {
        Mat a(3, 3);
        a(0, 0) = 2.0; a(0, 1) = 1.0; a(0, 2) = -1.0;
        a(1, 0) = -3.0; a(1, 1) = -1.0; a(1, 2) = 2.0;
        a(2, 0) = -2.0; a(2, 1) = 1.0; a(2, 2) = 2.0;
        LuFactor lu(a);
        REQUIRE_FALSE(lu.singular());
        Vec x = lu.solve(Vec{8.0, -11.0, -3.0});
        REQUIRE(std::abs(x[0] - 2.0) < 1e-13);
        REQUIRE(std::abs(x[1] - 3.0) < 1e-13);
        REQUIRE(std::abs(x[2] + 1.0) < 1e-13);
    }

    SECTION("random system round trip") {
        Mat a(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) a(i, j) = unit(37 + 6 * i + j);
        for (int i = 0; i < 6; ++i) a(i, i) += 4.0;  // keep it comfortably regular
        Vec x_true(6);
        for (int i = 0; i < 6; ++i) x_true[i] = unit(100 + i);
        Vec b = a * x_true;
        LuFactor lu(a);
        Vec x = lu.solve(b);
        for (int i = 0; i < 6; ++i) REQUIRE(std::abs(x[i] - x_true[i]) < 1e-12);
        REQUIRE(lu.pivot_ratio() > 1e-3);
    }

    SECTION("singular matrix is flagged") {
        Mat a(2, 2);
        a(0, 0) = 1.0; a(0, 1) = 2.0;
        a(1, 0) = 2.0; a(1, 1) = 4.0;
        LuFactor lu(a);
        REQUIRE(lu.singular());
        REQUIRE_THROWS_AS(lu.solve(Vec{1.0, 1.0}), std::runtime_error);
    }

    SECTION("identity has pivot ratio 1") {
        LuFactor lu(Mat::identity(5));
        REQUIRE(lu.pivot_ratio() == 1.0);
    }
}

TEST_CASE("complex matrices") {
    const Cplx i_unit(0.0, 1.0);

    SECTION("adjoint and trace") {
        CMat a(2);
        a(0, 0) = Cplx(1.0, 2.0);
        a(0, 1) = Cplx(0.0, -1.0);
        a(1, 0) = Cplx(3.0, 0.5);
        a(1, 1) = Cplx(-2.0, 1.0);
        CMat ad = a.adjoint();
        REQUIRE(ad(0, 0) == std::conj(a(0, 0)));
        REQUIRE(ad(1, 0) == std::conj(a(0, 1)));
        REQUIRE(a.trace() == Cplx(-1.0, 3.0));
    }

    SECTION("commutator antisymmetry") {
        CMat a(3), b(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                a(i, j) = Cplx(unit(i * 3 + j), unit(9 + i * 3 + j));
                b(i, j) = Cplx(unit(18 + i * 3 + j), unit(27 + i * 3 + j));
            }
        CMat lhs = commutator(a, b) + commutator(b, a);
        REQUIRE(lhs.max_abs() < 1e-14);
    }

    SECTION("frobenius_re is a real inner product") {
        CMat a(2), b(2);
        a(0, 1) = Cplx(1.0, 2.0);
        b(0, 1) = Cplx(3.0, -1.0);
        // Re conj(1+2i)(3-i) = Re (3-i-6i+2i^2)... computed directly:
        REQUIRE(std::abs(frobenius_re(a, b) - 1.0) < 1e-15);
        REQUIRE(frobenius_re(a, b) == frobenius_re(b, a));
        REQUIRE(frobenius_re(a, a) > 0.0);
    }

    SECTION("skew-Hermitian generator exponentiates to a unitary matrix") {
        CMat a(3);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                if (i == j) {
                    a(i, i) = Cplx(0.0, 2.0 * unit(50 + i));
                } else {
                    a(i, j) = Cplx(unit(60 + 3 * i + j), unit(70 + 3 * i + j));
                    a(j, i) = -std::conj(a(i, j));
                }
            }
        CMat u = matrix_exp(a);
        CMat prod = u.adjoint() * u;
        prod -= CMat::identity(3);
        REQUIRE(prod.max_abs() < 1e-13);
    }

    SECTION("exp reproduces a diagonal phase") {
        CMat a(2);
        a(0, 0) = i_unit * Cplx(0.7, 0.0);
        CMat e = matrix_exp(a);
        REQUIRE(std::abs(e(0, 0) - std::polar(1.0, 0.7)) < 1e-14);
        REQUIRE(std::abs(e(1, 1) - Cplx(1.0, 0.0)) < 1e-15);
    }
}
