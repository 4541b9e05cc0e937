#include <random>

#include "doctest.h"
#include "qmoduli/tensor_kit.hpp"

using namespace qm;

namespace {

Mat random_matrix(int r, int c, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(nd(gen), nd(gen));
    return m;
}

Mat random_unitary(int n, unsigned seed) {
    Eigen::HouseholderQR<Mat> qr(random_matrix(n, n, seed));
    return qr.householderQ();
}

// element-wise Kronecker product, row-major index i*dim(B)+j
Mat kron_oracle(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

}  // namespace

TEST_CASE("kron") {
    CHECK(kron(identity(2), identity(3)).isApprox(identity(6)));
    Mat n = Mat::Zero(2, 2);
    n(0, 1) = 1.0;
    Eigen::FullPivLU<Mat> lu(kron(n, identity(2)));
    CHECK(lu.rank() == 2);

    const Mat A = random_matrix(2, 2, 1), B = random_matrix(2, 2, 2), C = random_matrix(2, 2, 3),
              D = random_matrix(2, 2, 4);
    CHECK((kron(A, B) * kron(C, D) - kron(A * C, B * D)).norm() < 1e-12);
    CHECK((kron(A, random_matrix(3, 2, 5)) - kron_oracle(A, random_matrix(3, 2, 5))).norm() == 0.0);
    CHECK((kron({A, B, C}) - kron_oracle(kron_oracle(A, B), C)).norm() < 1e-13);
}

TEST_CASE("embed") {
    const Mat X = random_matrix(2, 2, 11);
    const SlotSpace s22{{2, 2}};
    CHECK((embed(X, {0}, s22) - kron(X, identity(2))).norm() == 0.0);
    CHECK((embed(X, {1}, s22) - kron(identity(2), X)).norm() == 0.0);

    // embed(R, [1,0]) equals P R P with P the explicit index swap
    const Mat R = random_matrix(4, 4, 12);
    Mat P = Mat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) P(j * 2 + i, i * 2 + j) = 1.0;
    CHECK((embed(R, {1, 0}, s22) - P * R * P).norm() < 1e-14);
    CHECK((flip(2, 2) - P).norm() == 0.0);

    SUBCASE("non-adjacent slots against an index oracle") {
        const SlotSpace s{{2, 3, 2}};
        const Mat Y = random_matrix(4, 4, 13);
        const Mat E = embed(Y, {2, 0}, s);
        double err = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 2; ++c)
                    for (int a2 = 0; a2 < 2; ++a2)
                        for (int b2 = 0; b2 < 3; ++b2)
                            for (int c2 = 0; c2 < 2; ++c2) {
                                const cplx want = b == b2 ? Y(c * 2 + a, c2 * 2 + a2) : cplx(0.0);
                                err = std::max(err, std::abs(E((a * 3 + b) * 2 + c, (a2 * 3 + b2) * 2 + c2) - want));
                            }
        CHECK(err < 1e-14);
    }
    SUBCASE("composition") {
        const SlotSpace s{{2, 3, 2}};
        const Mat Y = random_matrix(4, 4, 14), Z = random_matrix(4, 4, 15);
        CHECK((embed(Y * Z, {0, 2}, s) - embed(Y, {0, 2}, s) * embed(Z, {0, 2}, s)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(embed(X, {0, 0}, s22), DimensionError);
    CHECK_THROWS_AS(embed(random_matrix(3, 3, 1), {0}, s22), DimensionError);
    CHECK_THROWS_AS(embed(X, {2}, s22), DimensionError);
}

TEST_CASE("partial trace") {
    const Mat A = random_matrix(2, 2, 21), B = random_matrix(3, 3, 22);
    const SlotSpace s{{2, 3}};
    CHECK((partial_trace(kron(A, B), 0, s) - A.trace() * B).norm() < 1e-13);
    CHECK((partial_trace(kron(A, B), 1, s) - B.trace() * A).norm() < 1e-13);
    CHECK((partial_trace(identity(4), 0, SlotSpace{{2, 2}}) - 2.0 * identity(2)).norm() == 0.0);
    const Mat M = random_matrix(6, 6, 23);
    CHECK(std::abs(partial_trace(M, 0, s).trace() - M.trace()) < 1e-13);
    // linearity
    const Mat N = random_matrix(6, 6, 24);
    const cplx z(0.3, -1.2);
    CHECK((partial_trace(M + z * N, 1, s) - partial_trace(M, 1, s) - z * partial_trace(N, 1, s)).norm() < 1e-13);
    CHECK_THROWS_AS(partial_trace(M, 2, s), DimensionError);
}

TEST_CASE("proportional") {
    const Tolerance tol;
    const auto l = proportional(cplx(0, 2) * identity(3), identity(3), tol);
    REQUIRE(l.has_value());
    CHECK(std::abs(*l - cplx(0, 2)) < 1e-15);

    Mat X = Mat::Zero(2, 2), Y = Mat::Zero(2, 2);
    X(0, 0) = 1.0;
    X(1, 1) = 2.0;
    Y(0, 0) = 2.0;
    Y(1, 1) = 1.0;
    CHECK_FALSE(proportional(X, Y, tol).has_value());

    const Mat U = random_unitary(4, 31);
    const auto p = proportional(std::polar(1.0, 0.7) * U, U, tol);
    REQUIRE(p.has_value());
    CHECK(std::abs(*p - std::polar(1.0, 0.7)) < 1e-14);

    cplx ratio;
    CHECK(proportionality_residual(std::polar(2.0, -0.4) * U, U, &ratio) < 1e-14);
    CHECK(std::abs(ratio - std::polar(2.0, -0.4)) < 1e-14);
    CHECK(proportionality_residual(X, Y) > 0.1);
    CHECK_THROWS_AS(proportional(X, identity(3), tol), DimensionError);
}

TEST_CASE("eigenprojectors") {
    const Tolerance tol;
    Mat D = Mat::Zero(3, 3);
    D(0, 0) = D(1, 1) = 1.0;
    D(2, 2) = 2.0;
    auto ps = simultaneous_eigenprojectors(D, tol);
    REQUIRE(ps.size() == 2);
    std::sort(ps.begin(), ps.end(), [](const auto& a, const auto& b) { return a.value.real() < b.value.real(); });
    Mat P1 = Mat::Zero(3, 3), P2 = Mat::Zero(3, 3);
    P1(0, 0) = P1(1, 1) = 1.0;
    P2(2, 2) = 1.0;
    CHECK((ps[0].projector - P1).norm() < 1e-12);
    CHECK((ps[1].projector - P2).norm() < 1e-12);

    const auto id = simultaneous_eigenprojectors(identity(4), tol);
    REQUIRE(id.size() == 1);
    CHECK((id[0].projector - identity(4)).norm() < 1e-12);

    // construct-then-recover
    const Mat U = random_unitary(5, 41);
    Mat L = Mat::Zero(5, 5);
    const cplx vals[] = {std::polar(1.0, 0.3), std::polar(1.0, 0.3), 2.0, cplx(0, -1), cplx(0, -1)};
    for (int i = 0; i < 5; ++i) L(i, i) = vals[i];
    const Mat op = U * L * U.adjoint();
    const auto rec = simultaneous_eigenprojectors(op, tol);
    CHECK(rec.size() == 3);
    Mat sum = Mat::Zero(5, 5), rebuilt = Mat::Zero(5, 5);
    for (const auto& e : rec) {
        sum += e.projector;
        rebuilt += e.value * e.projector;
        CHECK((e.projector * e.projector - e.projector).norm() < 1e-9);
        CHECK((e.projector * op - op * e.projector).norm() < 1e-9);
    }
    CHECK((sum - identity(5)).norm() < 1e-9);
    CHECK((rebuilt - op).norm() < 1e-9);

    Mat nn = Mat::Zero(2, 2);
    nn(0, 1) = 1.0;
    CHECK_THROWS(simultaneous_eigenprojectors(nn, tol));
}
