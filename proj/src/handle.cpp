// Truncated regular-representation model of the handle algebra.
//
// W = sum_b V_b (x) V_b over admissible b. A is the monodromy with the
// left factor of each summand; B multiplies matrix coefficients through
// Clebsch-Gordan sandwiches. The variant set is small and enumerated.

#include <Eigen/SVD>
#include <random>

#include "qmoduli/graph_algebra.hpp"

namespace qm {

namespace {

constexpr double kHandleTol = 1e-9;

std::vector<int> block_offsets(int k) {
    std::vector<int> off{0};
    for (int b = 0; b <= k; ++b) off.push_back(off.back() + (b + 1) * (b + 1));
    return off;
}

}  // namespace

int handle_variant_count() { return 8; }

std::string handle_variant_name(int v) {
    std::string s = (v & 1) ? "right factor" : "left factor";
    s += (v & 2) ? ", C^H" : ", C^-1";
    s += (v & 4) ? ", aux transposed" : "";
    return s;
}

Rep handle_factor_rep(const LevelData& ctx, int which) {
    std::vector<Rep> blocks;
    for (int b = 0; b <= ctx.k; ++b) {
        const Rep r = irrep(ctx, b).rep();
        const Mat I = identity(b + 1);
        Rep f;
        if (which == 0) {
            f.E = kron(r.E, I);
            f.F = kron(r.F, I);
            for (double x : r.w)
                for (int i = 0; i <= b; ++i) f.w.push_back(x);
        } else {
            f.E = kron(I, r.E);
            f.F = kron(I, r.F);
            for (int i = 0; i <= b; ++i)
                for (double x : r.w) f.w.push_back(x);
        }
        blocks.push_back(f);
    }
    return direct_sum(blocks);
}

Mat handle_A(const LevelData& ctx, int aux) {
    return monodromy(ctx, irrep(ctx, aux).rep(), handle_factor_rep(ctx, 0));
}

Mat handle_B_candidate(const LevelData& ctx, int aux, int variant) {
    const auto off = block_offsets(ctx.k);
    const int dW = off.back(), dt = aux + 1;
    const bool right = variant & 1, adjoint = variant & 2, transposed = variant & 4;
    Mat U = Mat::Zero(dt * dW, dt * dW);
    for (int b = 0; b <= ctx.k; ++b) {
        const auto cg = clebsch_gordan_full(ctx, aux, b, true);
        const int db = b + 1;
        for (const auto& ch : cg.channels) {
            const int l = ch.l, dl = l + 1;
            const Mat Ct = adjoint ? Mat(ch.C.adjoint()) : ch.P;
            for (int a = 0; a < dt; ++a)
                for (int c = 0; c < dt; ++c)
                    for (int m = 0; m < db; ++m)
                        for (int n = 0; n < db; ++n) {
                            const int src = off[b] + (right ? n * db + m : m * db + n);
                            for (int r = 0; r < dl; ++r)
                                for (int s = 0; s < dl; ++s) {
                                    const int dst = off[l] + (right ? s * dl + r : r * dl + s);
                                    const int row = (transposed ? c : a) * dW + dst;
                                    const int col = (transposed ? a : c) * dW + src;
                                    U(row, col) += ch.C(a * db + m, r) * Ct(s, c * db + n);
                                }
                        }
        }
    }
    return U;
}

HandleModel handle_generators(const LevelData& ctx, int aux) {
    HandleModel h;
    h.aux = aux;
    h.block_offset = block_offsets(ctx.k);
    h.dimW = h.block_offset.back();
    h.A = handle_A(ctx, aux);
    const SlotSpace carrier{{h.dimW}};
    const double eqA = loop_relation_residual(ctx, aux, h.A, carrier);
    for (int v = 0; v < handle_variant_count(); ++v) {
        const Mat B = handle_B_candidate(ctx, aux, v);
        double r = std::max(eqA, loop_relation_residual(ctx, aux, B, carrier));
        r = std::max(r, handle_residual(ctx, aux, h.A, B, carrier));
        // a generator must be invertible
        Eigen::JacobiSVD<Mat> svd(B);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) < 1e-10 * s(0)) r = std::max(r, 1.0);
        const bool pass = std::isfinite(r) && r < kHandleTol;
        h.table.push_back({handle_variant_name(v), r, pass});
        if (pass && h.variant < 0) {
            h.variant = v;
            h.B = B;
        }
    }
    if (h.variant < 0)
        throw ArbitrationFailure("no B variant satisfies the handle relation on W = sum V_b (x) V_b", h.table);
    return h;
}

HandleCertificate handle_certificate(const LevelData& ctx, int aux) {
    const auto off = block_offsets(ctx.k);
    const int dW = off.back(), dt = aux + 1, D = dt * dW;
    const SlotSpace carrier{{dW}};
    const Mat A = handle_A(ctx, aux);
    const Mat R = aux_pair(r_matrix(ctx, aux, aux), aux, carrier);
    const Mat Rp = aux_pair(r21_matrix(ctx, aux, aux), aux, carrier);
    const Mat A1 = first_copy(A, aux, carrier);
    const Mat X = R.inverse() * A1 * R, Y = Rp * A1 * R;

    // X (1 (x) B) - (1 (x) B) Y = 0 is linear in vec(B)
    const int big = dt * D;
    Mat sys = Mat::Zero(static_cast<Eigen::Index>(big) * big, static_cast<Eigen::Index>(D) * D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            Mat T = Mat::Zero(big, big);
            for (int a = 0; a < dt; ++a) {
                T.col(a * D + j) += X.col(a * D + i);
                T.row(a * D + i) -= Y.row(a * D + j);
            }
            sys.col(static_cast<Eigen::Index>(i) * D + j) = Eigen::Map<const Vec>(T.data(), T.size());
        }
    Eigen::BDCSVD<Mat> svd_sys(sys, Eigen::ComputeThinV);
    const auto& sv = svd_sys.singularValues();
    const double cut = 1e-10 * std::max(1.0, sv(0));
    int dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cut) ++dim;
    const Mat kernel = svd_sys.matrixV().rightCols(dim);

    HandleCertificate cert;
    cert.unknowns = D * D;
    cert.solution_dim = dim;
    cert.full_rank = D;
    if (dim == 0) return cert;
    std::mt19937 gen(7);
    std::normal_distribution<double> nd;
    Vec c(dim);
    for (int i = 0; i < dim; ++i) c(i) = cplx(nd(gen), nd(gen));
    const Vec v = kernel * c;
    Mat B(D, D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) B(i, j) = v(static_cast<Eigen::Index>(i) * D + j);
    Eigen::JacobiSVD<Mat> svd(B);
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-8 * s(0)) ++cert.max_rank;
    return cert;
}

}  // namespace qm
