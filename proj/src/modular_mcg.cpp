#include "qmoduli/modular_mcg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace qm {

TorusRep torus_rep(const LevelData& ctx, int tau, int dir) {
    if (!ctx.admissible(tau)) throw LabelError("auxiliary label out of range");
    const ModularData md = modular_data(ctx);
    const int n = ctx.k + 1;
    TorusRep t;
    t.k = ctx.k;
    t.tau = tau;
    t.S = md.S;
    t.W_a = Mat::Zero(n, n);
    t.v_alpha = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        t.W_a(j, j) = md.S(tau, j) / md.S(0, j);
        t.v_alpha(j, j) = ribbon_phase(ctx, j, dir);
    }
    const Mat Si = md.S.inverse();
    t.W_b = md.S * t.W_a * Si;
    t.v_beta = md.S * t.v_alpha * Si;
    return t;
}

TorusReport check_torus_mcg(const LevelData& ctx, int tau, int dir) {
    const TorusRep t = torus_rep(ctx, tau, dir);
    const Mat& a = t.v_alpha;
    const Mat& b = t.v_beta;
    const Mat I = identity(ctx.k + 1);
    TorusReport r;
    r.k = ctx.k;
    r.braid = proportionality_residual(a * b * a, b * a * b);
    const Mat Sp = a * b * a;
    r.sprime2 = proportionality_residual(Sp * Sp, I);
    r.sprime4 = proportionality_residual(Sp * Sp * Sp * Sp, I);
    r.s_match = proportionality_residual(Sp, t.S);
    r.unitarity = std::max((a.adjoint() * a - I).norm(), (b.adjoint() * b - I).norm());
    // the same characters appear as the eigenvalues of c = tr_q(M)
    for (int j = 0; j <= ctx.k; ++j) {
        const Mat c = quantum_trace(ctx, tau, monodromy(ctx, tau, j), SlotSpace{{j + 1}});
        r.spectrum = std::max(r.spectrum, (c - t.W_a(j, j) * identity(j + 1)).norm());
    }
    r.pass = std::max({r.braid, r.sprime2, r.sprime4, r.s_match, r.unitarity, r.spectrum}) < 1e-9;
    return r;
}

Mat torus_word(const TorusRep& t, const TwistWord& w) {
    Mat out = identity(t.k + 1);
    for (const auto& l : w) {
        if (l.curve.size() != 1 || l.curve[0].kind == Cycle::L || l.curve[0].index != 0)
            throw ParseError("torus words use the letters a and b only");
        Mat v = l.curve[0].kind == Cycle::A ? t.v_alpha : t.v_beta;
        if (l.curve[0].exp * l.exp < 0) v = v.inverse();
        out = out * v;
    }
    return out;
}

namespace {

// eigenvectors of W sorted to match the target diagonal, first nonzero
// component real positive
Mat matched_basis(const Mat& W, const Mat& target_diag) {
    Eigen::ComplexEigenSolver<Mat> es(W);
    const int n = static_cast<int>(W.rows());
    Mat out(n, n);
    std::vector<bool> used(n, false);
    for (int j = 0; j < n; ++j) {
        int best = -1;
        double dist = 1e300;
        for (int i = 0; i < n; ++i)
            if (!used[i] && std::abs(es.eigenvalues()(i) - target_diag(j, j)) < dist) {
                dist = std::abs(es.eigenvalues()(i) - target_diag(j, j));
                best = i;
            }
        if (dist > 1e-6) throw std::runtime_error("basis matching failed: spectra disagree");
        used[best] = true;
        Vec v = es.eigenvectors().col(best);
        for (int i = 0; i < n; ++i)
            if (std::abs(v(i)) > 1e-12) {
                v *= std::abs(v(i)) / v(i);
                break;
            }
        out.col(j) = v;
    }
    return out;
}

}  // namespace

CrosscheckReport crosscheck_graph_vs_modular(const LevelData& ctx, const ConventionReport& conv, int aux) {
    CrosscheckReport rep;
    GeneratorFamily torus;
    try {
        torus = graph_generators(ctx, SurfaceSignature{1, 0, {}, aux}, conv);
    } catch (const ArbitrationFailure& e) {
        rep.reason = std::string("torus family unavailable: ") + e.what();
        return rep;
    }
    rep.flatness = flatness_check(ctx, torus);
    if (!rep.flatness.available) {
        rep.reason = rep.flatness.reason;
        return rep;
    }
    if (rep.flatness.trivial_block_dim != ctx.k + 1) {
        rep.reason = "trivial-charge block dimension differs from k+1";
        return rep;
    }
    rep.available = true;
    const TorusRep t = torus_rep(ctx, aux, conv.ribbon_direction);
    const SlotSpace carrier{std::vector<int>(torus.carrier.dims.begin() + 1, torus.carrier.dims.end())};
    const Mat Wa = quantum_trace(ctx, aux, torus.A[0], carrier, conv.balancing_power);
    const Mat& Q = rep.flatness.trivial_basis;
    const Mat basis = matched_basis(Q.adjoint() * Wa * Q, t.W_a);
    const Mat bi = basis.inverse();
    const Mat va = bi * Q.adjoint() * twist_operator(ctx, torus, parse_loop_word("a")).v * Q * basis;
    const Mat vb = bi * Q.adjoint() * twist_operator(ctx, torus, parse_loop_word("b")).v * Q * basis;
    rep.alpha = proportionality_residual(va, t.v_alpha);
    // diagonal gauge freedom of the eigenbasis: fix it on the first row
    Mat D = Mat::Identity(ctx.k + 1, ctx.k + 1);
    for (int j = 0; j <= ctx.k; ++j)
        if (std::abs(t.v_beta(0, j)) > 1e-12 && std::abs(vb(0, j)) > 1e-12) D(j, j) = t.v_beta(0, j) / vb(0, j);
    rep.beta = proportionality_residual(D.inverse() * vb * D, t.v_beta);
    rep.pass = rep.flatness.pass && rep.alpha < 1e-8 && rep.beta < 1e-8;
    return rep;
}

}  // namespace qm
