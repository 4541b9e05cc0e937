#include "qmoduli/qgroup_data.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace qm {

namespace {

constexpr double kPi = std::numbers::pi;

// right null space of a (columns orthonormal)
Mat null_space(const Mat& a, double rel = 1e-10) {
    if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel * std::max(1.0, smax)) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

void fix_phase(Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > 1e-12) {
            v *= std::abs(v(i)) / v(i);
            return;
        }
}

}  // namespace

std::shared_ptr<const Mat> LevelCache::find(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = store_.find(key);
    return it == store_.end() ? nullptr : it->second;
}

std::shared_ptr<const Mat> LevelCache::insert(const std::string& key, Mat value) {
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, fresh] = store_.emplace(key, std::make_shared<const Mat>(std::move(value)));
    return it->second;
}

double LevelData::qnum(double n) const {
    return std::sin(n * kPi / (k + 2)) / std::sin(kPi / (k + 2));
}

cplx LevelData::qpow(double x) const { return std::polar(1.0, kPi * x / (k + 2)); }

LevelData make_level(int k, Tolerance tol) {
    if (k < 1) throw LabelError("level k must be >= 1");
    LevelData ctx;
    ctx.k = k;
    ctx.q = std::polar(1.0, kPi / (k + 2));
    ctx.tol = tol;
    ctx.cache = std::make_shared<LevelCache>();
    return ctx;
}

Rep Irrep::rep() const {
    Rep r{E, F, {}};
    for (int i = 0; i < dim; ++i) r.w.push_back(twoj - 2 * i);
    return r;
}

Irrep module_irrep(const LevelData& ctx, int twoj) {
    if (twoj < 0) throw LabelError("negative spin label");
    Irrep r;
    r.twoj = twoj;
    r.dim = twoj + 1;
    r.E = Mat::Zero(r.dim, r.dim);
    r.F = Mat::Zero(r.dim, r.dim);
    r.K = Mat::Zero(r.dim, r.dim);
    const double j = twoj / 2.0;
    for (int i = 0; i < r.dim; ++i) {
        const double m = j - i;
        r.K(i, i) = ctx.qpow(2 * m);
        if (i > 0) r.E(i - 1, i) = std::sqrt(std::max(0.0, ctx.qnum(j - m) * ctx.qnum(j + m + 1)));
        if (i < r.dim - 1)
            r.F(i + 1, i) = std::sqrt(std::max(0.0, ctx.qnum(j + m) * ctx.qnum(j - m + 1)));
    }
    return r;
}

Irrep irrep(const LevelData& ctx, int twoj) {
    if (!ctx.admissible(twoj))
        throw LabelError("spin label 2j=" + std::to_string(twoj) + " outside 0.." +
                         std::to_string(ctx.k));
    return module_irrep(ctx, twoj);
}

Mat k_matrix(const LevelData& ctx, const Rep& r, double power) {
    Mat K = Mat::Zero(r.dim(), r.dim());
    for (int i = 0; i < r.dim(); ++i) K(i, i) = ctx.qpow(power * r.w[i]);
    return K;
}

Mat generator_image(const LevelData& ctx, const Rep& r, Gen g) {
    switch (g) {
        case Gen::E: return r.E;
        case Gen::F: return r.F;
        case Gen::K: return k_matrix(ctx, r);
    }
    return {};
}

Rep tensor_rep(const LevelData& ctx, const Rep& a, const Rep& b) {
    Rep t;
    const Mat Ia = identity(a.dim()), Ib = identity(b.dim());
    t.E = kron(a.E, k_matrix(ctx, b)) + kron(Ia, b.E);
    t.F = kron(a.F, Ib) + kron(k_matrix(ctx, a, -1.0), b.F);
    for (double x : a.w)
        for (double y : b.w) t.w.push_back(x + y);
    return t;
}

Rep dual_rep(const LevelData& ctx, const Rep& r) {
    // S(E) = -E K^-1, S(F) = -K F, S(K) = K^-1
    Rep d;
    d.E = (-r.E * k_matrix(ctx, r, -1.0)).transpose();
    d.F = (-k_matrix(ctx, r) * r.F).transpose();
    for (double x : r.w) d.w.push_back(-x);
    return d;
}

Rep direct_sum(const std::vector<Rep>& reps) {
    int n = 0;
    for (const auto& r : reps) n += r.dim();
    Rep s{Mat::Zero(n, n), Mat::Zero(n, n), {}};
    int off = 0;
    for (const auto& r : reps) {
        s.E.block(off, off, r.dim(), r.dim()) = r.E;
        s.F.block(off, off, r.dim(), r.dim()) = r.F;
        s.w.insert(s.w.end(), r.w.begin(), r.w.end());
        off += r.dim();
    }
    return s;
}

Mat coproduct_image(const LevelData& ctx, int j1, int j2, Gen g) {
    const Rep t = tensor_rep(ctx, irrep(ctx, j1).rep(), irrep(ctx, j2).rep());
    return generator_image(ctx, t, g);
}

Mat r_matrix(const LevelData& ctx, const Rep& a, const Rep& b) {
    const int D = a.dim() * b.dim();
    Vec h(D);
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) h(i * b.dim() + j) = ctx.qpow(a.w[i] * b.w[j] / 2.0);
    Mat sum = Mat::Zero(D, D);
    Mat En = identity(a.dim()), Fn = identity(b.dim());
    double fact = 1.0;
    const cplx dq = ctx.q - 1.0 / ctx.q;
    for (int n = 0;; ++n) {
        if (n > 0) {
            fact *= ctx.qnum(n);
            En = En * a.E;
            Fn = Fn * b.F;
            if (En.norm() == 0.0 || Fn.norm() == 0.0) break;
        }
        sum += std::pow(dq, n) * ctx.qpow(n * (n - 1) / 2.0) / fact * kron(En, Fn);
        if (n > std::max(a.dim(), b.dim())) break;
    }
    return h.asDiagonal() * sum;
}

Mat r_matrix(const LevelData& ctx, int j1, int j2) {
    const std::string key = "R:" + std::to_string(j1) + "," + std::to_string(j2);
    if (ctx.cache)
        if (auto hit = ctx.cache->find(key)) return *hit;
    Mat R = r_matrix(ctx, irrep(ctx, j1).rep(), irrep(ctx, j2).rep());
    if (ctx.cache) ctx.cache->insert(key, R);
    return R;
}

Mat r21_matrix(const LevelData& ctx, const Rep& a, const Rep& b) {
    const Mat P = flip(a.dim(), b.dim());
    return P.transpose() * r_matrix(ctx, b, a) * P;
}

Mat r21_matrix(const LevelData& ctx, int j1, int j2) {
    const Mat P = flip(j1 + 1, j2 + 1);
    return P.transpose() * r_matrix(ctx, j2, j1) * P;
}

Mat monodromy(const LevelData& ctx, int ja, int jb) {
    return r21_matrix(ctx, ja, jb) * r_matrix(ctx, ja, jb);
}

Mat monodromy(const LevelData& ctx, const Rep& a, const Rep& b) {
    return r21_matrix(ctx, a, b) * r_matrix(ctx, a, b);
}

namespace {

Residual make_residual(const LevelData& ctx, std::string rel, std::vector<int> labels, double v,
                       double tol) {
    (void)ctx;
    return {std::move(rel), std::move(labels), v, v < tol};
}

}  // namespace

Residual check_quasitriangularity(const LevelData& ctx, int j1, int j2) {
    const Mat R = r_matrix(ctx, j1, j2);
    const Mat P = flip(j1 + 1, j2 + 1);
    double worst = 0.0;
    for (Gen g : {Gen::E, Gen::F, Gen::K}) {
        const Mat lhs = R * coproduct_image(ctx, j1, j2, g);
        const Mat rhs = P.transpose() * coproduct_image(ctx, j2, j1, g) * P * R;
        worst = std::max(worst, (lhs - rhs).norm());
    }
    return make_residual(ctx, "eq1-quasitriangularity", {j1, j2}, worst, 1e-10);
}

Residual check_yang_baxter(const LevelData& ctx, int j1, int j2, int j3) {
    const SlotSpace s{{j1 + 1, j2 + 1, j3 + 1}};
    const Mat R12 = embed(r_matrix(ctx, j1, j2), {0, 1}, s);
    const Mat R13 = embed(r_matrix(ctx, j1, j3), {0, 2}, s);
    const Mat R23 = embed(r_matrix(ctx, j2, j3), {1, 2}, s);
    const Mat lhs = R12 * R13 * R23, rhs = R23 * R13 * R12;
    return make_residual(ctx, "yang-baxter", {j1, j2, j3}, relative_residual(lhs, rhs), 1e-10);
}

Residual check_irrep_relations(const LevelData& ctx, int twoj) {
    const Irrep r = irrep(ctx, twoj);
    const Mat Ki = r.K.inverse();
    const cplx q2 = ctx.q * ctx.q;
    double v = (r.K * r.E * Ki - q2 * r.E).norm();
    v = std::max(v, (r.K * r.F * Ki - r.F / q2).norm());
    v = std::max(v, (r.E * r.F - r.F * r.E - (r.K - Ki) / (ctx.q - 1.0 / ctx.q)).norm());
    return make_residual(ctx, "irrep", {twoj}, v, 1e-10);
}

Residual check_coproduct_homomorphism(const LevelData& ctx, int j1, int j2) {
    const Mat E = coproduct_image(ctx, j1, j2, Gen::E);
    const Mat F = coproduct_image(ctx, j1, j2, Gen::F);
    const Mat K = coproduct_image(ctx, j1, j2, Gen::K);
    const Mat Ki = K.inverse();
    const cplx q2 = ctx.q * ctx.q;
    double v = (K * E * Ki - q2 * E).norm();
    v = std::max(v, (K * F * Ki - F / q2).norm());
    v = std::max(v, (E * F - F * E - (K - Ki) / (ctx.q - 1.0 / ctx.q)).norm());
    return make_residual(ctx, "coproduct", {j1, j2}, v, 1e-10);
}

cplx ribbon_phase(const LevelData& ctx, int twoj, int dir) {
    return ctx.qpow(dir * twoj * (twoj + 2) / 2.0);
}

Residual check_monodromy_spectrum(const LevelData& ctx, int j1, int j2) {
    const Mat M = monodromy(ctx, j1, j2);
    const auto cg = clebsch_gordan(ctx, j1, j2);
    double worst = 0.0;
    for (const auto& ch : cg.channels) {
        const cplx lam = ribbon_phase(ctx, ch.l) / (ribbon_phase(ctx, j1) * ribbon_phase(ctx, j2));
        worst = std::max(worst, (M * ch.C - lam * ch.C).norm());
    }
    return make_residual(ctx, "monodromy-spectrum", {j1, j2}, worst, 1e-10);
}

Mat balancing_matrix(const LevelData& ctx, int twoj, int power) {
    const Irrep r = irrep(ctx, twoj);
    return k_matrix(ctx, r.rep(), static_cast<double>(power));
}

std::vector<int> fusion_channels(int k, int j1, int j2) {
    std::vector<int> out;
    for (int l = std::abs(j1 - j2); l <= std::min(j1 + j2, 2 * k - j1 - j2); l += 2) out.push_back(l);
    return out;
}

CGDecomposition clebsch_gordan_full(const LevelData& ctx, int j1, int j2, bool admissible_only) {
    const Rep a = module_irrep(ctx, j1).rep(), b = module_irrep(ctx, j2).rep();
    const Rep t = tensor_rep(ctx, a, b);
    const int D = t.dim();
    CGDecomposition out;

    struct Piece {
        int l;
        Mat C;
    };
    std::vector<Piece> all;
    bool ok = true;
    for (int l = std::abs(j1 - j2); l <= j1 + j2; l += 2) {
        std::vector<int> idx;
        for (int i = 0; i < D; ++i)
            if (std::abs(t.w[i] - l) < 1e-9) idx.push_back(i);
        Mat sub(D, idx.size());
        for (std::size_t c = 0; c < idx.size(); ++c) sub.col(c) = t.E.col(idx[c]);
        const Mat ns = null_space(sub);
        if (ns.cols() != 1) {
            ok = false;
            if (ns.cols() == 0) continue;
        }
        Vec hw = Vec::Zero(D);
        for (std::size_t c = 0; c < idx.size(); ++c) hw(idx[c]) = ns(c, 0);
        fix_phase(hw);
        hw.normalize();
        const Irrep target = module_irrep(ctx, l);
        Mat C(D, l + 1);
        C.col(0) = hw;
        for (int i = 0; i < l; ++i) {
            const double f = target.F(i + 1, i).real();
            if (f < 1e-12) {
                ok = false;
                break;
            }
            C.col(i + 1) = t.F * C.col(i) / f;
        }
        all.push_back({l, C});
    }

    int cols = 0;
    for (const auto& p : all) cols += static_cast<int>(p.C.cols());
    Mat full(D, cols);
    int c0 = 0;
    for (const auto& p : all) {
        full.middleCols(c0, p.C.cols()) = p.C;
        c0 += static_cast<int>(p.C.cols());
    }
    Mat Pfull;
    if (ok && cols == D) {
        Eigen::FullPivLU<Mat> lu(full);
        if (lu.isInvertible())
            Pfull = lu.inverse();
        else
            ok = false;
    } else {
        ok = false;
    }
    out.semisimple = ok;

    c0 = 0;
    for (const auto& p : all) {
        const int d = static_cast<int>(p.C.cols());
        const bool adm = p.l <= std::min(j1 + j2, 2 * ctx.k - j1 - j2);
        if (!admissible_only || adm) {
            CGChannel ch;
            ch.l = p.l;
            ch.C = p.C;
            if (ok)
                ch.P = Pfull.middleRows(c0, d);
            else
                ch.P = p.C.completeOrthogonalDecomposition().pseudoInverse();
            // intertwining residual against the target module
            const Rep tr = module_irrep(ctx, p.l).rep();
            out.intertwining_residual =
                std::max({out.intertwining_residual, (t.E * p.C - p.C * tr.E).norm(),
                          (t.F * p.C - p.C * tr.F).norm()});
            out.channels.push_back(std::move(ch));
        }
        c0 += d;
    }
    return out;
}

CGDecomposition clebsch_gordan(const LevelData& ctx, int j1, int j2) {
    irrep(ctx, j1);
    irrep(ctx, j2);
    auto out = clebsch_gordan_full(ctx, j1, j2, true);
    // kernel dimensions must agree with the truncation rule
    const auto expect = fusion_channels(ctx.k, j1, j2);
    if (out.channels.size() != expect.size())
        throw std::runtime_error("clebsch_gordan: channel count disagrees with truncation rule");
    for (std::size_t i = 0; i < expect.size(); ++i)
        if (out.channels[i].l != expect[i])
            throw std::runtime_error("clebsch_gordan: channel labels disagree with truncation rule");
    if (out.intertwining_residual > 1e-9)
        throw std::runtime_error("clebsch_gordan: intertwiner solve failed to reach tolerance");
    return out;
}

double character(int k, int a, int b) {
    double s = 0.0;
    for (int i = 0; i <= a; ++i) {
        const double m = -a / 2.0 + i;
        s += std::cos(2.0 * kPi * m * (b + 1) / (k + 2));
    }
    return s;
}

ModularData modular_data(const LevelData& ctx) {
    const int k = ctx.k, n = k + 1;
    ModularData md;
    md.k = k;
    md.S = Mat::Zero(n, n);
    md.T = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            md.S(a, b) = std::sqrt(2.0 / (k + 2)) * std::sin(kPi * (a + 1) * (b + 1) / (k + 2));
    for (int a = 0; a < n; ++a) {
        md.twists.push_back(ribbon_phase(ctx, a));
        md.T(a, a) = md.twists.back();
        md.qdims.push_back(md.S(0, a).real() / md.S(0, 0).real());
    }
    md.fusion.assign(n, std::vector<std::vector<int>>(n, std::vector<int>(n, 0)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (const auto& ch : clebsch_gordan(ctx, a, b).channels) md.fusion[a][b][ch.l] += 1;

    for (int a = 0; a < n; ++a) {
        Mat Na = Mat::Zero(n, n);
        for (int b = 0; b < n; ++b)
            for (int l = 0; l < n; ++l) Na(b, l) = md.fusion[a][b][l];
        Mat D = Mat::Zero(n, n);
        for (int b = 0; b < n; ++b) D(b, b) = md.S(a, b) / md.S(0, b);
        md.verlinde_residual =
            std::max(md.verlinde_residual, (md.S.adjoint() * Na * md.S - D).norm());
    }
    md.unitarity_residual = (md.S * md.S.adjoint() - identity(n)).norm();
    md.s_squared_residual = (md.S * md.S - identity(n)).norm();
    return md;
}

}  // namespace qm
