#include "qmoduli/dual_products.hpp"

#include <algorithm>
#include <cmath>

namespace qm {

namespace {

SlotSpace pair_space(int tau, const SlotSpace& carrier) {
    SlotSpace s{{tau + 1, tau + 1}};
    s.dims.insert(s.dims.end(), carrier.dims.begin(), carrier.dims.end());
    return s;
}

std::vector<int> slots_with(int aux, std::size_t ncarrier) {
    std::vector<int> s{aux};
    for (std::size_t i = 0; i < ncarrier; ++i) s.push_back(static_cast<int>(i) + 2);
    return s;
}

double rel(const Mat& lhs, const Mat& rhs) { return (lhs - rhs).norm() / rhs.norm(); }

}  // namespace

GaugeGenerator gauge_generator(const LevelData& ctx, int sign, int tau, int pi) {
    GaugeGenerator g;
    g.sign = sign >= 0 ? +1 : -1;
    g.tau = tau;
    g.pi = pi;
    g.matrix = g.sign > 0 ? r_matrix(ctx, tau, pi) : Mat(r21_matrix(ctx, tau, pi).inverse());
    return g;
}

LoopGenerator loop_generator(const LevelData& ctx, int tau, int pi) {
    return {tau, SlotSpace{{pi + 1}}, monodromy(ctx, tau, pi)};
}

Mat first_copy(const Mat& X, int tau, const SlotSpace& carrier) {
    return embed(X, slots_with(0, carrier.dims.size()), pair_space(tau, carrier));
}

Mat second_copy(const Mat& X, int tau, const SlotSpace& carrier) {
    return embed(X, slots_with(1, carrier.dims.size()), pair_space(tau, carrier));
}

Mat aux_pair(const Mat& r, int tau, const SlotSpace& carrier) {
    return embed(r, {0, 1}, pair_space(tau, carrier));
}

double gauge_relation_residual(const LevelData& ctx, int tau, const Mat& T1, const Mat& T2,
                               const SlotSpace& carrier) {
    const Mat R = aux_pair(r_matrix(ctx, tau, tau), tau, carrier);
    const Mat A = first_copy(T1, tau, carrier), B = second_copy(T2, tau, carrier);
    return rel(R * A * B, B * A * R);
}

Residual check_gauge_relation(const LevelData& ctx, int sign, int tau, int pi) {
    const auto g = gauge_generator(ctx, sign, tau, pi);
    const double r = gauge_relation_residual(ctx, tau, g.matrix, g.matrix, SlotSpace{{pi + 1}});
    return {"eq2", {sign > 0 ? 1 : -1, tau, pi}, r, r < 1e-10};
}

Residual check_gauge_mixed(const LevelData& ctx, int tau, int pi) {
    const auto p = gauge_generator(ctx, +1, tau, pi), m = gauge_generator(ctx, -1, tau, pi);
    const double r = gauge_relation_residual(ctx, tau, p.matrix, m.matrix, SlotSpace{{pi + 1}});
    return {"eq2-mixed", {tau, pi}, r, r < 1e-10};
}

double loop_relation_residual(const LevelData& ctx, int tau, const Mat& M, const SlotSpace& carrier) {
    const Mat R = aux_pair(r_matrix(ctx, tau, tau), tau, carrier);
    const Mat Rp = aux_pair(r21_matrix(ctx, tau, tau), tau, carrier);
    const Mat M1 = first_copy(M, tau, carrier), M2 = second_copy(M, tau, carrier);
    return rel(Rp * M1 * R * M2, M2 * Rp * M1 * R);
}

Residual check_loop_relation(const LevelData& ctx, const LoopGenerator& M) {
    const double r = loop_relation_residual(ctx, M.tau, M.matrix, M.carrier);
    std::vector<int> labels{M.tau};
    for (int d : M.carrier.dims) labels.push_back(d - 1);
    return {"eq4", labels, r, r < 1e-10};
}

// Link variants: factor on slot pi, factor on slot rho, and their order.
// Factors are R_{0s}, R_{s0}, R_{0s}^-1, R_{s0}^-1.
int link_variant_count() { return 32; }

std::string link_variant_name(int v) {
    static const char* f[] = {"R0s", "Rs0", "R0s^-1", "Rs0^-1"};
    const int a = v % 4, b = (v / 4) % 4, order = v / 16;
    const std::string x = std::string(f[a]) + "[pi]", y = std::string(f[b]) + "[rho]";
    return order == 0 ? x + "*" + y : y + "*" + x;
}

namespace {

Mat slot_factor(const LevelData& ctx, int which, int tau, int s) {
    switch (which) {
        case 0: return r_matrix(ctx, tau, s);
        case 1: return r21_matrix(ctx, tau, s);
        case 2: return r_matrix(ctx, tau, s).inverse();
        default: return r21_matrix(ctx, tau, s).inverse();
    }
}

}  // namespace

Mat link_candidate(const LevelData& ctx, int variant, int tau, int pi, int rho) {
    const SlotSpace s{{tau + 1, pi + 1, rho + 1}};
    const Mat X = embed(slot_factor(ctx, variant % 4, tau, pi), {0, 1}, s);
    const Mat Y = embed(slot_factor(ctx, (variant / 4) % 4, tau, rho), {0, 2}, s);
    return variant / 16 == 0 ? Mat(X * Y) : Mat(Y * X);
}

double link_relation_residual(const LevelData& ctx, int tau, const Mat& G, const SlotSpace& carrier) {
    const Mat R = aux_pair(r_matrix(ctx, tau, tau), tau, carrier);
    const Mat Rp = aux_pair(r21_matrix(ctx, tau, tau), tau, carrier);
    const Mat G1 = first_copy(G, tau, carrier), G2 = second_copy(G, tau, carrier);
    return rel(Rp * G1 * G2, G2 * G1 * R);
}

LinkReport check_link_relation(const LevelData& ctx, int tau, int pi, int rho) {
    LinkReport rep;
    const SlotSpace carrier{{pi + 1, rho + 1}};
    rep.best_residual = 1e300;
    for (int v = 0; v < link_variant_count(); ++v) {
        const double r = link_relation_residual(ctx, tau, link_candidate(ctx, v, tau, pi, rho), carrier);
        rep.table.push_back(r);
        if (r < rep.best_residual) {
            rep.best_residual = r;
            rep.best_variant = v;
        }
    }
    if (rep.best_residual < 1e-10) {
        rep.variant = rep.best_variant;
        rep.residual = rep.best_residual;
        rep.pass = true;
    } else {
        rep.residual = rep.best_residual;
    }
    // covariance of the best candidate under G -> G T_R and G -> T_L^-1 G,
    // with T on a fresh slot of spin tau
    const int sigma = tau;
    const SlotSpace ext{{tau + 1, pi + 1, rho + 1, sigma + 1}};
    const SlotSpace ext_carrier{{pi + 1, rho + 1, sigma + 1}};
    const Mat G = embed(link_candidate(ctx, rep.best_variant, tau, pi, rho), {0, 1, 2}, ext);
    const Mat T = embed(gauge_generator(ctx, +1, tau, sigma).matrix, {0, 3}, ext);
    rep.phi_r_residual = link_relation_residual(ctx, tau, G * T, ext_carrier);
    rep.phi_l_residual = link_relation_residual(ctx, tau, T.inverse() * G, ext_carrier);
    return rep;
}

Mat quantum_trace(const LevelData& ctx, int tau, const Mat& M, const SlotSpace& carrier,
                  int balancing_power) {
    SlotSpace s{{tau + 1}};
    s.dims.insert(s.dims.end(), carrier.dims.begin(), carrier.dims.end());
    std::vector<int> mu_slot{0};
    const Mat mu = embed(balancing_matrix(ctx, tau, balancing_power), mu_slot, s);
    return partial_trace(mu * M, 0, s);
}

Residual check_centrality(const LevelData& ctx, int tau, int pi, int balancing_power) {
    const auto M = loop_generator(ctx, tau, pi);
    const Mat c = quantum_trace(ctx, tau, M.matrix, M.carrier, balancing_power);
    const Mat C = kron(identity(tau + 1), c);
    const double r = (C * M.matrix - M.matrix * C).norm() / std::max(1.0, M.matrix.norm());
    return {"centrality", {tau, pi, balancing_power}, r, r < 1e-10};
}

Residual check_trace_coinvariance(const LevelData& ctx, int tau, int pi) {
    const auto M = loop_generator(ctx, tau, pi);
    const Mat c = quantum_trace(ctx, tau, M.matrix, M.carrier);
    const Irrep p = irrep(ctx, pi);
    double r = 0.0;
    for (const Mat* g : {&p.E, &p.F, &p.K}) r = std::max(r, (c * *g - *g * c).norm());
    return {"trace-coinvariance", {tau, pi}, r, r < 1e-10};
}

Residual check_adjoint_covariance(const LevelData& ctx, int tau, int pi, int sigma, int sign) {
    const SlotSpace s{{tau + 1, pi + 1, sigma + 1}};
    const Mat M = embed(monodromy(ctx, tau, pi), {0, 1}, s);
    const Mat T = embed(gauge_generator(ctx, sign, tau, sigma).matrix, {0, 2}, s);
    const Mat Mt = T.inverse() * M * T;
    const double r = loop_relation_residual(ctx, tau, Mt, SlotSpace{{pi + 1, sigma + 1}});
    return {"eq4-adjoint", {tau, pi, sigma, sign}, r, r < 1e-10};
}

FusionReport check_fusion_algebra(const LevelData& ctx, const std::vector<int>& taus) {
    const int n = ctx.k + 1;
    FusionReport rep;
    rep.taus = taus;
    const ModularData md = modular_data(ctx);
    // chi[i][j]: the scalar by which c(tau = i) acts on V_j
    std::vector<std::vector<double>> chi(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto M = loop_generator(ctx, i, j);
            const Mat c = quantum_trace(ctx, i, M.matrix, M.carrier);
            const cplx lam = c.trace() / static_cast<double>(j + 1);
            rep.ratio_residual = std::max(
                {rep.ratio_residual, (c - lam * identity(j + 1)).norm(),
                 std::abs(lam - md.S(i, j) / md.S(0, j))});
            chi[i][j] = lam.real();
            rep.ratio_residual = std::max(rep.ratio_residual, std::abs(lam.imag()));
        }
    for (int a : taus)
        for (int b : taus) {
            const auto ch = clebsch_gordan(ctx, a, b);
            std::vector<int> count(n, 0);
            for (const auto& c : ch.channels) count[c.l] += 1;
            // Verlinde formula as the independent count
            for (int l = 0; l < n; ++l) {
                cplx v = 0.0;
                for (int m = 0; m < n; ++m)
                    v += md.S(a, m) * md.S(b, m) * std::conj(md.S(l, m)) / md.S(0, m);
                if (std::abs(v - static_cast<double>(count[l])) > 1e-9) rep.table_matches = false;
            }
            for (int j = 0; j < n; ++j) {
                double rhs = 0.0;
                for (int l = 0; l < n; ++l) rhs += count[l] * chi[l][j];
                rep.residual = std::max(rep.residual, std::abs(chi[a][j] * chi[b][j] - rhs));
            }
        }
    rep.pass = rep.residual < 1e-9 && rep.ratio_residual < 1e-9 && rep.table_matches;
    return rep;
}

}  // namespace qm
