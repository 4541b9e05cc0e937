#pragma once
// Matrix models of the quantum group algebra, gauge generators, link and
// loop algebras, and the quantum trace.
//
// Every operator here acts on V_aux (x) carrier with the auxiliary slot
// first. Relations with two auxiliary copies live on
// V_aux (x) V_aux (x) carrier, and X^1, X^2 denote the two embeddings.

#include <string>
#include <vector>

#include "qmoduli/qgroup_data.hpp"

namespace qm {

struct GaugeGenerator {
    int sign = +1;
    int tau = 0, pi = 0;
    Mat matrix;
};

// L+ = R_{aux,pi}, L- = (R_{pi,aux})^-1.
GaugeGenerator gauge_generator(const LevelData& ctx, int sign, int tau, int pi);

struct LoopGenerator {
    int tau = 0;
    SlotSpace carrier;
    Mat matrix;
};

// M = R_21 R_12 on V_tau (x) V_pi.
LoopGenerator loop_generator(const LevelData& ctx, int tau, int pi);

// Two-copy helpers. X acts on V_tau (x) carrier.
Mat first_copy(const Mat& X, int tau, const SlotSpace& carrier);
Mat second_copy(const Mat& X, int tau, const SlotSpace& carrier);
Mat aux_pair(const Mat& r, int tau, const SlotSpace& carrier);  // r on the two aux slots

// |R T^1 T'^2 - T'^2 T^1 R| / |T'^2 T^1 R|
double gauge_relation_residual(const LevelData& ctx, int tau, const Mat& T1, const Mat& T2,
                               const SlotSpace& carrier);
Residual check_gauge_relation(const LevelData& ctx, int sign, int tau, int pi);
Residual check_gauge_mixed(const LevelData& ctx, int tau, int pi);

// |R' M^1 R M^2 - M^2 R' M^1 R| / |M^2 R' M^1 R|
double loop_relation_residual(const LevelData& ctx, int tau, const Mat& M, const SlotSpace& carrier);
Residual check_loop_relation(const LevelData& ctx, const LoopGenerator& M);

struct LinkReport {
    int variant = -1;  // -1: nothing passed
    double residual = 0.0;
    double best_residual = 0.0;
    int best_variant = -1;
    double phi_r_residual = -1.0;
    double phi_l_residual = -1.0;
    std::vector<double> table;  // residual per variant
    bool pass = false;
};

std::string link_variant_name(int v);
int link_variant_count();
Mat link_candidate(const LevelData& ctx, int variant, int tau, int pi, int rho);
// |R' G^1 G^2 - G^2 G^1 R| / |G^2 G^1 R|
double link_relation_residual(const LevelData& ctx, int tau, const Mat& G, const SlotSpace& carrier);
LinkReport check_link_relation(const LevelData& ctx, int tau, int pi, int rho);

// partial trace over the auxiliary slot of (mu_tau (x) 1) M
Mat quantum_trace(const LevelData& ctx, int tau, const Mat& M, const SlotSpace& carrier,
                  int balancing_power = -1);

// |[1 (x) c, M]|_F / max(1, |M|_F) for c = tr_q(M)
Residual check_centrality(const LevelData& ctx, int tau, int pi, int balancing_power = -1);
// c commutes with pi(E), pi(F), pi(K)
Residual check_trace_coinvariance(const LevelData& ctx, int tau, int pi);
// Eq. 4 for T^-1 M T with T a gauge generator on an extra carrier slot
Residual check_adjoint_covariance(const LevelData& ctx, int tau, int pi, int sigma, int sign);

struct FusionReport {
    std::vector<int> taus;
    double residual = 0.0;      // character identity
    double ratio_residual = 0.0;  // eigenvalues of c against S ratios
    bool table_matches = true;  // fusion table equals CG channel counts
    bool pass = false;
};

FusionReport check_fusion_algebra(const LevelData& ctx, const std::vector<int>& taus);

}  // namespace qm
