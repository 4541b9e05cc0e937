#pragma once
// Structure constants of U_q(sl2) at level k, q = exp(i pi / (k+2)).
//
// Weight basis, highest weight first. Labels are twice the spin.
//   K v_m = q^{2m} v_m
//   E v_m = sqrt([j-m][j+m+1]) v_{m+1}
//   F v_m = sqrt([j+m][j-m+1]) v_{m-1}
//   Delta(E) = E(x)K + 1(x)E,  Delta(F) = F(x)1 + K^-1(x)F,  Delta(K) = K(x)K
//   R = q^{H(x)H/2} sum_n (q-q^-1)^n q^{n(n-1)/2} / [n]! E^n (x) F^n

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qmoduli/tensor_kit.hpp"

namespace qm {

class LabelError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class LevelCache;

struct LevelData {
    int k = 1;
    cplx q;
    Tolerance tol;
    std::shared_ptr<LevelCache> cache;

    double qnum(double n) const;          // [n]_q, real on the unit circle
    cplx qpow(double x) const;            // q^x = exp(i pi x / (k+2))
    bool admissible(int twoj) const { return twoj >= 0 && twoj <= k; }
};

LevelData make_level(int k, Tolerance tol = {});

enum class Gen { E, F, K };

// Any finite-dimensional weight module: generator images plus H weights.
struct Rep {
    Mat E, F;
    std::vector<double> w;
    int dim() const { return static_cast<int>(w.size()); }
};

struct Irrep {
    int twoj = 0;
    int dim = 1;
    Mat E, F, K;
    Rep rep() const;
};

Irrep irrep(const LevelData& ctx, int twoj);
// Same formulas without the integrability bound; used for the truncated
// channels twoj = k+1 that appear when decomposing tensor products.
Irrep module_irrep(const LevelData& ctx, int twoj);

Mat k_matrix(const LevelData& ctx, const Rep& r, double power = 1.0);
Rep tensor_rep(const LevelData& ctx, const Rep& a, const Rep& b);
Rep dual_rep(const LevelData& ctx, const Rep& r);  // xi -> r(S xi)^T
Rep direct_sum(const std::vector<Rep>& reps);

Mat coproduct_image(const LevelData& ctx, int j1, int j2, Gen g);
Mat generator_image(const LevelData& ctx, const Rep& r, Gen g);

Mat r_matrix(const LevelData& ctx, int j1, int j2);
Mat r_matrix(const LevelData& ctx, const Rep& a, const Rep& b);
// R_21 acting on V_{j1} (x) V_{j2}.
Mat r21_matrix(const LevelData& ctx, int j1, int j2);
Mat r21_matrix(const LevelData& ctx, const Rep& a, const Rep& b);
// R_21 R_12 on V_a (x) V_b.
Mat monodromy(const LevelData& ctx, int ja, int jb);
Mat monodromy(const LevelData& ctx, const Rep& a, const Rep& b);

struct Residual {
    std::string relation;
    std::vector<int> labels;
    double value = 0.0;
    bool pass = false;
};

Residual check_quasitriangularity(const LevelData& ctx, int j1, int j2);
Residual check_yang_baxter(const LevelData& ctx, int j1, int j2, int j3);
Residual check_irrep_relations(const LevelData& ctx, int twoj);
Residual check_coproduct_homomorphism(const LevelData& ctx, int j1, int j2);
Residual check_monodromy_spectrum(const LevelData& ctx, int j1, int j2);

// mu_j = K^power; the quantum trace uses power = -1.
Mat balancing_matrix(const LevelData& ctx, int twoj, int power = -1);

// theta_j = q^{twoj(twoj+2)/2}, raised to dir = +-1.
cplx ribbon_phase(const LevelData& ctx, int twoj, int dir = 1);

struct CGChannel {
    int l = 0;
    Mat C;  // V_l -> V_{j1} (x) V_{j2}, intertwines Delta
    Mat P;  // V_{j1} (x) V_{j2} -> V_l, P C = 1, kills the other channels
};

struct CGDecomposition {
    std::vector<CGChannel> channels;  // admissible channels only
    bool semisimple = true;           // full decomposition exists
    double intertwining_residual = 0.0;
};

// Channels of V_{j1} (x) V_{j2}: |j1-j2| <= l <= min(j1+j2, k-j1-j2) (in
// twice-spin units l <= min(j1+j2, 2k-j1-j2)). Intertwiners are normalized
// so that the highest-weight column is a unit vector. They are generally
// not orthogonal at |q| = 1 (see README).
CGDecomposition clebsch_gordan(const LevelData& ctx, int j1, int j2);
// General form with module labels allowed up to k+1.
CGDecomposition clebsch_gordan_full(const LevelData& ctx, int j1, int j2, bool admissible_only);

std::vector<int> fusion_channels(int k, int j1, int j2);

// S[a][b] / S[0][b] extended to every label b >= 0:
//   sum_{m=-a/2..a/2} cos(2 pi m (b+1)/(k+2)).
double character(int k, int a, int b);

struct ModularData {
    int k = 1;
    Mat S, T;
    std::vector<std::vector<std::vector<int>>> fusion;
    std::vector<double> qdims;
    std::vector<cplx> twists;
    double verlinde_residual = 0.0;
    double unitarity_residual = 0.0;
    double s_squared_residual = 0.0;
};

ModularData modular_data(const LevelData& ctx);

// Per-level memo of irreps and R-matrices. Readers may duplicate work but
// always see complete values.
class LevelCache {
public:
    std::shared_ptr<const Mat> find(const std::string& key) const;
    std::shared_ptr<const Mat> insert(const std::string& key, Mat value);

private:
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const Mat>> store_;
};

}  // namespace qm
