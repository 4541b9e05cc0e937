#pragma once
// Multiloop, handle and graph algebras as concrete matrix families, the
// braid and mapping-class actions, and the twist map V[.].
//
// Carrier layout: slot 0 is V_aux, slots 1..N are the punctures V_{j_nu},
// then one slot W per handle.

#include <map>
#include <string>
#include <vector>

#include "qmoduli/dual_products.hpp"
#include "qmoduli/words.hpp"

namespace qm {

struct SurfaceSignature {
    int genus = 0;
    int punctures = 0;
    std::vector<int> spins;
    int aux = 1;
};

void validate(const LevelData& ctx, const SurfaceSignature& sig);

// Artin action of sigma_rho on pi_1 of the punctured disc.
enum class ArtinConvention {
    Printed = 0,        // l_r -> l_{r+1},  l_{r+1} -> l_{r+1}^-1 l_r l_{r+1}
    PrintedInverse = 1,  // l_{r+1} -> l_r,  l_r -> l_r l_{r+1} l_r^-1
    Mirror = 2,          // l_r -> l_{r+1},  l_{r+1} -> l_{r+1} l_r l_{r+1}^-1
    MirrorInverse = 3,   // l_{r+1} -> l_r,  l_r -> l_r^-1 l_{r+1} l_r
};
std::string artin_name(ArtinConvention c);

struct ArbitrationRow {
    std::string name;
    double residual = 0.0;
    bool pass = false;
};

struct ConventionReport {
    int monodromy_dressing = -1;
    int handle_B_variant = -1;  // -1: no variant passed
    int ribbon_direction = +1;
    int balancing_power = -1;
    int artin_convention = static_cast<int>(ArtinConvention::MirrorInverse);
    int eta_convention = 1;
    int pair_order = 1;  // 1: v_{nu mu} twists along l_mu l_nu
    std::string V_normalization = "sum_l theta_l P_l";
    std::string created;
    std::map<std::string, std::vector<ArbitrationRow>> tables;
};

class ArbitrationFailure : public std::runtime_error {
public:
    ArbitrationFailure(const std::string& what, std::vector<ArbitrationRow> table)
        : std::runtime_error(what), table(std::move(table)) {}
    std::vector<ArbitrationRow> table;
};

class NotSemisimple : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GeneratorFamily {
    SurfaceSignature signature;
    SlotSpace carrier;
    std::vector<Mat> M, A, B;
    ConventionReport conventions;
};

// ---- multiloop ----

// Dressing variants: bit0 picks R_{i0} (0) or R_{0i} (1) as the factor on
// slot i, bit1 inverts the factors, bit2 reverses the product order.
// The product runs over i = 1..nu-1 in increasing order before bit2.
int dressing_variant_count();
std::string dressing_name(int v);
GeneratorFamily build_multiloop(const LevelData& ctx, const SurfaceSignature& sig, int dressing);

struct FamilyCheck {
    double eq4 = 0.0;       // worst single-generator loop relation
    double exchange = 0.0;  // worst braided exchange relation
    double handle = 0.0;    // worst handle pair relation
    double mixed = 0.0;     // worst mixed relation across blocks
    bool pass(double tol) const { return eq4 < tol && exchange < tol && handle < tol && mixed < tol; }
};
// |R^-1 X^1 R Y^2 - Y^2 R^-1 X^1 R| / |Y^2 R^-1 X^1 R|
double exchange_residual(const LevelData& ctx, int tau, const Mat& X, const Mat& Y,
                         const SlotSpace& carrier);
// |R^-1 A^1 R B^2 - B^2 R' A^1 R| / |B^2 R' A^1 R|
double handle_residual(const LevelData& ctx, int tau, const Mat& A, const Mat& B,
                       const SlotSpace& carrier);
FamilyCheck check_family(const LevelData& ctx, const GeneratorFamily& f);

// Runs the dressing sweep on probe signatures and returns the unique
// passing variant; throws ArbitrationFailure otherwise.
int arbitrate_dressing(const LevelData& ctx, int aux, std::vector<ArbitrationRow>* table = nullptr);

GeneratorFamily multiloop_generators(const LevelData& ctx, const SurfaceSignature& sig,
                                     const ConventionReport& conv);

// ---- handle ----

struct HandleModel {
    int aux = 1;
    int dimW = 1;
    std::vector<int> block_offset;  // offset of V_b (x) V_b inside W
    Mat A, B;                        // on V_aux (x) W
    int variant = -1;
    std::vector<ArbitrationRow> table;
};

int handle_variant_count();
std::string handle_variant_name(int v);
Rep handle_factor_rep(const LevelData& ctx, int which);  // 0: left factor, 1: right factor
Mat handle_A(const LevelData& ctx, int aux);
Mat handle_B_candidate(const LevelData& ctx, int aux, int variant);
// Arbitrates B; on failure throws ArbitrationFailure with the variant table.
HandleModel handle_generators(const LevelData& ctx, int aux);

struct HandleCertificate {
    int unknowns = 0;
    int solution_dim = 0;   // dimension of the space of B solving the handle relation
    int max_rank = 0;       // rank of a generic solution
    int full_rank = 0;
};
// Solves the (linear) handle relation for B over all matrices on V_aux (x) W.
HandleCertificate handle_certificate(const LevelData& ctx, int aux);

GeneratorFamily graph_generators(const LevelData& ctx, const SurfaceSignature& sig,
                                 const ConventionReport& conv);

// ---- words, braids and twists ----

Mat holonomy(const GeneratorFamily& f, const LoopWord& w);

LoopWord artin_act(const LoopWord& w, const BraidWord& braid, ArtinConvention c);
GeneratorFamily braid_act(const LevelData& ctx, const GeneratorFamily& f, int rho, int exp = 1);

// R-matrix braid representation on V_{j_1} (x) ... (x) V_{j_N}. The output
// space carries the permuted spins.
Mat braid_matrix_oracle(const LevelData& ctx, const std::vector<int>& spins, const BraidWord& w);

struct TwistResult {
    Mat v;
    std::vector<int> labels;       // matched charges
    double diagonalizable = 0.0;   // |prod (W - chi_l)| / |W|^n
};
// V[tr_q(M(p))] = sum_l theta_l^dir P_l with Frobenius-covariant projectors.
TwistResult twist_operator(const LevelData& ctx, const GeneratorFamily& f, const LoopWord& p);
TwistResult twist_from_trace(const LevelData& ctx, int aux, const Mat& Wp, int dir);

LoopWord pair_word(int nu, int mu, int pair_order);
Mat pure_braid_rep(const LevelData& ctx, const GeneratorFamily& f, const PureWord& w);

struct InnerAutomorphismReport {
    double residual = 0.0;
    std::vector<double> per_generator;
};
InnerAutomorphismReport check_inner_automorphism(const LevelData& ctx, const GeneratorFamily& f,
                                                 const PureWord& eta);

// Twist curves are read in path order and composed in operator order
// according to conventions.pair_order (1 reverses the letters).
Mat mcg_rep(const LevelData& ctx, const GeneratorFamily& f, const TwistWord& w);

// Unitarity of twist images with respect to an invariant positive form on
// each integrable highest-weight multiplicity space of the punctures.
struct UnitarityReport {
    double residual = 0.0;          // worst over charges (0 = unitary)
    double standard_adjoint = 0.0;  // worst |U^H U - 1|_F in the tensor basis
    std::vector<int> charges;
};
UnitarityReport check_unitarity(const LevelData& ctx, const std::vector<int>& spins,
                                const std::vector<Mat>& ops);
// number of admissible fusion paths from the spins to total charge L
int fusion_paths(int k, const std::vector<int>& spins, int L);

struct FlatnessReport {
    bool available = false;
    std::string reason;
    double block_scalar = 0.0;
    int trivial_block_dim = 0;
    double twist_match = 0.0;
    Mat trivial_basis;  // orthonormal columns spanning the trivial-charge block
    bool pass = false;
};
FlatnessReport flatness_check(const LevelData& ctx, const GeneratorFamily& torus);

// Arbitrates every convention the constructions depend on.
ConventionReport arbitrate_all(const LevelData& ctx, int aux);
// Re-runs the arbitration probes for the recorded conventions only (used on
// loaded or user-fixed reports). The handle variant is not included.
std::vector<ArbitrationRow> confirm_conventions(const LevelData& ctx, int aux, const ConventionReport& conv);

}  // namespace qm
