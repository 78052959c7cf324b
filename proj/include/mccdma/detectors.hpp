#pragma once

#include "mccdma/mapping.hpp"
#include "mccdma/spreading.hpp"
#include "mccdma/types.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace mccdma {

enum class DetectorKind { EGC, MMSEC, GMMSE, PolyGMMSE, PIC, SIC };
enum class PolyMode { ExactMse, Asymptotic };
enum class Decision { Hard, Soft };
enum class StageEqualizer { EGC, MMSEC, MRC };

/// Which detector to run and how.
///
/// `stage_equalizer[i]` is the single-user equalizer of IC stage i; stages
/// beyond the list reuse its last entry. For PIC, `stages` counts stage 0,
/// so stages = 2 is one cancellation stage. For SIC, `stages` bounds the
/// number of successive cancellations (the default covers every code).
/// `genie` replaces PIC's previous-stage decisions with the transmitted
/// symbols.
struct DetectorSpec {
    DetectorKind kind = DetectorKind::MMSEC;
    int poly_order = 3;
    PolyMode poly_mode = PolyMode::ExactMse;
    int stages = 1;
    Decision decision = Decision::Hard;
    std::vector<StageEqualizer> stage_equalizer{StageEqualizer::MMSEC};
    bool genie = false;

    static DetectorSpec defaults(DetectorKind kind);
    StageEqualizer equalizer_for_stage(int stage) const;

    bool operator==(const DetectorSpec&) const = default;
};

void validate(const DetectorSpec& spec);

/// Parses `name[:option]*`, e.g. "gmmse", "poly:L=4:mode=asymptotic",
/// "pic:stages=3:decision=soft:eq=mmsec+mrc", "pic:genie".
DetectorSpec parse_detector(const std::string& text);
/// Canonical form: the name followed by every non-default option.
std::string to_string(const DetectorSpec& spec);
std::string to_string(DetectorKind kind);

/// One sub-band of the received signal: y = diag(h) C d + n.
struct SubbandProblem {
    std::span<const cplx> y;   // S_F received chips
    std::span<const cplx> h;   // S_F channel gains
    const CodeMatrix* codes = nullptr;
    double noise_var = 0.0;
    double symbol_energy = 1.0;

    int sf() const { return codes->spreading_factor(); }
    int users() const { return codes->n_codes(); }
};

void validate(const SubbandProblem& problem);

struct DetectionResult {
    CVec d_hat;                    // K symbol estimates
    std::vector<double> noise_var; // K post-detection error variances
};

/// Per-carrier equalizer gains.
///
/// EGC:   g_l = H_l^* / |H_l| (zero where H_l = 0).
/// MMSEC: g_l = rho H_l^* / (|H_l|^2 + 1/gamma_c),
///        rho = S_F / sum_n |H_n|^2 / (|H_n|^2 + 1/gamma_c),
///        gamma_c = E_s K / (S_F sigma^2) for `active_users` = K.
/// MRC:   g_l = H_l^* S_F / sum_n |H_n|^2.
CVec equalizer_gains(StageEqualizer eq, std::span<const cplx> h, double noise_var, int active_users, double symbol_energy = 1.0);

DetectionResult egc(const SubbandProblem& problem);
DetectionResult mmsec(const SubbandProblem& problem);

/// Matched filter followed by a K x K MMSE solve, each output scaled to
/// unit desired-signal gain.
DetectionResult gmmse(const SubbandProblem& problem);

/// Unnormalized K x S_F GMMSE filter (A^H A + sigma^2/E_s I)^-1 A^H with
/// A = diag(h) C. Falls back to the pseudo-inverse when sigma^2 = 0.
Eigen::MatrixXcd gmmse_filter(const SubbandProblem& problem);

/// Unnormalized K x S_F polynomial filter with rows u_k^H p(M), where
/// M = A A^H, u_k = A e_k and p has degree L - 1 with coefficients shared
/// by all users.
///
/// ExactMse minimizes sum_k E|u_k^H p(M) y - d_k|^2 given the actual M.
/// The criterion depends on M only through its eigenvalues l_e:
///
///     sum_e w_e (p(l_e) - t_e)^2,  w_e = l_e (E_s l_e + sigma^2),
///                                  t_e = E_s / (E_s l_e + sigma^2),
///
/// which is solved as a weighted least-squares fit in a Chebyshev basis
/// (minimum-norm solution, so rank deficiency lowers the effective order).
///
/// Asymptotic replaces tr(M^n) in the same normal equations by their
/// large-system values for isometric codes: the free cumulants of the
/// empirical |h_l|^2 distribution are scaled by alpha^(n-1) (alpha = K/S_F,
/// free compression), turned back into moments and multiplied by K. Only
/// |h_l|^2 moments and the load enter the coefficients.
Eigen::MatrixXcd poly_gmmse_filter(const SubbandProblem& problem, int order, PolyMode mode);

DetectionResult poly_gmmse(const SubbandProblem& problem, int order, PolyMode mode);

/// Parallel interference cancellation. `truth` must hold the K transmitted
/// symbols when spec.genie is set.
DetectionResult pic(const SubbandProblem& problem, const DetectorSpec& spec, const Constellation& constellation,
                    std::span<const cplx> truth = {});

/// Successive interference cancellation.
///
/// Each step equalizes the residual for the codes still present, detects
/// the one with the highest post-equalization SINR (ties go to the lowest
/// code index), decides it and subtracts its reconstruction. A
/// `desired_user` >= 0 is never cancelled: it is detected last, from the
/// residual left after its interferers are removed. Once `spec.stages`
/// cancellations are done the remaining codes are detected together.
DetectionResult sic(const SubbandProblem& problem, const DetectorSpec& spec, const Constellation& constellation,
                    int desired_user = -1);

/// Runs the detector selected by `spec`.
DetectionResult detect(const SubbandProblem& problem, const DetectorSpec& spec, const Constellation& constellation,
                       std::span<const cplx> truth = {}, int desired_user = -1);

/// Error variance of a linear estimate d_hat = W y:
/// sigma^2 |W_k|^2 + E_s sum_{j != k} |T_kj|^2 + E_s |T_kk - 1|^2 with T = W A.
std::vector<double> post_detection_noise_var(const SubbandProblem& problem, const Eigen::MatrixXcd& W);

/// Same for a per-carrier equalizer followed by despreading.
std::vector<double> post_detection_noise_var(const SubbandProblem& problem, std::span<const cplx> gains);

/// A = diag(h) C as a dense matrix.
Eigen::MatrixXcd effective_codes(const SubbandProblem& problem);

/// Free cumulants from moments m_1..m_n (m_0 = 1 implied) and back.
std::vector<double> free_cumulants(const std::vector<double>& moments);
std::vector<double> moments_from_free_cumulants(const std::vector<double>& cumulants);

} // namespace mccdma
