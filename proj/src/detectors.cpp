#include "mccdma/detectors.hpp"

#include "mccdma/channel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace mccdma {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    return out;
}

StageEqualizer parse_equalizer(const std::string& s)
{
    const auto v = lower(s);
    if (v == "egc")
        return StageEqualizer::EGC;
    if (v == "mmsec")
        return StageEqualizer::MMSEC;
    if (v == "mrc")
        return StageEqualizer::MRC;
    throw ConfigError("unknown stage equalizer '" + s + "'");
}

std::string equalizer_name(StageEqualizer e)
{
    switch (e) {
    case StageEqualizer::EGC:
        return "egc";
    case StageEqualizer::MMSEC:
        return "mmsec";
    case StageEqualizer::MRC:
        return "mrc";
    }
    return "mmsec";
}

Eigen::Map<const VectorXcd> as_eigen(std::span<const cplx> v)
{
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

double mean_square(std::span<const cplx> g)
{
    double s = 0.0;
    for (const auto& x : g)
        s += std::norm(x);
    return s / static_cast<double>(g.size());
}

// Equalize per carrier, then despread through the fast transform.
CVec equalize_despread(const SubbandProblem& pb, std::span<const cplx> gains, std::span<const cplx> y)
{
    CVec eq(y.size());
    for (std::size_t l = 0; l < y.size(); ++l)
        eq[l] = gains[l] * y[l];
    return pb.codes->despread(eq);
}

// Symbol coupling T = C^H diag(g h) C, row-major K x K.
CVec diagonal_coupling(const SubbandProblem& pb, std::span<const cplx> gains)
{
    CVec gh(gains.size());
    for (std::size_t l = 0; l < gains.size(); ++l)
        gh[l] = gains[l] * pb.h[l];
    const auto k = static_cast<std::size_t>(pb.users());
    CVec t(k * k);
    pb.codes->coupling(gh, t);
    return t;
}

DetectionResult diagonal_detect(const SubbandProblem& pb, const CVec& gains)
{
    return {equalize_despread(pb, gains, pb.y), post_detection_noise_var(pb, gains)};
}

DetectionResult linear_detect(const SubbandProblem& pb, MatrixXcd W)
{
    const MatrixXcd A = effective_codes(pb);
    const MatrixXcd T = W * A;
    for (Eigen::Index k = 0; k < W.rows(); ++k) {
        const cplx gain = T(k, k);
        if (std::abs(gain) > 1e-14)
            W.row(k) /= gain;
    }
    const VectorXcd d = W * as_eigen(pb.y);
    return {CVec(d.data(), d.data() + d.size()), post_detection_noise_var(pb, W)};
}

cplx decide(cplx estimate, Decision decision, const Constellation& constellation)
{
    return decision == Decision::Hard ? constellation.slice(estimate) : constellation.clip(estimate);
}

// Chebyshev weighted least-squares fit of the MMSE target on M's spectrum.
MatrixXcd exact_poly_matrix(const SubbandProblem& pb, const MatrixXcd& M, int order)
{
    const auto sf = M.rows();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    const VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const double lmax = lam.maxCoeff();
    if (!(lmax > 0.0))
        return MatrixXcd::Zero(sf, sf);

    std::vector<double> pts;
    for (Eigen::Index e = 0; e < lam.size(); ++e)
        if (lam(e) > 1e-12 * lmax)
            pts.push_back(lam(e));

    const double es_ = pb.symbol_energy;
    const double s2 = pb.noise_var;
    const auto n = static_cast<Eigen::Index>(pts.size());
    MatrixXd V(n, order);
    VectorXd rhs(n);
    for (Eigen::Index e = 0; e < n; ++e) {
        const double l = pts[static_cast<std::size_t>(e)];
        const double w = std::sqrt(l * (es_ * l + s2));
        const double x = 2.0 * l / lmax - 1.0;
        double t_prev2 = 0.0, t_prev1 = 0.0;
        for (int i = 0; i < order; ++i) {
            const double ti = i == 0 ? 1.0 : (i == 1 ? x : 2.0 * x * t_prev1 - t_prev2);
            V(e, i) = w * ti;
            t_prev2 = t_prev1;
            t_prev1 = ti;
        }
        rhs(e) = w * es_ / (es_ * l + s2);
    }
    const VectorXd b = V.completeOrthogonalDecomposition().solve(rhs);

    // Clenshaw recurrence with X = 2 M / lmax - I.
    const MatrixXcd I = MatrixXcd::Identity(sf, sf);
    const MatrixXcd X = (2.0 / lmax) * M - I;
    MatrixXcd b1 = MatrixXcd::Zero(sf, sf), b2 = MatrixXcd::Zero(sf, sf);
    for (int i = order - 1; i >= 1; --i) {
        MatrixXcd b0 = b(i) * I + 2.0 * X * b1 - b2;
        b2 = std::move(b1);
        b1 = std::move(b0);
    }
    return b(0) * I + X * b1 - b2;
}

MatrixXcd asymptotic_poly_matrix(const SubbandProblem& pb, const MatrixXcd& M, int order)
{
    const auto sf = M.rows();
    const int n_mom = 2 * order;
    std::vector<double> mom(static_cast<std::size_t>(n_mom), 0.0);
    for (const auto& h : pb.h) {
        const double p = std::norm(h);
        double acc = 1.0;
        for (int i = 0; i < n_mom; ++i) {
            acc *= p;
            mom[static_cast<std::size_t>(i)] += acc;
        }
    }
    for (auto& m : mom)
        m /= static_cast<double>(pb.h.size());
    if (!(mom[0] > 0.0))
        return MatrixXcd::Zero(sf, sf);

    const double alpha = static_cast<double>(pb.users()) / pb.sf();
    auto kappa = free_cumulants(mom);
    double a_pow = 1.0;
    for (auto& k : kappa) {
        k *= a_pow;
        a_pow *= alpha;
    }
    const auto comp = moments_from_free_cumulants(kappa);  // compressed moments

    // Work in the scaled variable M / s to keep the Hankel system balanced.
    const double s = comp[0];
    std::vector<double> tau(static_cast<std::size_t>(n_mom) + 1);
    double sp = 1.0;
    for (int i = 1; i <= n_mom; ++i) {
        sp *= s;
        tau[static_cast<std::size_t>(i)] = pb.users() * comp[static_cast<std::size_t>(i - 1)] / sp;
    }
    const double es_ = pb.symbol_energy;
    const double s2 = pb.noise_var;
    MatrixXd H(order, order);
    VectorXd v(order);
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
            const auto p = static_cast<std::size_t>(i + j + 1);
            H(i, j) = es_ * s * tau[p + 1] + s2 * tau[p];
        }
        v(i) = es_ * tau[static_cast<std::size_t>(i + 1)];
    }
    const VectorXd scale = H.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const MatrixXd Hs = scale.asDiagonal() * H * scale.asDiagonal();
    const VectorXd a = scale.asDiagonal() * Hs.completeOrthogonalDecomposition().solve(scale.asDiagonal() * v);

    const MatrixXcd Ms = M / s;
    MatrixXcd P = a(order - 1) * MatrixXcd::Identity(sf, sf);
    for (int i = order - 2; i >= 0; --i) {
        P = P * Ms;
        P.diagonal().array() += a(i);
    }
    return P;
}

} // namespace

// ---------------------------------------------------------------------------
// DetectorSpec

DetectorSpec DetectorSpec::defaults(DetectorKind kind)
{
    DetectorSpec s;
    s.kind = kind;
    if (kind == DetectorKind::PIC)
        s.stages = 2;
    else if (kind == DetectorKind::SIC)
        s.stages = std::numeric_limits<int>::max();
    return s;
}

StageEqualizer DetectorSpec::equalizer_for_stage(int stage) const
{
    const auto i = std::min(static_cast<std::size_t>(std::max(stage, 0)), stage_equalizer.size() - 1);
    return stage_equalizer[i];
}

void validate(const DetectorSpec& s)
{
    if (s.poly_order < 1)
        throw ConfigError("polynomial order L must be >= 1");
    if (s.stages < 1)
        throw ConfigError("stage count must be >= 1");
    if (s.stage_equalizer.empty())
        throw ConfigError("at least one stage equalizer is required");
    if (s.genie && s.kind != DetectorKind::PIC)
        throw ConfigError("genie decisions are only defined for PIC");
}

std::string to_string(DetectorKind kind)
{
    switch (kind) {
    case DetectorKind::EGC:
        return "egc";
    case DetectorKind::MMSEC:
        return "mmsec";
    case DetectorKind::GMMSE:
        return "gmmse";
    case DetectorKind::PolyGMMSE:
        return "poly";
    case DetectorKind::PIC:
        return "pic";
    case DetectorKind::SIC:
        return "sic";
    }
    return "mmsec";
}

DetectorSpec parse_detector(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.empty() || parts[0].empty())
        throw ConfigError("empty detector specification");
    const auto name = lower(parts[0]);
    DetectorKind kind;
    if (name == "egc")
        kind = DetectorKind::EGC;
    else if (name == "mmsec")
        kind = DetectorKind::MMSEC;
    else if (name == "gmmse")
        kind = DetectorKind::GMMSE;
    else if (name == "poly" || name == "poly_gmmse")
        kind = DetectorKind::PolyGMMSE;
    else if (name == "pic")
        kind = DetectorKind::PIC;
    else if (name == "sic")
        kind = DetectorKind::SIC;
    else
        throw ConfigError("unknown detector '" + parts[0] + "'");

    auto spec = DetectorSpec::defaults(kind);
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto& opt = parts[i];
        const auto eq = opt.find('=');
        const auto key = lower(opt.substr(0, eq));
        const auto value = eq == std::string::npos ? std::string{} : opt.substr(eq + 1);
        try {
            if (key == "genie" && eq == std::string::npos)
                spec.genie = true;
            else if (key == "l")
                spec.poly_order = std::stoi(value);
            else if (key == "mode") {
                const auto v = lower(value);
                if (v == "exact" || v == "exact_mse")
                    spec.poly_mode = PolyMode::ExactMse;
                else if (v == "asymptotic")
                    spec.poly_mode = PolyMode::Asymptotic;
                else
                    throw ConfigError("unknown polynomial mode '" + value + "'");
            } else if (key == "stages")
                spec.stages = std::stoi(value);
            else if (key == "decision") {
                const auto v = lower(value);
                if (v == "hard")
                    spec.decision = Decision::Hard;
                else if (v == "soft")
                    spec.decision = Decision::Soft;
                else
                    throw ConfigError("unknown decision '" + value + "'");
            } else if (key == "eq") {
                spec.stage_equalizer.clear();
                for (const auto& e : split(value, '+'))
                    spec.stage_equalizer.push_back(parse_equalizer(e));
            } else
                throw ConfigError("unknown detector option '" + opt + "'");
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ConfigError*>(&e))
                throw;
            throw ConfigError("invalid detector option '" + opt + "'");
        }
    }
    validate(spec);
    return spec;
}

std::string to_string(const DetectorSpec& s)
{
    const auto d = DetectorSpec::defaults(s.kind);
    std::string out = to_string(s.kind);
    if (s.kind == DetectorKind::PolyGMMSE) {
        out += ":L=" + std::to_string(s.poly_order);
        out += s.poly_mode == PolyMode::ExactMse ? ":mode=exact" : ":mode=asymptotic";
    }
    if (s.kind == DetectorKind::PIC || s.kind == DetectorKind::SIC) {
        if (s.stages != d.stages)
            out += ":stages=" + std::to_string(s.stages);
        if (s.decision != d.decision)
            out += s.decision == Decision::Hard ? ":decision=hard" : ":decision=soft";
        if (s.stage_equalizer != d.stage_equalizer) {
            out += ":eq=";
            for (std::size_t i = 0; i < s.stage_equalizer.size(); ++i)
                out += (i ? "+" : "") + equalizer_name(s.stage_equalizer[i]);
        }
        if (s.genie)
            out += ":genie";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Building blocks

void validate(const SubbandProblem& pb)
{
    if (pb.codes == nullptr)
        throw ConfigError("sub-band problem has no code matrix");
    const auto sf = static_cast<std::size_t>(pb.sf());
    if (pb.y.size() != sf || pb.h.size() != sf)
        throw ConfigError("sub-band problem: y and h must have S_F entries");
    if (!(pb.noise_var >= 0.0))
        throw ConfigError("sub-band problem: noise variance must be non-negative");
    if (!(pb.symbol_energy > 0.0))
        throw ConfigError("sub-band problem: symbol energy must be positive");
}

Eigen::MatrixXcd effective_codes(const SubbandProblem& pb)
{
    const int sf = pb.sf(), k = pb.users();
    MatrixXcd A(sf, k);
    for (int l = 0; l < sf; ++l)
        for (int j = 0; j < k; ++j)
            A(l, j) = pb.h[static_cast<std::size_t>(l)] * pb.codes->chip(l, j);
    return A;
}

CVec equalizer_gains(StageEqualizer eq, std::span<const cplx> h, double noise_var, int active_users, double symbol_energy)
{
    const auto sf = h.size();
    CVec g(sf);
    switch (eq) {
    case StageEqualizer::EGC:
        for (std::size_t l = 0; l < sf; ++l) {
            const double a = std::abs(h[l]);
            g[l] = a > 0.0 ? std::conj(h[l]) / a : cplx{};
        }
        break;
    case StageEqualizer::MMSEC: {
        const double inv_gamma = 1.0 / subcarrier_snr(noise_var, active_users, static_cast<int>(sf), symbol_energy);
        double denom = 0.0;
        for (std::size_t l = 0; l < sf; ++l) {
            const double p = std::norm(h[l]);
            const double d = p + inv_gamma;
            if (d > 0.0) {
                g[l] = std::conj(h[l]) / d;
                denom += p / d;
            }
        }
        const double rho = denom > 0.0 ? static_cast<double>(sf) / denom : 0.0;
        for (auto& x : g)
            x *= rho;
        break;
    }
    case StageEqualizer::MRC: {
        double energy = 0.0;
        for (const auto& x : h)
            energy += std::norm(x);
        const double s = energy > 0.0 ? static_cast<double>(sf) / energy : 0.0;
        for (std::size_t l = 0; l < sf; ++l)
            g[l] = std::conj(h[l]) * s;
        break;
    }
    }
    return g;
}

std::vector<double> post_detection_noise_var(const SubbandProblem& pb, const Eigen::MatrixXcd& W)
{
    const MatrixXcd T = W * effective_codes(pb);
    std::vector<double> var(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index k = 0; k < W.rows(); ++k) {
        double mai = 0.0;
        for (Eigen::Index j = 0; j < T.cols(); ++j)
            mai += j == k ? std::norm(T(k, k) - 1.0) : std::norm(T(k, j));
        var[static_cast<std::size_t>(k)] = pb.noise_var * W.row(k).squaredNorm() + pb.symbol_energy * mai;
    }
    return var;
}

std::vector<double> post_detection_noise_var(const SubbandProblem& pb, std::span<const cplx> gains)
{
    const auto k = static_cast<std::size_t>(pb.users());
    const CVec t = diagonal_coupling(pb, gains);
    // Walsh chips all have magnitude 1/sqrt(S_F): |w_k|^2 = mean |g_l|^2.
    const double noise = pb.noise_var * mean_square(gains);
    std::vector<double> var(k);
    for (std::size_t a = 0; a < k; ++a) {
        double mai = 0.0;
        for (std::size_t b = 0; b < k; ++b)
            mai += a == b ? std::norm(t[a * k + a] - 1.0) : std::norm(t[a * k + b]);
        var[a] = noise + pb.symbol_energy * mai;
    }
    return var;
}

std::vector<double> free_cumulants(const std::vector<double>& moments)
{
    const auto n = moments.size();
    std::vector<double> mm(n + 1);
    mm[0] = 1.0;
    std::copy(moments.begin(), moments.end(), mm.begin() + 1);

    // powers[s][d] = [x^d] M(x)^s, M(x) = sum_i m_i x^i
    std::vector<std::vector<double>> powers(n + 1, std::vector<double>(n + 1, 0.0));
    powers[0][0] = 1.0;
    for (std::size_t s = 1; s <= n; ++s)
        for (std::size_t d = 0; d <= n; ++d)
            for (std::size_t i = 0; i <= d; ++i)
                powers[s][d] += powers[s - 1][d - i] * mm[i];

    std::vector<double> kappa(n);
    for (std::size_t m = 1; m <= n; ++m) {
        double acc = mm[m];
        for (std::size_t s = 1; s < m; ++s)
            acc -= kappa[s - 1] * powers[s][m - s];
        kappa[m - 1] = acc;
    }
    return kappa;
}

std::vector<double> moments_from_free_cumulants(const std::vector<double>& cumulants)
{
    const auto n = cumulants.size();
    std::vector<double> mm(n + 1, 0.0);
    mm[0] = 1.0;
    for (std::size_t m = 1; m <= n; ++m) {
        // Coefficients of M(x)^s up to degree m-1 only involve m_0..m_{m-1}.
        std::vector<std::vector<double>> powers(m + 1, std::vector<double>(m, 0.0));
        powers[0][0] = 1.0;
        for (std::size_t s = 1; s <= m; ++s)
            for (std::size_t d = 0; d < m; ++d)
                for (std::size_t i = 0; i <= d; ++i)
                    powers[s][d] += powers[s - 1][d - i] * mm[i];
        double acc = 0.0;
        for (std::size_t s = 1; s <= m; ++s)
            acc += cumulants[s - 1] * powers[s][m - s];
        mm[m] = acc;
    }
    return {mm.begin() + 1, mm.end()};
}

// ---------------------------------------------------------------------------
// Detectors

DetectionResult egc(const SubbandProblem& pb)
{
    validate(pb);
    return diagonal_detect(pb, equalizer_gains(StageEqualizer::EGC, pb.h, pb.noise_var, pb.users(), pb.symbol_energy));
}

DetectionResult mmsec(const SubbandProblem& pb)
{
    validate(pb);
    return diagonal_detect(pb, equalizer_gains(StageEqualizer::MMSEC, pb.h, pb.noise_var, pb.users(), pb.symbol_energy));
}

Eigen::MatrixXcd gmmse_filter(const SubbandProblem& pb)
{
    validate(pb);
    const MatrixXcd A = effective_codes(pb);
    const double lambda = pb.noise_var / pb.symbol_energy;
    if (lambda > 0.0) {
        MatrixXcd gram = A.adjoint() * A;
        gram.diagonal().array() += lambda;
        return gram.llt().solve(A.adjoint());
    }
    return A.completeOrthogonalDecomposition().pseudoInverse();
}

DetectionResult gmmse(const SubbandProblem& pb)
{
    return linear_detect(pb, gmmse_filter(pb));
}

Eigen::MatrixXcd poly_gmmse_filter(const SubbandProblem& pb, int order, PolyMode mode)
{
    validate(pb);
    if (order < 1)
        throw ConfigError("polynomial order L must be >= 1");
    const MatrixXcd A = effective_codes(pb);
    const MatrixXcd M = A * A.adjoint();
    const MatrixXcd P = mode == PolyMode::ExactMse ? exact_poly_matrix(pb, M, order) : asymptotic_poly_matrix(pb, M, order);
    return A.adjoint() * P;
}

DetectionResult poly_gmmse(const SubbandProblem& pb, int order, PolyMode mode)
{
    return linear_detect(pb, poly_gmmse_filter(pb, order, mode));
}

DetectionResult pic(const SubbandProblem& pb, const DetectorSpec& spec, const Constellation& constellation, std::span<const cplx> truth)
{
    validate(pb);
    validate(spec);
    const auto k = static_cast<std::size_t>(pb.users());
    const auto sf = static_cast<std::size_t>(pb.sf());
    if (spec.genie && truth.size() != k)
        throw ConfigError("genie PIC needs the transmitted symbols");

    // Stage 0: plain single-user detection of all codes.
    CVec gains = equalizer_gains(spec.equalizer_for_stage(0), pb.h, pb.noise_var, pb.users(), pb.symbol_energy);
    CVec est = equalize_despread(pb, gains, pb.y);
    if (spec.stages == 1)
        return {est, post_detection_noise_var(pb, gains)};

    CVec prev(k), chips(sf), residual(sf);
    for (int stage = 1; stage < spec.stages; ++stage) {
        for (std::size_t j = 0; j < k; ++j)
            prev[j] = spec.genie ? truth[j] : decide(est[j], spec.decision, constellation);

        // The residual for user k is y - H sum_{j != k} d_j c_j = z + H c_k d_k,
        // with z the full-reconstruction residual.
        pb.codes->spread(prev, chips);
        for (std::size_t l = 0; l < sf; ++l)
            residual[l] = pb.y[l] - pb.h[l] * chips[l];

        // After cancellation the residual is treated as a single-user signal.
        gains = equalizer_gains(spec.equalizer_for_stage(stage), pb.h, pb.noise_var, 1, pb.symbol_energy);
        const CVec z = equalize_despread(pb, gains, residual);
        cplx self_gain{};
        for (std::size_t l = 0; l < sf; ++l)
            self_gain += gains[l] * pb.h[l];
        self_gain /= static_cast<double>(sf);
        for (std::size_t j = 0; j < k; ++j)
            est[j] = z[j] + self_gain * prev[j];
    }

    // Interference is assumed cancelled: noise plus any gain mismatch remain.
    const double noise = pb.noise_var * mean_square(gains);
    cplx self_gain{};
    for (std::size_t l = 0; l < sf; ++l)
        self_gain += gains[l] * pb.h[l];
    self_gain /= static_cast<double>(sf);
    const double var = noise + pb.symbol_energy * std::norm(self_gain - 1.0);
    return {est, std::vector<double>(k, var)};
}

DetectionResult sic(const SubbandProblem& pb, const DetectorSpec& spec, const Constellation& constellation, int desired_user)
{
    validate(pb);
    validate(spec);
    const auto k = static_cast<std::size_t>(pb.users());
    const auto sf = static_cast<std::size_t>(pb.sf());

    DetectionResult out{CVec(k), std::vector<double>(k)};
    std::vector<std::size_t> remaining(k);
    for (std::size_t j = 0; j < k; ++j)
        remaining[j] = j;
    CVec residual(pb.y.begin(), pb.y.end());
    const auto eq = spec.equalizer_for_stage(0);

    for (int cancelled = 0; !remaining.empty(); ++cancelled) {
        const CVec gains = equalizer_gains(eq, pb.h, pb.noise_var, static_cast<int>(remaining.size()), pb.symbol_energy);
        const CVec est = equalize_despread(pb, gains, residual);
        const CVec t = diagonal_coupling(pb, gains);
        const double noise = pb.noise_var * mean_square(gains);

        // Variance and SINR of every code still in the residual.
        std::vector<double> var(remaining.size()), sinr(remaining.size());
        for (std::size_t a = 0; a < remaining.size(); ++a) {
            const auto ka = remaining[a];
            double mai = 0.0;
            for (auto kb : remaining)
                if (kb != ka)
                    mai += std::norm(t[ka * k + kb]);
            const double interference = noise + pb.symbol_energy * mai;
            var[a] = interference + pb.symbol_energy * std::norm(t[ka * k + ka] - 1.0);
            const double signal = pb.symbol_energy * std::norm(t[ka * k + ka]);
            sinr[a] = interference > 0.0 ? signal / interference : std::numeric_limits<double>::infinity();
        }

        if (cancelled >= spec.stages || remaining.size() == 1) {
            for (std::size_t a = 0; a < remaining.size(); ++a) {
                out.d_hat[remaining[a]] = est[remaining[a]];
                out.noise_var[remaining[a]] = var[a];
            }
            break;
        }

        // remaining[] stays sorted, so the first near-maximum is the lowest code index.
        std::size_t best = remaining.size();
        for (std::size_t a = 0; a < remaining.size(); ++a) {
            if (static_cast<int>(remaining[a]) == desired_user)
                continue;
            if (best == remaining.size() || sinr[a] > sinr[best] * (1.0 + 1e-12))
                best = a;
        }
        const auto kb = remaining[best];
        out.d_hat[kb] = est[kb];
        out.noise_var[kb] = var[best];

        const cplx decided = decide(est[kb], spec.decision, constellation);
        for (std::size_t l = 0; l < sf; ++l)
            residual[l] -= pb.h[l] * pb.codes->chip(static_cast<int>(l), static_cast<int>(kb)) * decided;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return out;
}

DetectionResult detect(const SubbandProblem& pb, const DetectorSpec& spec, const Constellation& constellation, std::span<const cplx> truth,
                       int desired_user)
{
    switch (spec.kind) {
    case DetectorKind::EGC:
        return egc(pb);
    case DetectorKind::MMSEC:
        return mmsec(pb);
    case DetectorKind::GMMSE:
        return gmmse(pb);
    case DetectorKind::PolyGMMSE:
        return poly_gmmse(pb, spec.poly_order, spec.poly_mode);
    case DetectorKind::PIC:
        return pic(pb, spec, constellation, truth);
    case DetectorKind::SIC:
        return sic(pb, spec, constellation, desired_user);
    }
    throw ConfigError("unknown detector kind");
}

} // namespace mccdma
