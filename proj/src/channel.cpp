#include "mccdma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mccdma {

namespace {
constexpr double speed_of_light = 299792458.0;
}

int PowerDelayProfile::max_delay() const
{
    int d = 0;
    for (const auto& t : taps)
        d = std::max(d, t.delay);
    return d;
}

double PowerDelayProfile::total_power() const
{
    double s = 0.0;
    for (const auto& t : taps)
        s += t.power;
    return s;
}

double PowerDelayProfile::rms_delay_spread() const
{
    const double p = total_power();
    double m1 = 0.0, m2 = 0.0;
    for (const auto& t : taps) {
        m1 += t.power * t.delay;
        m2 += t.power * t.delay * t.delay;
    }
    m1 /= p;
    m2 /= p;
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

PowerDelayProfile make_pdp(std::vector<PdpTap> taps)
{
    if (taps.empty())
        throw ConfigError("power-delay profile needs at least one tap");
    double total = 0.0;
    for (const auto& t : taps) {
        if (t.delay < 0)
            throw ConfigError("tap delays must be non-negative");
        if (!(t.power >= 0.0) || !std::isfinite(t.power))
            throw ConfigError("tap powers must be finite and non-negative");
        total += t.power;
    }
    if (!(total > 0.0))
        throw ConfigError("power-delay profile has zero total power");
    for (auto& t : taps)
        t.power /= total;
    return PowerDelayProfile{std::move(taps)};
}

PowerDelayProfile bran_e_like_pdp()
{
    std::vector<PdpTap> taps;
    for (int i = 0; i < 17; ++i) {
        const int d = 6 * i;
        taps.push_back({d, std::exp(-d / 15.0)});
    }
    return make_pdp(std::move(taps));
}

PowerDelayProfile desk4_pdp()
{
    return make_pdp({{0, 1.0}, {3, 0.6}, {6, 0.35}, {10, 0.2}});
}

PowerDelayProfile flat_pdp()
{
    return make_pdp({{0, 1.0}});
}

PowerDelayProfile load_pdp(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open power-delay profile '" + path + "'");
    std::vector<PdpTap> taps;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        std::istringstream ls(line);
        PdpTap t;
        if (!(ls >> t.delay))
            continue;
        if (!(ls >> t.power))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'delay_samples power_linear'");
        std::string extra;
        if (ls >> extra)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": trailing data");
        taps.push_back(t);
    }
    return make_pdp(std::move(taps));
}

PowerDelayProfile resolve_pdp(const std::string& name)
{
    if (name == "bran_e_like")
        return bran_e_like_pdp();
    if (name == "desk4")
        return desk4_pdp();
    if (name == "flat")
        return flat_pdp();
    return load_pdp(name);
}

double doppler_hz(const SystemParams& p)
{
    return p.velocity * p.carrier_freq / speed_of_light;
}

FadingChannel::FadingChannel(PowerDelayProfile pdp, ChannelGeometry geometry, double doppler, bool fading, int n_sinusoids)
    : pdp_(std::move(pdp)), geo_(std::move(geometry)), doppler_(doppler), fading_(fading), n_sin_(n_sinusoids)
{
    if (pdp_.taps.empty())
        throw ConfigError("power-delay profile needs at least one tap");
    if (pdp_.max_delay() > geo_.guard_len)
        throw ConfigError("power-delay profile extends beyond the guard interval");
    if (n_sin_ < 1)
        throw ConfigError("sum-of-sinusoids generator needs at least one sinusoid");
    const auto nc = geo_.active_indices.size();
    steering_.resize(pdp_.taps.size() * nc);
    for (std::size_t p = 0; p < pdp_.taps.size(); ++p)
        for (std::size_t c = 0; c < nc; ++c) {
            // Reduce k*d mod N before scaling to keep the phase argument small.
            const long kd = static_cast<long>(geo_.active_indices[c]) * pdp_.taps[p].delay % geo_.fft_size;
            const double phase = -2.0 * std::numbers::pi * static_cast<double>(kd) / geo_.fft_size;
            steering_[p * nc + c] = std::polar(1.0, phase);
        }
}

void FadingChannel::frequency_response(std::span<const cplx> taps, std::span<cplx> H) const
{
    const auto nc = geo_.active_indices.size();
    if (taps.size() != pdp_.taps.size() || H.size() != nc)
        throw ConfigError("frequency_response: dimension mismatch");
    std::fill(H.begin(), H.end(), cplx{});
    for (std::size_t p = 0; p < taps.size(); ++p) {
        const cplx g = taps[p];
        const cplx* s = &steering_[p * nc];
        for (std::size_t c = 0; c < nc; ++c)
            H[c] += g * s[c];
    }
}

ChannelRealization FadingChannel::realize(int n_symbols, std::uint64_t seed) const
{
    ChannelRealization r;
    r.symbol_len = geo_.symbol_len();
    const auto n_taps = pdp_.taps.size();
    for (const auto& t : pdp_.taps)
        r.delays.push_back(t.delay);
    r.taps.assign(static_cast<std::size_t>(n_symbols), CVec(n_taps));
    r.H.assign(static_cast<std::size_t>(n_symbols), CVec(geo_.active_indices.size()));

    if (!fading_) {
        for (auto& sym : r.taps)
            for (std::size_t p = 0; p < n_taps; ++p)
                sym[p] = std::sqrt(pdp_.taps[p].power);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double two_pi = 2.0 * std::numbers::pi;
        const auto m = static_cast<std::size_t>(n_sin_);
        std::vector<double> freq(m), phase(m);
        for (std::size_t p = 0; p < n_taps; ++p) {
            const double theta = unit(rng);
            for (std::size_t i = 0; i < m; ++i) {
                const double angle = two_pi * (static_cast<double>(i) + theta) / static_cast<double>(m);
                freq[i] = two_pi * doppler_ * std::cos(angle);
                phase[i] = two_pi * unit(rng);
            }
            const double amp = std::sqrt(pdp_.taps[p].power / static_cast<double>(m));
            for (int s = 0; s < n_symbols; ++s) {
                const double t = s * geo_.symbol_period;
                cplx g{};
                for (std::size_t i = 0; i < m; ++i)
                    g += std::polar(1.0, freq[i] * t + phase[i]);
                r.taps[static_cast<std::size_t>(s)][p] = amp * g;
            }
        }
    }
    for (int s = 0; s < n_symbols; ++s)
        frequency_response(r.taps[static_cast<std::size_t>(s)], r.H[static_cast<std::size_t>(s)]);
    return r;
}

ChannelRealization realize(const PowerDelayProfile& pdp, double doppler, int n_ofdm_symbols, std::uint64_t seed, const ChannelGeometry& geometry)
{
    return FadingChannel(pdp, geometry, doppler).realize(n_ofdm_symbols, seed);
}

CVec convolve(std::span<const cplx> x, const ChannelRealization& r)
{
    if (r.symbol_len <= 0 || x.size() != static_cast<std::size_t>(r.symbol_len) * r.taps.size())
        throw ConfigError("channel input length does not match the realization");
    CVec y(x.size());
    const auto len = static_cast<std::size_t>(r.symbol_len);
    for (std::size_t n = 0; n < x.size(); ++n) {
        const CVec& g = r.taps[n / len];
        cplx acc{};
        for (std::size_t p = 0; p < g.size(); ++p) {
            const auto d = static_cast<std::size_t>(r.delays[p]);
            if (n >= d)
                acc += g[p] * x[n - d];
        }
        y[n] = acc;
    }
    return y;
}

void add_awgn(std::span<cplx> samples, double noise_var, std::mt19937_64& rng)
{
    if (noise_var < 0.0)
        throw ConfigError("noise variance must be non-negative");
    if (noise_var == 0.0)
        return;
    std::normal_distribution<double> n(0.0, std::sqrt(noise_var / 2.0));
    for (auto& s : samples) {
        const double re = n(rng);
        const double im = n(rng);
        s += cplx(re, im);
    }
}

CVec add_awgn(std::span<const cplx> samples, double noise_var, std::uint64_t seed)
{
    CVec out(samples.begin(), samples.end());
    std::mt19937_64 rng(seed);
    add_awgn(out, noise_var, rng);
    return out;
}

CVec apply(std::span<const cplx> x, const ChannelRealization& r, std::uint64_t noise_seed)
{
    CVec y = convolve(x, r);
    std::mt19937_64 rng(noise_seed);
    add_awgn(y, r.noise_var, rng);
    return y;
}

double ebn0_to_noisevar(double ebn0_db, const CheckedParams& c)
{
    const auto& p = c.p;
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    const double cp = static_cast<double>(p.fft_size + p.guard_len) / p.fft_size;
    const double bits = c.bits_per_symbol * rate_value(p.code_rate);
    constexpr double symbol_energy = 1.0;
    return symbol_energy * cp / (bits * ebn0);
}

double subcarrier_snr(double noise_var, int n_users, int spreading_factor, double symbol_energy)
{
    const double chip_energy = symbol_energy * n_users / spreading_factor;
    return chip_energy / noise_var;
}

} // namespace mccdma
