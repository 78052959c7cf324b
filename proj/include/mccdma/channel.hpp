#pragma once

#include "mccdma/sysmodel.hpp"
#include "mccdma/types.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mccdma {

struct PdpTap {
    int delay = 0;       // samples
    double power = 0.0;  // linear, mean
};

/// Tapped-delay-line power-delay profile, total power normalized to one.
struct PowerDelayProfile {
    std::vector<PdpTap> taps;

    int max_delay() const;
    double total_power() const;
    /// RMS delay spread in samples.
    double rms_delay_spread() const;
};

/// Normalizes powers to unit sum and checks delays/powers.
PowerDelayProfile make_pdp(std::vector<PdpTap> taps);

/// 17 taps every 6 samples with exp(-delay / 15) decay: RMS delay spread
/// ~252 ns at 57.6 MHz, last echo at 96 samples.
PowerDelayProfile bran_e_like_pdp();
/// 4 taps at delays 0, 3, 6, 10 with relative powers 1, 0.6, 0.35, 0.2.
PowerDelayProfile desk4_pdp();
PowerDelayProfile flat_pdp();

/// Reads `delay_samples power_linear` lines (`#` comments allowed).
PowerDelayProfile load_pdp(const std::string& path);

/// Built-in name or file path.
PowerDelayProfile resolve_pdp(const std::string& name_or_path);

/// Maximum Doppler shift for the configured velocity and carrier.
double doppler_hz(const SystemParams& params);

/// Where the channel is observed: FFT size, guard, active bins, and the
/// OFDM symbol period that spaces the fading samples in time.
struct ChannelGeometry {
    int fft_size = 0;
    int guard_len = 0;
    std::vector<int> active_indices;
    double symbol_period = 0.0;  // seconds

    int symbol_len() const { return fft_size + guard_len; }
};

/// Block-fading channel for a run of OFDM symbols.
struct ChannelRealization {
    std::vector<int> delays;
    std::vector<CVec> taps;   // [symbol][tap]
    std::vector<CVec> H;      // [symbol][active carrier]
    int symbol_len = 0;
    double noise_var = 0.0;

    int n_symbols() const { return static_cast<int>(taps.size()); }
};

/// Rayleigh tapped-delay-line generator.
///
/// Every tap is an independent sum-of-sinusoids process (Jakes spectrum)
///
///     g(t) = sqrt(P / M) sum_m exp(j (2 pi f_d cos(a_m) t + phi_m)),
///     a_m = 2 pi (m + theta) / M,
///
/// with theta and phi_m drawn per realization. Taps are sampled once per
/// OFDM symbol and held constant within it. With fading disabled each tap
/// is the constant sqrt(P).
class FadingChannel {
public:
    FadingChannel(PowerDelayProfile pdp, ChannelGeometry geometry, double doppler_hz, bool fading = true, int n_sinusoids = 32);

    const PowerDelayProfile& pdp() const { return pdp_; }
    const ChannelGeometry& geometry() const { return geo_; }

    ChannelRealization realize(int n_symbols, std::uint64_t seed) const;

    /// Per-carrier response of one tap set.
    void frequency_response(std::span<const cplx> taps, std::span<cplx> H) const;

private:
    PowerDelayProfile pdp_;
    ChannelGeometry geo_;
    double doppler_;
    bool fading_;
    int n_sin_;
    std::vector<cplx> steering_;  // [tap][carrier] = exp(-j 2 pi k d / N)
};

ChannelRealization realize(const PowerDelayProfile& pdp, double doppler_hz, int n_ofdm_symbols, std::uint64_t seed, const ChannelGeometry& geometry);

/// Linear convolution with the taps of the output sample's OFDM symbol,
/// followed by AWGN of variance `realization.noise_var`.
/// The signal before the first sample is taken as zero.
CVec apply(std::span<const cplx> x, const ChannelRealization& realization, std::uint64_t noise_seed);

/// Noise-free part of `apply`.
CVec convolve(std::span<const cplx> x, const ChannelRealization& realization);

/// Adds circular complex Gaussian noise, variance `noise_var` per sample.
void add_awgn(std::span<cplx> samples, double noise_var, std::mt19937_64& rng);
CVec add_awgn(std::span<const cplx> samples, double noise_var, std::uint64_t seed);

/// Noise variance per complex time sample for a target Eb/N0.
///
/// With unitary transforms each carrier sees the time-domain noise
/// variance. A user symbol (energy E_s = 1) is spread over S_F carriers
/// and carries m * R information bits; the cyclic prefix adds a factor
/// (N + G) / N of transmitted energy. The active-carrier fraction cancels
/// because N_c / S_F sub-bands each carry one symbol per user, so
///
///     sigma^2 = E_s (N + G) / N / (m R 10^(Eb/N0 / 10)).
double ebn0_to_noisevar(double ebn0_db, const CheckedParams& params);

/// Per-carrier SNR gamma_c = E_chip / sigma^2 with E_chip = E_s K / S_F.
double subcarrier_snr(double noise_var, int n_users, int spreading_factor, double symbol_energy = 1.0);

} // namespace mccdma
