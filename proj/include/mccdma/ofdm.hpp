#pragma once

#include "mccdma/types.hpp"

#include <memory>
#include <span>
#include <vector>

namespace mccdma {

/// Active carriers (FFT bin indices, strictly increasing, DC excluded)
/// and their values.
struct CarrierGrid {
    std::vector<int> active_indices;
    CVec values;
};

/// N_c carriers split around DC: bins 1..ceil(N_c/2) and the top floor(N_c/2)
/// bins (negative frequencies). DC and the band edges stay null.
std::vector<int> symmetric_layout(int fft_size, int n_carriers);

/// Throws ConfigError unless `indices` is a valid layout for `fft_size`.
void check_layout(const std::vector<int>& indices, int fft_size);

/// N-point OFDM modulator/demodulator with unitary transforms and a cyclic
/// prefix of `guard_len` samples.
///
/// Holds FFT plan state; use one instance per thread.
class OfdmModem {
public:
    OfdmModem(int fft_size, int guard_len, std::vector<int> active_indices);
    ~OfdmModem();
    OfdmModem(OfdmModem&&) noexcept;
    OfdmModem& operator=(OfdmModem&&) noexcept;

    int fft_size() const { return n_; }
    int guard_len() const { return guard_; }
    int symbol_len() const { return n_ + guard_; }
    int n_active() const { return static_cast<int>(active_.size()); }
    const std::vector<int>& active_indices() const { return active_; }

    /// N_c carrier values -> N + guard time samples.
    CVec modulate(std::span<const cplx> carriers);
    void modulate(std::span<const cplx> carriers, std::span<cplx> samples);

    /// N + guard time samples -> N_c carrier values.
    CVec demodulate(std::span<const cplx> samples);
    void demodulate(std::span<const cplx> samples, std::span<cplx> carriers);

private:
    struct Plan;
    int n_;
    int guard_;
    std::vector<int> active_;
    std::unique_ptr<Plan> plan_;
};

CVec ofdm_modulate(const CarrierGrid& grid, int fft_size, int guard_len);
CarrierGrid ofdm_demodulate(std::span<const cplx> samples, int fft_size, int guard_len, const std::vector<int>& active_indices);

} // namespace mccdma
