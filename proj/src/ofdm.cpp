#include "mccdma/ofdm.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>

namespace mccdma {

struct OfdmModem::Plan {
    Eigen::FFT<double> fft;
    std::vector<cplx> freq;
    std::vector<cplx> time;
};

std::vector<int> symmetric_layout(int fft_size, int n_carriers)
{
    if (n_carriers < 1 || n_carriers >= fft_size)
        throw ConfigError("n_carriers must lie in [1, fft_size - 1]");
    const int pos = (n_carriers + 1) / 2;
    const int neg = n_carriers / 2;
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(n_carriers));
    for (int k = 1; k <= pos; ++k)
        idx.push_back(k);
    for (int k = fft_size - neg; k < fft_size; ++k)
        idx.push_back(k);
    return idx;
}

void check_layout(const std::vector<int>& indices, int fft_size)
{
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] <= 0 || indices[i] >= fft_size)
            throw ConfigError("carrier index out of range (DC is excluded)");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw ConfigError("carrier indices must be strictly increasing");
    }
}

OfdmModem::OfdmModem(int fft_size, int guard_len, std::vector<int> active_indices)
    : n_(fft_size), guard_(guard_len), active_(std::move(active_indices)), plan_(std::make_unique<Plan>())
{
    if (n_ <= 0)
        throw ConfigError("fft_size must be positive");
    if (guard_ < 0 || guard_ >= n_)
        throw ConfigError("guard_len must satisfy 0 <= guard_len < fft_size");
    check_layout(active_, n_);
    plan_->freq.resize(static_cast<std::size_t>(n_));
    plan_->time.resize(static_cast<std::size_t>(n_));
}

OfdmModem::~OfdmModem() = default;
OfdmModem::OfdmModem(OfdmModem&&) noexcept = default;
OfdmModem& OfdmModem::operator=(OfdmModem&&) noexcept = default;

void OfdmModem::modulate(std::span<const cplx> carriers, std::span<cplx> samples)
{
    if (carriers.size() != active_.size())
        throw ConfigError("modulate: one value per active carrier is required");
    if (samples.size() != static_cast<std::size_t>(symbol_len()))
        throw ConfigError("modulate: output must hold fft_size + guard_len samples");
    auto& f = plan_->freq;
    std::fill(f.begin(), f.end(), cplx{});
    for (std::size_t i = 0; i < active_.size(); ++i)
        f[static_cast<std::size_t>(active_[i])] = carriers[i];
    // Eigen's inverse includes 1/N; rescale to the unitary 1/sqrt(N).
    plan_->fft.inv(plan_->time, f);
    const double s = std::sqrt(static_cast<double>(n_));
    const auto g = static_cast<std::size_t>(guard_);
    const auto n = static_cast<std::size_t>(n_);
    for (std::size_t i = 0; i < n; ++i)
        samples[g + i] = plan_->time[i] * s;
    for (std::size_t i = 0; i < g; ++i)
        samples[i] = samples[n + i];
}

CVec OfdmModem::modulate(std::span<const cplx> carriers)
{
    CVec out(static_cast<std::size_t>(symbol_len()));
    modulate(carriers, out);
    return out;
}

void OfdmModem::demodulate(std::span<const cplx> samples, std::span<cplx> carriers)
{
    if (samples.size() != static_cast<std::size_t>(symbol_len()))
        throw ConfigError("demodulate: input must hold fft_size + guard_len samples");
    if (carriers.size() != active_.size())
        throw ConfigError("demodulate: one output per active carrier is required");
    auto& t = plan_->time;
    std::copy(samples.begin() + guard_, samples.end(), t.begin());
    plan_->fft.fwd(plan_->freq, t);
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (std::size_t i = 0; i < active_.size(); ++i)
        carriers[i] = plan_->freq[static_cast<std::size_t>(active_[i])] * s;
}

CVec OfdmModem::demodulate(std::span<const cplx> samples)
{
    CVec out(active_.size());
    demodulate(samples, out);
    return out;
}

CVec ofdm_modulate(const CarrierGrid& grid, int fft_size, int guard_len)
{
    if (grid.values.size() != grid.active_indices.size())
        throw ConfigError("carrier grid values and indices differ in length");
    OfdmModem modem(fft_size, guard_len, grid.active_indices);
    return modem.modulate(grid.values);
}

CarrierGrid ofdm_demodulate(std::span<const cplx> samples, int fft_size, int guard_len, const std::vector<int>& active_indices)
{
    OfdmModem modem(fft_size, guard_len, active_indices);
    return CarrierGrid{active_indices, modem.demodulate(samples)};
}

} // namespace mccdma
