#include "mccdma/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mccdma {

namespace {

// One rail: value for a 1- or 2-bit Gray label.
double rail_level(Modulation m, unsigned b_sign, unsigned b_mag)
{
    if (m == Modulation::QPSK)
        return b_sign ? -1.0 : 1.0;
    return (b_sign ? -1.0 : 1.0) * (b_mag ? 3.0 : 1.0);
}

double nearest_level(const std::vector<double>& levels, double v)
{
    double best = levels.front();
    for (double l : levels)
        if (std::abs(v - l) < std::abs(v - best))
            best = l;
    return best;
}

} // namespace

Constellation::Constellation(Modulation m) : mod_(m), bps_(mccdma::bits_per_symbol(m))
{
    if (m == Modulation::QPSK) {
        scale_ = 1.0 / std::sqrt(2.0);
        levels_ = {-1.0, 1.0};
    } else {
        scale_ = 1.0 / std::sqrt(10.0);
        levels_ = {-3.0, -1.0, 1.0, 3.0};
    }
    const unsigned n = 1u << bps_;
    for (unsigned label = 0; label < n; ++label) {
        double re = 0.0, im = 0.0;
        if (m == Modulation::QPSK) {
            re = rail_level(m, (label >> 1) & 1u, 0);
            im = rail_level(m, label & 1u, 0);
        } else {
            re = rail_level(m, (label >> 3) & 1u, (label >> 2) & 1u);
            im = rail_level(m, (label >> 1) & 1u, label & 1u);
        }
        points_.emplace_back(re * scale_, im * scale_);
        labels_.push_back(label);
    }
}

CVec Constellation::map(std::span<const std::uint8_t> bits) const
{
    const auto bps = static_cast<std::size_t>(bps_);
    if (bits.size() % bps != 0)
        throw ConfigError("bit count is not a multiple of bits per symbol");
    CVec out;
    out.reserve(bits.size() / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) {
        unsigned label = 0;
        for (std::size_t b = 0; b < bps; ++b)
            label = (label << 1) | (bits[i + b] & 1u);
        out.push_back(points_[label]);
    }
    return out;
}

Llrs Constellation::soft_demap(std::span<const cplx> symbols, std::span<const double> noise_var) const
{
    if (symbols.size() != noise_var.size())
        throw ConfigError("one noise variance per symbol is required");
    Llrs out;
    out.reserve(symbols.size() * static_cast<std::size_t>(bps_));

    // The labelling is separable per rail, so the 2-D max-log minimum
    // reduces to a 1-D minimum on each rail.
    auto rail = [&](double y, double inv_var, bool two_bits) {
        if (!two_bits) {
            const double d0 = y - scale_, d1 = y + scale_;
            out.push_back((d1 * d1 - d0 * d0) * inv_var);
            return;
        }
        // levels (label sign,mag): +1 (0,0), +3 (0,1), -1 (1,0), -3 (1,1)
        double best[2][2];
        for (auto& row : best)
            row[0] = row[1] = std::numeric_limits<double>::infinity();
        for (unsigned s = 0; s < 2; ++s)
            for (unsigned mbit = 0; mbit < 2; ++mbit) {
                const double d = y - rail_level(mod_, s, mbit) * scale_;
                const double e = d * d;
                best[0][s] = std::min(best[0][s], e);
                best[1][mbit] = std::min(best[1][mbit], e);
            }
        out.push_back((best[0][1] - best[0][0]) * inv_var);
        out.push_back((best[1][1] - best[1][0]) * inv_var);
    };

    const bool qam = mod_ == Modulation::QAM16;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (!(noise_var[i] > 0.0))
            throw ConfigError("noise variance must be positive");
        const double inv = 1.0 / noise_var[i];
        rail(symbols[i].real(), inv, qam);
        rail(symbols[i].imag(), inv, qam);
    }
    return out;
}

cplx Constellation::slice(cplx y) const
{
    return {nearest_level(levels_, y.real() / scale_) * scale_, nearest_level(levels_, y.imag() / scale_) * scale_};
}

cplx Constellation::clip(cplx y) const
{
    const double lim = levels_.back() * scale_;
    return {std::clamp(y.real(), -lim, lim), std::clamp(y.imag(), -lim, lim)};
}

} // namespace mccdma
