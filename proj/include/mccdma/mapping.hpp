#pragma once

#include "mccdma/sysmodel.hpp"
#include "mccdma/types.hpp"

#include <span>
#include <vector>

namespace mccdma {

/// Gray-labelled constellation with unit average energy.
///
/// QPSK:   b0 b1 -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)
/// 16-QAM: b0 b1 on the in-phase rail, b2 b3 on quadrature; per rail the
///         labels 11, 10, 00, 01 sit on levels -3, -1, +1, +3, scaled by
///         1 / sqrt(10).
class Constellation {
public:
    explicit Constellation(Modulation m);

    Modulation modulation() const { return mod_; }
    int bits_per_symbol() const { return bps_; }
    const CVec& points() const { return points_; }
    /// Label of point i, b0 in the most significant position.
    unsigned label(std::size_t i) const { return labels_[i]; }

    /// Maps bits to symbols; the length must be a multiple of bits_per_symbol().
    CVec map(std::span<const std::uint8_t> bits) const;

    /// Max-log LLRs, one variance per symbol. Positive favours bit 0.
    Llrs soft_demap(std::span<const cplx> symbols, std::span<const double> noise_var) const;

    /// Nearest constellation point (hard slicing).
    cplx slice(cplx y) const;

    /// Component-wise clip to the constellation's bounding square.
    cplx clip(cplx y) const;

private:
    Modulation mod_;
    int bps_;
    double scale_;                // rail level unit
    std::vector<double> levels_;  // per-rail amplitudes, ascending
    CVec points_;
    std::vector<unsigned> labels_;
};

} // namespace mccdma
