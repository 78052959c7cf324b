#pragma once

#include "mccdma/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mccdma {

/// In-place unnormalized fast Walsh-Hadamard transform (Sylvester order).
/// The length must be a power of two.
void fwht(std::span<cplx> v);
void fwht(std::span<double> v);

bool is_power_of_two(int n);

/// Active Walsh-Hadamard codes C (S_F x K), entries +-1/sqrt(S_F).
///
/// Column k is Sylvester-Hadamard column `index(k)`; the codes are
/// orthonormal, so despreading is the adjoint of spreading.
class CodeMatrix {
public:
    CodeMatrix() = default;
    CodeMatrix(int spreading_factor, std::vector<int> columns);

    int spreading_factor() const { return sf_; }
    int n_codes() const { return static_cast<int>(cols_.size()); }
    int index(int k) const { return cols_[static_cast<std::size_t>(k)]; }
    const std::vector<int>& columns() const { return cols_; }

    /// Chip l of code k.
    double chip(int l, int k) const;

    /// chips = C d (S_F outputs), computed with one FWHT.
    CVec spread(std::span<const cplx> symbols) const;
    void spread(std::span<const cplx> symbols, std::span<cplx> chips) const;

    /// d = C^H chips (K outputs), computed with one FWHT.
    CVec despread(std::span<const cplx> chips) const;
    void despread(std::span<const cplx> chips, std::span<cplx> symbols) const;

    /// Symbol coupling C^H diag(w) C, exploiting c_k(l) c_j(l) = h_{k xor j}(l):
    /// entry (k, j) = W[index(k) ^ index(j)] / S_F with W = FWHT(w).
    /// `w` has S_F entries; `out` receives K*K entries, row-major.
    void coupling(std::span<const cplx> w, std::span<cplx> out) const;

private:
    int sf_ = 0;
    std::vector<int> cols_;
};

/// First K Sylvester columns (column 0 is the all-ones code).
CodeMatrix hadamard_codes(int spreading_factor, int n_codes);

/// Code 0 plus K-1 other columns drawn at random from the seed.
CodeMatrix random_hadamard_codes(int spreading_factor, int n_codes, std::uint64_t seed);

/// Regular chip-to-carrier mapping: chip j of sub-band m goes to carrier
/// j * N_u + m. Input is sub-band-major (m * S_F + j).
CVec freq_interleave(std::span<const cplx> chips, int spreading_factor, int n_subbands);
CVec freq_deinterleave(std::span<const cplx> carriers, int spreading_factor, int n_subbands);

} // namespace mccdma
