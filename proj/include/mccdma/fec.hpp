#pragma once

#include "mccdma/sysmodel.hpp"
#include "mccdma/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mccdma::fec {

/// Feedforward convolutional code with optional periodic puncturing.
///
/// Generators are given in octal with the most significant bit tapping the
/// current input bit. `puncture[t][s]` tells whether output stream `s` is
/// transmitted at trellis step `t mod period`; an empty pattern keeps all
/// mother-code bits.
struct ConvCode {
    int constraint_length = 3;
    std::vector<unsigned> generators;            // octal-specified, e.g. 0557
    std::vector<std::vector<bool>> puncture;     // period x streams

    int streams() const { return static_cast<int>(generators.size()); }
    int tail_bits() const { return constraint_length - 1; }
    int period() const;
    int kept_per_period() const;
    double rate() const;
};

/// Throws ConfigError when the code or its puncturing pattern is malformed.
void validate(const ConvCode& code);

/// Rate-1/3, K=9 mother code with generators (557, 663, 711) octal.
ConvCode umts_mother_code();

/// Mother code punctured to the requested rate.
///
/// Rate 1/2 keeps streams G0 and G1 on every step. Rate 3/4 uses the
/// period-3 pattern
///
///     G0: 1 1 0
///     G1: 1 0 1
///     G2: 0 0 0
///
/// which keeps 4 of the 9 mother bits per period.
ConvCode umts_code(CodeRate rate);

/// Number of bits after encoding `info_bits` (tail included) and puncturing.
int encoded_length(const ConvCode& code, int info_bits);

/// Encodes and terminates in the zero state, then punctures.
Bits conv_encode(std::span<const std::uint8_t> bits, const ConvCode& code);

/// Unpunctured mother-code output for the given input (no tail appended).
Bits encode_mother(std::span<const std::uint8_t> bits, const ConvCode& code);

Bits puncture(std::span<const std::uint8_t> coded, const ConvCode& code);

/// Reinserts zero LLRs at punctured positions. `steps` is the number of
/// trellis steps the punctured stream covers. If the final period is
/// incomplete the pattern is truncated at the tail.
Llrs depuncture(std::span<const double> llrs, const ConvCode& code, int steps);

/// Soft-input Viterbi decoder over the terminated trellis.
///
/// Input is the depunctured mother-code LLR stream (positive favours bit 0),
/// `steps * streams()` long. Returns the `steps - tail_bits()` information
/// bits. Add-compare-select ties keep the predecessor whose departing bit
/// is 0, so an all-zero input decodes to all zeros.
Bits viterbi_decode(std::span<const double> llrs, const ConvCode& code);

/// Decodes a punctured LLR stream carrying `info_bits` information bits.
Bits decode(std::span<const double> llrs, const ConvCode& code, int info_bits);

/// Seeded random permutation (Fisher-Yates) on `size` indices.
class Interleaver {
public:
    Interleaver() = default;
    Interleaver(std::size_t size, std::uint64_t seed);
    static Interleaver identity(std::size_t size);

    std::size_t size() const { return perm_.size(); }
    const std::vector<std::uint32_t>& permutation() const { return perm_; }

    /// out[i] = in[perm[i]]
    Bits interleave(std::span<const std::uint8_t> bits) const;
    Llrs deinterleave(std::span<const double> llrs) const;

private:
    std::vector<std::uint32_t> perm_;
};

} // namespace mccdma::fec
