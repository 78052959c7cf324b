#pragma once

#include "mccdma/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>

namespace mccdma {

enum class Modulation { QPSK, QAM16 };
enum class CodeRate { Uncoded, Half, ThreeQuarters };
enum class CodeAssignment { Natural, Random };

int bits_per_symbol(Modulation m);
double rate_value(CodeRate r);

std::string to_string(Modulation m);
std::string to_string(CodeRate r);
std::string to_string(CodeAssignment a);
Modulation parse_modulation(const std::string& s);
CodeRate parse_code_rate(const std::string& s);
CodeAssignment parse_code_assignment(const std::string& s);

/// Full static configuration of one simulated link.
///
/// Field names double as configuration-file keys. `pdp` names either a
/// built-in power-delay profile ("bran_e_like", "desk4", "flat") or a
/// profile file; `fading = false` freezes every tap at its mean amplitude,
/// which together with "flat" gives a pure AWGN link.
struct SystemParams {
    int fft_size = 1024;
    int n_carriers = 736;
    int spreading_factor = 32;
    int n_users = 32;
    int guard_len = 216;
    double sampling_freq = 57.6e6;
    Modulation modulation = Modulation::QPSK;
    CodeRate code_rate = CodeRate::Half;
    int frame_ofdm_symbols = 30;
    double carrier_freq = 5.0e9;
    double velocity = 60.0 / 3.6;
    std::uint64_t seed = 1;
    std::string pdp = "bran_e_like";
    bool fading = true;
    CodeAssignment code_assignment = CodeAssignment::Natural;

    bool operator==(const SystemParams&) const = default;
};

/// Validated parameters together with every derived dimension.
struct CheckedParams {
    SystemParams p;
    int n_subbands = 0;           // N_u = N_c / S_F
    int bits_per_symbol = 0;      // 2 or 4
    int symbols_per_user = 0;     // N_u * frame_ofdm_symbols
    int coded_capacity = 0;       // coded bits one user can carry per frame
    int info_bits = 0;            // information bits per user per frame
    int encoded_bits = 0;         // punctured coded bits before padding
    int pad_bits = 0;             // coded_capacity - encoded_bits
};

/// Checks the invariants of `params` and computes derived quantities.
/// Throws ConfigError naming the violated invariant.
CheckedParams validate(const SystemParams& params);

SystemParams paper_preset();
SystemParams desk_preset();
SystemParams preset(const std::string& name);

/// Applies one `key = value` assignment. Unknown keys are a ConfigError.
void set_param(SystemParams& params, const std::string& key, const std::string& value);

/// Parses a flat key/value text (`#` starts a comment) on top of `base`.
SystemParams parse_config(std::istream& in, SystemParams base = {});
SystemParams load_config(const std::string& path, SystemParams base = {});
void write_config(std::ostream& out, const SystemParams& params);

} // namespace mccdma
