#include "mccdma/sysmodel.hpp"

#include "mccdma/fec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mccdma {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("invalid value for '" + key + "': '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value)
{
    const auto v = lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError("invalid boolean for '" + key + "': '" + value + "'");
}

} // namespace

int bits_per_symbol(Modulation m)
{
    return m == Modulation::QPSK ? 2 : 4;
}

double rate_value(CodeRate r)
{
    switch (r) {
    case CodeRate::Uncoded:
        return 1.0;
    case CodeRate::Half:
        return 0.5;
    case CodeRate::ThreeQuarters:
        return 0.75;
    }
    return 1.0;
}

std::string to_string(Modulation m)
{
    return m == Modulation::QPSK ? "qpsk" : "qam16";
}

std::string to_string(CodeRate r)
{
    switch (r) {
    case CodeRate::Uncoded:
        return "uncoded";
    case CodeRate::Half:
        return "1/2";
    case CodeRate::ThreeQuarters:
        return "3/4";
    }
    return "uncoded";
}

std::string to_string(CodeAssignment a)
{
    return a == CodeAssignment::Natural ? "natural" : "random";
}

Modulation parse_modulation(const std::string& s)
{
    const auto v = lower(s);
    if (v == "qpsk")
        return Modulation::QPSK;
    if (v == "qam16" || v == "16qam" || v == "16-qam")
        return Modulation::QAM16;
    throw ConfigError("unknown modulation '" + s + "'");
}

CodeRate parse_code_rate(const std::string& s)
{
    const auto v = lower(s);
    if (v == "uncoded" || v == "1" || v == "none")
        return CodeRate::Uncoded;
    if (v == "1/2" || v == "0.5")
        return CodeRate::Half;
    if (v == "3/4" || v == "0.75")
        return CodeRate::ThreeQuarters;
    throw ConfigError("unknown code_rate '" + s + "'");
}

CodeAssignment parse_code_assignment(const std::string& s)
{
    const auto v = lower(s);
    if (v == "natural")
        return CodeAssignment::Natural;
    if (v == "random")
        return CodeAssignment::Random;
    throw ConfigError("unknown code_assignment '" + s + "'");
}

CheckedParams validate(const SystemParams& params)
{
    const auto& p = params;
    if (p.fft_size <= 0)
        throw ConfigError("fft_size must be positive");
    if (p.spreading_factor <= 0)
        throw ConfigError("spreading_factor must be positive");
    if (p.n_carriers <= 0 || p.n_carriers >= p.fft_size)
        throw ConfigError("n_carriers must lie in [1, fft_size - 1] (DC carrier is never modulated)");
    if (p.n_carriers % p.spreading_factor != 0)
        throw ConfigError("spreading_factor does not divide n_carriers");
    if (p.n_users < 1 || p.n_users > p.spreading_factor)
        throw ConfigError("n_users must satisfy 1 <= n_users <= spreading_factor");
    if (p.guard_len < 0 || p.guard_len >= p.fft_size)
        throw ConfigError("guard_len must satisfy 0 <= guard_len < fft_size");
    if (p.frame_ofdm_symbols < 1)
        throw ConfigError("frame_ofdm_symbols must be positive");
    if (!(p.sampling_freq > 0.0))
        throw ConfigError("sampling_freq must be positive");
    if (!(p.carrier_freq > 0.0))
        throw ConfigError("carrier_freq must be positive");
    if (p.velocity < 0.0)
        throw ConfigError("velocity must be non-negative");

    CheckedParams c;
    c.p = params;
    c.n_subbands = p.n_carriers / p.spreading_factor;
    c.bits_per_symbol = bits_per_symbol(p.modulation);
    c.symbols_per_user = c.n_subbands * p.frame_ofdm_symbols;
    c.coded_capacity = c.symbols_per_user * c.bits_per_symbol;

    if (p.code_rate == CodeRate::Uncoded) {
        c.info_bits = c.coded_capacity;
        c.encoded_bits = c.coded_capacity;
    } else {
        const auto code = fec::umts_code(p.code_rate);
        // Largest message whose terminated, punctured codeword fits the frame.
        int n = static_cast<int>(c.coded_capacity * rate_value(p.code_rate));
        while (n > 0 && fec::encoded_length(code, n) > c.coded_capacity)
            --n;
        if (n <= 0)
            throw ConfigError("frame too short to carry a terminated codeword");
        c.info_bits = n;
        c.encoded_bits = fec::encoded_length(code, n);
    }
    c.pad_bits = c.coded_capacity - c.encoded_bits;
    return c;
}

SystemParams paper_preset()
{
    return SystemParams{};
}

SystemParams desk_preset()
{
    SystemParams p;
    p.fft_size = 64;
    p.n_carriers = 32;
    p.spreading_factor = 8;
    p.n_users = 8;
    p.guard_len = 16;
    p.frame_ofdm_symbols = 8;
    p.pdp = "desk4";
    return p;
}

SystemParams preset(const std::string& name)
{
    const auto v = lower(name);
    if (v == "paper")
        return paper_preset();
    if (v == "desk")
        return desk_preset();
    throw ConfigError("unknown preset '" + name + "'");
}

void set_param(SystemParams& p, const std::string& key, const std::string& value)
{
    if (key == "fft_size")
        p.fft_size = parse_number<int>(key, value);
    else if (key == "n_carriers")
        p.n_carriers = parse_number<int>(key, value);
    else if (key == "spreading_factor")
        p.spreading_factor = parse_number<int>(key, value);
    else if (key == "n_users")
        p.n_users = parse_number<int>(key, value);
    else if (key == "guard_len")
        p.guard_len = parse_number<int>(key, value);
    else if (key == "sampling_freq")
        p.sampling_freq = parse_number<double>(key, value);
    else if (key == "modulation")
        p.modulation = parse_modulation(value);
    else if (key == "code_rate")
        p.code_rate = parse_code_rate(value);
    else if (key == "frame_ofdm_symbols")
        p.frame_ofdm_symbols = parse_number<int>(key, value);
    else if (key == "carrier_freq")
        p.carrier_freq = parse_number<double>(key, value);
    else if (key == "velocity")
        p.velocity = parse_number<double>(key, value);
    else if (key == "seed")
        p.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "pdp")
        p.pdp = value;
    else if (key == "fading")
        p.fading = parse_bool(key, value);
    else if (key == "code_assignment")
        p.code_assignment = parse_code_assignment(value);
    else
        throw ConfigError("unknown configuration key '" + key + "'");
}

SystemParams parse_config(std::istream& in, SystemParams base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        set_param(base, key, value);
    }
    return base;
}

SystemParams load_config(const std::string& path, SystemParams base)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const SystemParams& p)
{
    std::ostringstream s;
    s.precision(17);
    s << "fft_size = " << p.fft_size << '\n'
      << "n_carriers = " << p.n_carriers << '\n'
      << "spreading_factor = " << p.spreading_factor << '\n'
      << "n_users = " << p.n_users << '\n'
      << "guard_len = " << p.guard_len << '\n'
      << "sampling_freq = " << p.sampling_freq << '\n'
      << "modulation = " << to_string(p.modulation) << '\n'
      << "code_rate = " << to_string(p.code_rate) << '\n'
      << "frame_ofdm_symbols = " << p.frame_ofdm_symbols << '\n'
      << "carrier_freq = " << p.carrier_freq << '\n'
      << "velocity = " << p.velocity << '\n'
      << "seed = " << p.seed << '\n'
      << "pdp = " << p.pdp << '\n'
      << "fading = " << (p.fading ? "true" : "false") << '\n'
      << "code_assignment = " << to_string(p.code_assignment) << '\n';
    out << s.str();
}

} // namespace mccdma
