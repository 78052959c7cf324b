#include "mccdma/fec.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <random>

namespace mccdma::fec {

namespace {

inline std::uint8_t parity(unsigned v)
{
    return static_cast<std::uint8_t>(std::popcount(v) & 1);
}

bool kept(const ConvCode& code, int step, int stream)
{
    if (code.puncture.empty())
        return true;
    return code.puncture[static_cast<std::size_t>(step % code.period())][static_cast<std::size_t>(stream)];
}

} // namespace

int ConvCode::period() const
{
    return puncture.empty() ? 1 : static_cast<int>(puncture.size());
}

int ConvCode::kept_per_period() const
{
    if (puncture.empty())
        return streams();
    int n = 0;
    for (const auto& col : puncture)
        n += static_cast<int>(std::count(col.begin(), col.end(), true));
    return n;
}

double ConvCode::rate() const
{
    return static_cast<double>(period()) / kept_per_period();
}

void validate(const ConvCode& code)
{
    if (code.constraint_length < 2 || code.constraint_length > 16)
        throw ConfigError("constraint_length must lie in [2, 16]");
    if (code.generators.empty())
        throw ConfigError("convolutional code needs at least one generator");
    const unsigned limit = 1u << code.constraint_length;
    for (auto g : code.generators)
        if (g == 0 || g >= limit)
            throw ConfigError("generator polynomial does not fit the constraint length");
    for (const auto& col : code.puncture) {
        if (static_cast<int>(col.size()) != code.streams())
            throw ConfigError("puncture pattern width must equal the number of generators");
        if (std::none_of(col.begin(), col.end(), [](bool b) { return b; }))
            throw ConfigError("puncture pattern must keep at least one bit per period column");
    }
}

ConvCode umts_mother_code()
{
    return ConvCode{9, {0557, 0663, 0711}, {}};
}

ConvCode umts_code(CodeRate rate)
{
    auto code = umts_mother_code();
    switch (rate) {
    case CodeRate::Uncoded:
        throw ConfigError("uncoded transmission has no convolutional code");
    case CodeRate::Half:
        code.puncture = {{true, true, false}};
        break;
    case CodeRate::ThreeQuarters:
        code.puncture = {{true, true, false}, {true, false, false}, {false, true, false}};
        break;
    }
    return code;
}

int encoded_length(const ConvCode& code, int info_bits)
{
    const int steps = info_bits + code.tail_bits();
    int n = (steps / code.period()) * code.kept_per_period();
    for (int t = 0; t < steps % code.period(); ++t)
        for (int s = 0; s < code.streams(); ++s)
            n += kept(code, t, s) ? 1 : 0;
    return n;
}

Bits encode_mother(std::span<const std::uint8_t> bits, const ConvCode& code)
{
    validate(code);
    const int k = code.constraint_length;
    Bits out;
    out.reserve(bits.size() * code.generators.size());
    unsigned state = 0; // previous k-1 inputs, bit k-2 = most recent
    for (auto b : bits) {
        const unsigned reg = (static_cast<unsigned>(b & 1u) << (k - 1)) | state;
        for (auto g : code.generators)
            out.push_back(parity(reg & g));
        state = reg >> 1;
    }
    return out;
}

Bits puncture(std::span<const std::uint8_t> coded, const ConvCode& code)
{
    if (code.puncture.empty())
        return Bits(coded.begin(), coded.end());
    const auto n = static_cast<std::size_t>(code.streams());
    if (coded.size() % n != 0)
        throw ConfigError("coded length is not a multiple of the number of streams");
    Bits out;
    out.reserve(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i) {
        const int step = static_cast<int>(i / n);
        const int stream = static_cast<int>(i % n);
        if (kept(code, step, stream))
            out.push_back(coded[i]);
    }
    return out;
}

Bits conv_encode(std::span<const std::uint8_t> bits, const ConvCode& code)
{
    Bits terminated(bits.begin(), bits.end());
    terminated.resize(terminated.size() + static_cast<std::size_t>(code.tail_bits()), 0);
    return puncture(encode_mother(terminated, code), code);
}

Llrs depuncture(std::span<const double> llrs, const ConvCode& code, int steps)
{
    const auto n = static_cast<std::size_t>(code.streams());
    Llrs out(static_cast<std::size_t>(steps) * n, 0.0);
    std::size_t src = 0;
    for (int t = 0; t < steps; ++t) {
        for (std::size_t s = 0; s < n; ++s) {
            if (!kept(code, t, static_cast<int>(s)))
                continue;
            if (src >= llrs.size())
                throw ConfigError("punctured stream shorter than the trellis requires");
            out[static_cast<std::size_t>(t) * n + s] = llrs[src++];
        }
    }
    if (src != llrs.size())
        throw ConfigError("punctured stream longer than the trellis requires");
    return out;
}

Bits viterbi_decode(std::span<const double> llrs, const ConvCode& code)
{
    validate(code);
    const int k = code.constraint_length;
    const auto n = static_cast<std::size_t>(code.streams());
    if (llrs.size() % n != 0)
        throw ConfigError("LLR length is not a multiple of the number of streams");
    const std::size_t steps = llrs.size() / n;
    if (steps < static_cast<std::size_t>(code.tail_bits()))
        throw ConfigError("LLR stream shorter than the code tail");

    const std::size_t n_states = std::size_t{1} << (k - 1);
    const unsigned mask = static_cast<unsigned>(n_states - 1);

    // Branch outputs for every (state, input) pair, as +-1 per stream.
    std::vector<double> sign(n_states * 2 * n);
    for (unsigned s = 0; s < n_states; ++s)
        for (unsigned u = 0; u < 2; ++u) {
            const unsigned reg = (u << (k - 1)) | s;
            for (std::size_t g = 0; g < n; ++g)
                sign[(s * 2 + u) * n + g] = parity(reg & code.generators[g]) ? -1.0 : 1.0;
        }

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> metric(n_states, neg_inf), next(n_states);
    metric[0] = 0.0;
    // Survivor bit per (step, state): the departing (oldest) bit of the chosen predecessor.
    std::vector<std::uint8_t> survivor(steps * n_states);

    for (std::size_t t = 0; t < steps; ++t) {
        const double* l = llrs.data() + t * n;
        for (unsigned ns = 0; ns < n_states; ++ns) {
            const unsigned u = ns >> (k - 2);
            const unsigned p0 = (ns << 1) & mask;
            const unsigned p1 = p0 | 1u;
            double m0 = metric[p0], m1 = metric[p1];
            const double* s0 = &sign[(p0 * 2 + u) * n];
            const double* s1 = &sign[(p1 * 2 + u) * n];
            for (std::size_t g = 0; g < n; ++g) {
                m0 += s0[g] * l[g];
                m1 += s1[g] * l[g];
            }
            if (m1 > m0) {
                next[ns] = m1;
                survivor[t * n_states + ns] = 1;
            } else {
                next[ns] = m0;
                survivor[t * n_states + ns] = 0;
            }
        }
        metric.swap(next);
    }

    Bits decoded(steps);
    unsigned state = 0;
    for (std::size_t t = steps; t-- > 0;) {
        decoded[t] = static_cast<std::uint8_t>(state >> (k - 2));
        state = ((state << 1) & mask) | survivor[t * n_states + state];
    }
    decoded.resize(steps - static_cast<std::size_t>(code.tail_bits()));
    return decoded;
}

Bits decode(std::span<const double> llrs, const ConvCode& code, int info_bits)
{
    const int steps = info_bits + code.tail_bits();
    return viterbi_decode(depuncture(llrs, code, steps), code);
}

Interleaver::Interleaver(std::size_t size, std::uint64_t seed) : perm_(size)
{
    std::iota(perm_.begin(), perm_.end(), 0u);
    std::mt19937_64 rng(seed);
    for (std::size_t i = size; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm_[i - 1], perm_[pick(rng)]);
    }
}

Interleaver Interleaver::identity(std::size_t size)
{
    Interleaver it;
    it.perm_.resize(size);
    std::iota(it.perm_.begin(), it.perm_.end(), 0u);
    return it;
}

Bits Interleaver::interleave(std::span<const std::uint8_t> bits) const
{
    if (bits.size() != perm_.size())
        throw ConfigError("interleaver size mismatch");
    Bits out(bits.size());
    for (std::size_t i = 0; i < perm_.size(); ++i)
        out[i] = bits[perm_[i]];
    return out;
}

Llrs Interleaver::deinterleave(std::span<const double> llrs) const
{
    if (llrs.size() != perm_.size())
        throw ConfigError("interleaver size mismatch");
    Llrs out(llrs.size());
    for (std::size_t i = 0; i < perm_.size(); ++i)
        out[perm_[i]] = llrs[i];
    return out;
}

} // namespace mccdma::fec
