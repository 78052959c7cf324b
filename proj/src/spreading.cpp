#include "mccdma/spreading.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace mccdma {

namespace {

template <typename T>
void fwht_impl(std::span<T> v)
{
    const std::size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw ConfigError("Walsh-Hadamard transform length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1)
        for (std::size_t i = 0; i < n; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) {
                const T a = v[j];
                const T b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
}

} // namespace

void fwht(std::span<cplx> v)
{
    fwht_impl(v);
}

void fwht(std::span<double> v)
{
    fwht_impl(v);
}

bool is_power_of_two(int n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

CodeMatrix::CodeMatrix(int spreading_factor, std::vector<int> columns) : sf_(spreading_factor), cols_(std::move(columns))
{
    if (!is_power_of_two(sf_))
        throw ConfigError("spreading factor must be a power of two");
    if (cols_.empty() || static_cast<int>(cols_.size()) > sf_)
        throw ConfigError("number of codes must satisfy 1 <= K <= S_F");
    auto sorted = cols_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 || sorted.back() >= sf_)
        throw ConfigError("code columns must be distinct indices in [0, S_F)");
}

double CodeMatrix::chip(int l, int k) const
{
    // Sylvester entry: (-1)^{popcount(l & col)}
    const int sign = std::popcount(static_cast<unsigned>(l & index(k))) & 1;
    return (sign ? -1.0 : 1.0) / std::sqrt(static_cast<double>(sf_));
}

void CodeMatrix::spread(std::span<const cplx> symbols, std::span<cplx> chips) const
{
    if (static_cast<int>(symbols.size()) != n_codes() || static_cast<int>(chips.size()) != sf_)
        throw ConfigError("spread: dimension mismatch");
    std::fill(chips.begin(), chips.end(), cplx{});
    for (std::size_t k = 0; k < cols_.size(); ++k)
        chips[static_cast<std::size_t>(cols_[k])] = symbols[k];
    fwht(chips);
    const double s = 1.0 / std::sqrt(static_cast<double>(sf_));
    for (auto& c : chips)
        c *= s;
}

CVec CodeMatrix::spread(std::span<const cplx> symbols) const
{
    CVec chips(static_cast<std::size_t>(sf_));
    spread(symbols, chips);
    return chips;
}

void CodeMatrix::despread(std::span<const cplx> chips, std::span<cplx> symbols) const
{
    if (static_cast<int>(chips.size()) != sf_ || static_cast<int>(symbols.size()) != n_codes())
        throw ConfigError("despread: dimension mismatch");
    std::vector<cplx> work(chips.begin(), chips.end());
    fwht(std::span<cplx>(work));
    const double s = 1.0 / std::sqrt(static_cast<double>(sf_));
    for (std::size_t k = 0; k < cols_.size(); ++k)
        symbols[k] = work[static_cast<std::size_t>(cols_[k])] * s;
}

CVec CodeMatrix::despread(std::span<const cplx> chips) const
{
    CVec out(cols_.size());
    despread(chips, out);
    return out;
}

void CodeMatrix::coupling(std::span<const cplx> w, std::span<cplx> out) const
{
    const auto k = cols_.size();
    if (static_cast<int>(w.size()) != sf_ || out.size() != k * k)
        throw ConfigError("coupling: dimension mismatch");
    std::vector<cplx> spec(w.begin(), w.end());
    fwht(std::span<cplx>(spec));
    const double s = 1.0 / sf_;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            out[a * k + b] = spec[static_cast<std::size_t>(cols_[a] ^ cols_[b])] * s;
}

CodeMatrix hadamard_codes(int spreading_factor, int n_codes)
{
    if (!is_power_of_two(spreading_factor))
        throw ConfigError("spreading factor must be a power of two");
    if (n_codes < 1 || n_codes > spreading_factor)
        throw ConfigError("number of codes must satisfy 1 <= K <= S_F");
    std::vector<int> cols(static_cast<std::size_t>(n_codes));
    std::iota(cols.begin(), cols.end(), 0);
    return CodeMatrix(spreading_factor, std::move(cols));
}

CodeMatrix random_hadamard_codes(int spreading_factor, int n_codes, std::uint64_t seed)
{
    if (!is_power_of_two(spreading_factor))
        throw ConfigError("spreading factor must be a power of two");
    if (n_codes < 1 || n_codes > spreading_factor)
        throw ConfigError("number of codes must satisfy 1 <= K <= S_F");
    std::vector<int> others(static_cast<std::size_t>(spreading_factor - 1));
    std::iota(others.begin(), others.end(), 1);
    std::mt19937_64 rng(seed);
    std::shuffle(others.begin(), others.end(), rng);
    std::vector<int> cols{0};
    cols.insert(cols.end(), others.begin(), others.begin() + (n_codes - 1));
    return CodeMatrix(spreading_factor, std::move(cols));
}

CVec freq_interleave(std::span<const cplx> chips, int spreading_factor, int n_subbands)
{
    const auto sf = static_cast<std::size_t>(spreading_factor);
    const auto nu = static_cast<std::size_t>(n_subbands);
    if (chips.size() != sf * nu)
        throw ConfigError("freq_interleave: input length must be S_F * N_u");
    CVec out(chips.size());
    for (std::size_t m = 0; m < nu; ++m)
        for (std::size_t j = 0; j < sf; ++j)
            out[j * nu + m] = chips[m * sf + j];
    return out;
}

CVec freq_deinterleave(std::span<const cplx> carriers, int spreading_factor, int n_subbands)
{
    const auto sf = static_cast<std::size_t>(spreading_factor);
    const auto nu = static_cast<std::size_t>(n_subbands);
    if (carriers.size() != sf * nu)
        throw ConfigError("freq_deinterleave: input length must be S_F * N_u");
    CVec out(carriers.size());
    for (std::size_t m = 0; m < nu; ++m)
        for (std::size_t j = 0; j < sf; ++j)
            out[m * sf + j] = carriers[j * nu + m];
    return out;
}

} // namespace mccdma
