#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mccdma/ofdm.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mccdma;

namespace {

CVec random_cvec(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& x : v)
        x = {g(rng), g(rng)};
    return v;
}

} // namespace

TEST_CASE("symmetric layout skips DC")
{
    const auto idx = symmetric_layout(64, 32);
    REQUIRE(idx.size() == 32);
    CHECK(idx.front() == 1);
    CHECK(idx[15] == 16);
    CHECK(idx[16] == 48);
    CHECK(idx.back() == 63);

    const auto odd = symmetric_layout(16, 5);
    CHECK(odd == std::vector<int>{1, 2, 3, 14, 15});

    CHECK_THROWS_AS(check_layout({0, 1}, 8), ConfigError);
    CHECK_THROWS_AS(check_layout({2, 1}, 8), ConfigError);
    CHECK_THROWS_AS(symmetric_layout(8, 8), ConfigError);
}

TEST_CASE("zero grid gives zero samples")
{
    OfdmModem m(64, 16, symmetric_layout(64, 32));
    for (auto s : m.modulate(CVec(32)))
        CHECK(s == cplx{});
}

TEST_CASE("single active carrier is a complex exponential")
{
    const int n = 64, k = 5;
    OfdmModem m(n, 8, {k});
    const cplx v(0.3, -1.2);
    const auto s = m.modulate(CVec{v});
    for (int t = 0; t < n + 8; ++t) {
        const double ph = 2.0 * std::numbers::pi * k * (t - 8) / n;
        const cplx ref = v * std::polar(1.0 / std::sqrt(double(n)), ph);
        CHECK(std::abs(s[static_cast<std::size_t>(t)] - ref) < 1e-13);
    }
}

TEST_CASE("roundtrip, Parseval and cyclic prefix")
{
    std::mt19937_64 rng(41);
    for (auto [n, nc, g] : {std::tuple{64, 32, 16}, std::tuple{1024, 736, 216}, std::tuple{16, 15, 0}}) {
        OfdmModem m(n, g, symmetric_layout(n, nc));
        const auto x = random_cvec(static_cast<std::size_t>(nc), rng);
        const auto s = m.modulate(x);
        REQUIRE(s.size() == static_cast<std::size_t>(n + g));

        double ef = 0.0, et = 0.0;
        for (auto v : x)
            ef += std::norm(v);
        for (std::size_t i = static_cast<std::size_t>(g); i < s.size(); ++i)
            et += std::norm(s[i]);
        CHECK(et == doctest::Approx(ef).epsilon(1e-12));

        for (int i = 0; i < g; ++i)
            CHECK(s[static_cast<std::size_t>(i)] == s[static_cast<std::size_t>(n + i)]);

        const auto back = m.demodulate(s);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(std::abs(back[i] - x[i]) < 1e-10);
    }
}

TEST_CASE("cyclic prefix turns linear convolution into per-carrier gains")
{
    const int n = 64, g = 16;
    const auto idx = symmetric_layout(n, 32);
    OfdmModem m(n, g, idx);
    std::mt19937_64 rng(42);

    const std::vector<int> delays{0, 3, 7, 16};
    const auto taps = random_cvec(delays.size(), rng);

    // Two back-to-back symbols; the second one sees the first as ISI.
    CVec tx = m.modulate(random_cvec(32, rng));
    const auto x = random_cvec(32, rng);
    const auto second = m.modulate(x);
    tx.insert(tx.end(), second.begin(), second.end());

    CVec rx(tx.size());
    for (std::size_t t = 0; t < tx.size(); ++t)
        for (std::size_t p = 0; p < delays.size(); ++p) {
            const auto d = static_cast<std::size_t>(delays[p]);
            if (t >= d)
                rx[t] += taps[p] * tx[t - d];
        }

    const auto y = m.demodulate(std::span<const cplx>(rx).subspan(static_cast<std::size_t>(n + g)));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        cplx h{};
        for (std::size_t p = 0; p < delays.size(); ++p)
            h += taps[p] * std::polar(1.0, -2.0 * std::numbers::pi * idx[i] * delays[p] / n);
        CHECK(std::abs(y[i] - h * x[i]) < 1e-10);
    }
}

TEST_CASE("grid helpers match the modem")
{
    std::mt19937_64 rng(43);
    const auto idx = symmetric_layout(32, 16);
    const CarrierGrid grid{idx, random_cvec(16, rng)};
    const auto s = ofdm_modulate(grid, 32, 4);
    const auto back = ofdm_demodulate(s, 32, 4, idx);
    CHECK(back.active_indices == idx);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(std::abs(back.values[i] - grid.values[i]) < 1e-12);

    OfdmModem m(32, 4, idx);
    CHECK_THROWS_AS(m.modulate(CVec(15)), ConfigError);
    CHECK_THROWS_AS(m.demodulate(CVec(35)), ConfigError);
    CHECK_THROWS_AS(OfdmModem(32, 32, idx), ConfigError);
}
