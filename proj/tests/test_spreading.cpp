#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mccdma/spreading.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace mccdma;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

// Sylvester recursion H_2n = [[H, H], [H, -H]], normalized at the end.
MatrixXd sylvester(int n)
{
    MatrixXd h(1, 1);
    h(0, 0) = 1.0;
    while (h.rows() < n) {
        const auto m = h.rows();
        MatrixXd next(2 * m, 2 * m);
        next << h, h, h, -h;
        h = next;
    }
    return h / std::sqrt(static_cast<double>(n));
}

MatrixXcd dense_codes(const CodeMatrix& c)
{
    const MatrixXd h = sylvester(c.spreading_factor());
    MatrixXcd out(c.spreading_factor(), c.n_codes());
    for (int k = 0; k < c.n_codes(); ++k)
        out.col(k) = h.col(c.index(k)).cast<cplx>();
    return out;
}

CVec random_cvec(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& x : v)
        x = {g(rng), g(rng)};
    return v;
}

double max_diff(const CVec& a, const Eigen::VectorXcd& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b(static_cast<Eigen::Index>(i))));
    return m;
}

} // namespace

TEST_CASE("S_F = 2 base matrix")
{
    const auto c = hadamard_codes(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(c.chip(0, 0) == doctest::Approx(r));
    CHECK(c.chip(1, 0) == doctest::Approx(r));
    CHECK(c.chip(0, 1) == doctest::Approx(r));
    CHECK(c.chip(1, 1) == doctest::Approx(-r));
}

TEST_CASE("chips match the Sylvester recursion")
{
    for (int sf : {1, 2, 4, 8, 32, 64}) {
        const auto c = hadamard_codes(sf, sf);
        const MatrixXd h = sylvester(sf);
        for (int l = 0; l < sf; ++l)
            for (int k = 0; k < sf; ++k)
                CHECK(c.chip(l, k) == doctest::Approx(h(l, k)).epsilon(1e-15));
        const MatrixXcd C = dense_codes(c);
        CHECK((C.adjoint() * C - MatrixXcd::Identity(sf, sf)).norm() < 1e-12);
    }
}

TEST_CASE("fast spread and despread equal dense products")
{
    std::mt19937_64 rng(31);
    for (int sf : {4, 8, 32}) {
        for (int k : {1, sf / 2, sf}) {
            const auto c = random_hadamard_codes(sf, k, rng());
            const MatrixXcd C = dense_codes(c);
            const auto d = random_cvec(static_cast<std::size_t>(k), rng);
            const auto y = random_cvec(static_cast<std::size_t>(sf), rng);
            const Eigen::Map<const Eigen::VectorXcd> dv(d.data(), k), yv(y.data(), sf);
            CHECK(max_diff(c.spread(d), C * dv) < 1e-12);
            CHECK(max_diff(c.despread(y), C.adjoint() * yv) < 1e-12);
        }
    }
}

TEST_CASE("spread then despread is the identity")
{
    std::mt19937_64 rng(32);
    const auto c = hadamard_codes(32, 17);
    const auto d = random_cvec(17, rng);
    const auto back = c.despread(c.spread(d));
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(std::abs(back[i] - d[i]) < 1e-12);

    const CVec zero(17);
    for (auto x : c.spread(zero))
        CHECK(x == cplx{});
}

TEST_CASE("coupling equals C^H diag(w) C")
{
    std::mt19937_64 rng(33);
    const auto c = random_hadamard_codes(16, 11, 5);
    const auto w = random_cvec(16, rng);
    CVec t(11 * 11);
    c.coupling(w, t);
    const MatrixXcd C = dense_codes(c);
    const Eigen::Map<const Eigen::VectorXcd> wv(w.data(), 16);
    const MatrixXcd ref = C.adjoint() * wv.asDiagonal() * C;
    for (int a = 0; a < 11; ++a)
        for (int b = 0; b < 11; ++b)
            CHECK(std::abs(t[static_cast<std::size_t>(a * 11 + b)] - ref(a, b)) < 1e-12);
}

TEST_CASE("random assignment keeps code 0 and is seed-stable")
{
    const auto a = random_hadamard_codes(32, 16, 7);
    const auto b = random_hadamard_codes(32, 16, 7);
    CHECK(a.columns() == b.columns());
    CHECK(a.index(0) == 0);
    CHECK_THROWS_AS(CodeMatrix(8, {0, 0}), ConfigError);
    CHECK_THROWS_AS(CodeMatrix(6, {0}), ConfigError);
    CHECK_THROWS_AS(hadamard_codes(8, 9), ConfigError);
}

TEST_CASE("frequency interleaving")
{
    // S_F = 4, N_u = 3: chip j = 2 of sub-band m = 1 lands on carrier 7.
    CVec chips(12);
    chips[1 * 4 + 2] = {1.0, 0.0};
    const auto carriers = freq_interleave(chips, 4, 3);
    for (std::size_t i = 0; i < carriers.size(); ++i)
        CHECK(carriers[i] == (i == 7 ? cplx(1.0, 0.0) : cplx{}));

    std::mt19937_64 rng(34);
    const auto x = random_cvec(8, rng);
    CHECK(freq_interleave(x, 8, 1) == x);

    const auto big = random_cvec(736, rng);
    CHECK(freq_deinterleave(freq_interleave(big, 32, 23), 32, 23) == big);
    CHECK_THROWS_AS(freq_interleave(big, 32, 22), ConfigError);
}

TEST_CASE("fwht rejects non powers of two")
{
    std::vector<double> v(6);
    CHECK_THROWS_AS(fwht(std::span<double>(v)), ConfigError);
}
