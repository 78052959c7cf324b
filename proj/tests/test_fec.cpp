#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mccdma/fec.hpp"

#include <algorithm>
#include <random>

using namespace mccdma;
using namespace mccdma::fec;

namespace {

ConvCode toy_code()
{
    ConvCode c;
    c.constraint_length = 3;
    c.generators = {07, 05};
    return c;
}

Bits random_bits(std::size_t n, std::mt19937_64& rng)
{
    Bits b(n);
    for (auto& x : b)
        x = static_cast<std::uint8_t>(rng() & 1U);
    return b;
}

// Plain shift register: reg[0] is the newest bit, generator MSB taps reg[0].
Bits shift_register_encode(const Bits& msg, int K, const std::vector<unsigned>& gens, const std::vector<int>& keep)
{
    std::vector<int> reg(static_cast<std::size_t>(K), 0);
    Bits in = msg;
    in.insert(in.end(), static_cast<std::size_t>(K - 1), 0);
    Bits out;
    for (auto bit : in) {
        for (int i = K - 1; i > 0; --i)
            reg[static_cast<std::size_t>(i)] = reg[static_cast<std::size_t>(i - 1)];
        reg[0] = bit;
        for (int s : keep) {
            int acc = 0;
            for (int i = 0; i < K; ++i)
                if ((gens[static_cast<std::size_t>(s)] >> (K - 1 - i)) & 1U)
                    acc ^= reg[static_cast<std::size_t>(i)];
            out.push_back(static_cast<std::uint8_t>(acc));
        }
    }
    return out;
}

Llrs noiseless_llrs(const Bits& coded)
{
    Llrs l(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i)
        l[i] = coded[i] ? -4.0 : 4.0;
    return l;
}

} // namespace

TEST_CASE("UMTS rates")
{
    CHECK(umts_mother_code().rate() == doctest::Approx(1.0 / 3.0));
    CHECK(umts_code(CodeRate::Half).rate() == doctest::Approx(0.5));
    CHECK(umts_code(CodeRate::ThreeQuarters).rate() == doctest::Approx(0.75));
    CHECK(umts_code(CodeRate::Half).tail_bits() == 8);
}

TEST_CASE("all-zero input encodes to zeros")
{
    const Bits zeros(50, 0);
    for (auto rate : {CodeRate::Half, CodeRate::ThreeQuarters})
        for (auto b : conv_encode(zeros, umts_code(rate)))
            CHECK(b == 0);
}

TEST_CASE("impulse response of the (7,5) code")
{
    const Bits one{1};
    CHECK(conv_encode(one, toy_code()) == Bits{1, 1, 1, 0, 1, 1});
}

TEST_CASE("rate 1/2 matches a shift-register trace")
{
    std::mt19937_64 rng(11);
    const auto msg = random_bits(32, rng);
    const auto ref = shift_register_encode(msg, 9, {0557, 0663, 0711}, {0, 1});
    const auto got = conv_encode(msg, umts_code(CodeRate::Half));
    CHECK(got.size() == 80);
    CHECK(got == ref);
    CHECK(encode_mother(msg, umts_mother_code()).size() == 96);
}

TEST_CASE("encoding is linear")
{
    std::mt19937_64 rng(12);
    const auto code = umts_code(CodeRate::ThreeQuarters);
    for (int t = 0; t < 20; ++t) {
        const auto a = random_bits(40, rng), b = random_bits(40, rng);
        Bits x(40);
        for (std::size_t i = 0; i < 40; ++i)
            x[i] = a[i] ^ b[i];
        const auto ea = conv_encode(a, code), eb = conv_encode(b, code), ex = conv_encode(x, code);
        for (std::size_t i = 0; i < ex.size(); ++i)
            CHECK(ex[i] == (ea[i] ^ eb[i]));
    }
}

TEST_CASE("punctured length follows the pattern")
{
    const auto code = umts_code(CodeRate::ThreeQuarters);
    for (int n = 1; n < 40; ++n) {
        const int steps = n + code.tail_bits();
        int kept = 0;
        for (int t = 0; t < steps; ++t)
            for (int s = 0; s < code.streams(); ++s)
                kept += code.puncture[static_cast<std::size_t>(t % code.period())][static_cast<std::size_t>(s)] ? 1 : 0;
        CHECK(encoded_length(code, n) == kept);
        CHECK(conv_encode(Bits(static_cast<std::size_t>(n), 1), code).size() == static_cast<std::size_t>(kept));
    }
}

TEST_CASE("puncture and depuncture bookkeeping")
{
    const auto code = umts_code(CodeRate::Half);
    const Bits six{1, 0, 1, 1, 1, 0};
    CHECK(puncture(six, code) == Bits{1, 0, 1, 1});

    const Llrs four{1.0, 2.0, 3.0, 4.0};
    CHECK(depuncture(four, code, 2) == Llrs{1.0, 2.0, 0.0, 3.0, 4.0, 0.0});

    ConvCode plain = umts_mother_code();
    CHECK(puncture(six, plain) == six);
}

TEST_CASE("noiseless decoding recovers the message")
{
    std::mt19937_64 rng(13);
    for (auto rate : {CodeRate::Half, CodeRate::ThreeQuarters}) {
        const auto code = umts_code(rate);
        for (int n : {1, 7, 100, 333}) {
            const auto msg = random_bits(static_cast<std::size_t>(n), rng);
            const auto llr = noiseless_llrs(conv_encode(msg, code));
            CHECK(decode(llr, code, n) == msg);
        }
    }
}

TEST_CASE("all-zero LLRs decode to zeros")
{
    const auto code = umts_code(CodeRate::Half);
    const Llrs zero(static_cast<std::size_t>(encoded_length(code, 30)), 0.0);
    CHECK(decode(zero, code, 30) == Bits(30, 0));
}

TEST_CASE("toy code corrects one flipped hard bit")
{
    const auto code = toy_code();
    const Bits msg{1, 0, 1, 1, 0, 0, 1, 0};
    auto coded = conv_encode(msg, code);
    REQUIRE(coded.size() == 20);
    coded[5] ^= 1;
    CHECK(decode(noiseless_llrs(coded), code, 8) == msg);
}

TEST_CASE("Viterbi equals exhaustive ML on noisy toy-code words")
{
    const auto code = toy_code();
    std::mt19937_64 rng(14);
    std::normal_distribution<double> noise(0.0, 0.9);
    std::uniform_int_distribution<int> len(1, 12);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int k = len(rng);
        const auto msg = random_bits(static_cast<std::size_t>(k), rng);
        const auto coded = conv_encode(msg, code);
        Llrs llr(coded.size());
        for (std::size_t i = 0; i < coded.size(); ++i)
            llr[i] = (coded[i] ? -1.0 : 1.0) + noise(rng);

        double best = -1e300;
        Bits ml;
        for (unsigned m = 0; m < (1U << k); ++m) {
            Bits cand(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i)
                cand[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((m >> i) & 1U);
            const auto c = conv_encode(cand, code);
            double metric = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i)
                metric += c[i] ? -llr[i] : llr[i];
            if (metric > best) {
                best = metric;
                ml = cand;
            }
        }
        mismatches += decode(llr, code, k) == ml ? 0 : 1;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("malformed codes are rejected")
{
    ConvCode c = toy_code();
    c.generators = {017, 05};
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = toy_code();
    c.puncture = {{false, false}};
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = toy_code();
    c.puncture = {{true}};
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("interleaver")
{
    const Interleaver id = Interleaver::identity(10);
    const Bits b{1, 0, 0, 1, 1, 0, 1, 0, 0, 0};
    CHECK(id.interleave(b) == b);

    const Interleaver il(257, 99);
    auto perm = il.permutation();
    std::sort(perm.begin(), perm.end());
    for (std::uint32_t i = 0; i < perm.size(); ++i)
        CHECK(perm[i] == i);

    std::mt19937_64 rng(15);
    const auto bits = random_bits(257, rng);
    const auto x = il.interleave(bits);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(x[i] == bits[il.permutation()[i]]);

    Llrs l(257);
    for (std::size_t i = 0; i < l.size(); ++i)
        l[i] = x[i] ? -1.0 - static_cast<double>(i) : 1.0 + static_cast<double>(i);
    const auto back = il.deinterleave(l);
    for (std::size_t i = 0; i < back.size(); ++i)
        CHECK((back[i] < 0.0) == (bits[i] == 1));

    CHECK(Interleaver(257, 99).permutation() == il.permutation());
    CHECK_THROWS(il.interleave(Bits(3)));
}
