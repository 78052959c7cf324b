#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mccdma/simkit.hpp"

#include <cmath>
#include <sstream>

using namespace mccdma;

namespace {

SimRecord rec(double ebn0, double ber, long long bits = 1000000)
{
    SimRecord r;
    r.detector = "mmsec";
    r.users = 4;
    r.ebn0_db = ebn0;
    r.bits_sent = bits;
    r.bit_errors = static_cast<long long>(ber * static_cast<double>(bits) + 0.5);
    r.ber = ber;
    r.frames_sent = 100;
    r.frame_errors = r.bit_errors > 0 ? 10 : 0;
    r.fer = static_cast<double>(r.frame_errors) / 100.0;
    return r;
}

StopRule quick(long long frames)
{
    StopRule s;
    s.min_bit_errors = 1000000;
    s.min_frame_errors = 1000000;
    s.max_frames = frames;
    return s;
}

SystemParams small_desk()
{
    SystemParams p = desk_preset();
    p.n_users = 4;
    return p;
}

bool same_counts(const SimRecord& a, const SimRecord& b)
{
    return a.detector == b.detector && a.users == b.users && a.ebn0_db == b.ebn0_db && a.bits_sent == b.bits_sent &&
           a.bit_errors == b.bit_errors && a.frames_sent == b.frames_sent && a.frame_errors == b.frame_errors && a.seed == b.seed;
}

} // namespace

TEST_CASE("required Eb/N0 interpolates in log BER")
{
    const auto r = required_ebn0({rec(4.0, 1e-3), rec(6.0, 1e-5)}, 1e-4, Metric::BER);
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("required Eb/N0 on a grid point is that point")
{
    const auto r = required_ebn0({rec(2.0, 1e-1), rec(4.0, 1e-2), rec(6.0, 1e-3)}, 1e-2, Metric::BER);
    REQUIRE(r.has_value());
    CHECK(*r == 4.0);
}

TEST_CASE("required Eb/N0 not reached")
{
    CHECK_FALSE(required_ebn0({rec(2.0, 0.2), rec(4.0, 0.1), rec(6.0, 0.05)}, 1e-2, Metric::BER).has_value());
    CHECK_FALSE(required_ebn0({rec(2.0, 0.2)}, 1e-2, Metric::BER).has_value());
    CHECK_THROWS_AS(required_ebn0({rec(2.0, 0.2)}, 0.0, Metric::BER), ConfigError);
}

TEST_CASE("required Eb/N0 smoothing")
{
    // Unsorted input and a non-monotone bump: the running minimum removes it.
    const auto r = required_ebn0({rec(6.0, 1e-3), rec(2.0, 1e-1), rec(4.0, 2e-1)}, 1e-2, Metric::BER);
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(5.0).epsilon(1e-12));

    // Zero errors count as half an event.
    const auto z = required_ebn0({rec(4.0, 1e-3, 2000), rec(6.0, 0.0, 500000)}, 1e-5, Metric::BER);
    REQUIRE(z.has_value());
    CHECK(*z == doctest::Approx(4.0 + 4.0 / 3.0).epsilon(1e-12));

    const auto f = required_ebn0({rec(4.0, 1e-3), rec(6.0, 0.0)}, 0.05, Metric::FER);
    REQUIRE(f.has_value());
    CHECK(*f > 4.0);
    CHECK(*f < 6.0);
}

TEST_CASE("extract groups by detector and load")
{
    std::vector<SimRecord> rs{rec(2.0, 1e-1), rec(4.0, 1e-3)};
    auto g = rec(2.0, 0.3);
    g.detector = "egc";
    rs.push_back(g);
    g.ebn0_db = 4.0;
    rs.push_back(g);
    const auto pts = extract_required(rs, 1e-2, Metric::BER);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].detector == "mmsec");
    CHECK(pts[0].ebn0_db.has_value());
    CHECK(*pts[0].ebn0_db == doctest::Approx(3.0));
    CHECK(pts[1].detector == "egc");
    CHECK_FALSE(pts[1].ebn0_db.has_value());

    std::ostringstream out;
    write_required_csv(out, pts);
    CHECK(out.str() == "detector,K,metric,target,required_ebn0_db\nmmsec,4,BER,0.01,3.0000\negc,4,BER,0.01,not_reached\n");
}

TEST_CASE("simulation CSV roundtrip")
{
    std::vector<SimRecord> rs{rec(1.5, 0.0123456789), rec(-2.0, 1e-7)};
    rs[1].detector = "poly:L=3:mode=exact";
    rs[1].seed = 18446744073709551615ULL;
    const auto text = to_csv(rs);
    CHECK(text.rfind(std::string(csv_header) + "\n", 0) == 0);
    std::istringstream in(text);
    const auto back = read_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(same_counts(back[0], rs[0]));
    CHECK(same_counts(back[1], rs[1]));
    CHECK(back[0].ber == doctest::Approx(0.0123456789).epsilon(1e-6));
    CHECK(to_csv(back) == text);

    std::istringstream bad_header("a,b\n");
    CHECK_THROWS_AS(read_csv(bad_header), ConfigError);
    std::istringstream short_row(std::string(csv_header) + "\nmmsec,4\n");
    CHECK_THROWS_AS(read_csv(short_row), ConfigError);
    std::istringstream bad_num(std::string(csv_header) + "\nmmsec,x,1,1,1,1,1,1,1,1\n");
    CHECK_THROWS_AS(read_csv(bad_num), ConfigError);
    CHECK_THROWS_AS(read_csv_file("/nonexistent.csv"), IoError);
}

TEST_CASE("grid parsing")
{
    CHECK(parse_ebn0_grid("0:2:6") == std::vector<double>{0, 2, 4, 6});
    CHECK(parse_ebn0_grid("0:0.5:1") == std::vector<double>{0, 0.5, 1});
    CHECK(parse_ebn0_grid("1,3.5") == std::vector<double>{1, 3.5});
    CHECK(parse_int_list("1,4,8") == std::vector<int>{1, 4, 8});
    for (const char* bad : {"", "0:0:4", "4:1:0", "1:x:3", "a", "0:1"})
        CHECK_THROWS_AS(parse_ebn0_grid(bad), ConfigError);
    CHECK_THROWS_AS(parse_int_list("1,b"), ConfigError);
}

TEST_CASE("seed mixing")
{
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    CHECK(point_seed(7, 4.0) == point_seed(7, 4.0000001));
    CHECK(point_seed(7, 4.0) != point_seed(7, 4.5));
}

TEST_CASE("zero noise and an exact detector give no errors")
{
    for (const char* det : {"gmmse", "mmsec", "poly:L=8"}) {
        const LinkSimulator sim(desk_preset(), parse_detector(det));
        auto ws = sim.make_workspace();
        for (std::uint64_t f = 0; f < 20; ++f) {
            const auto o = sim.run_frame(*ws, f, 0.0);
            CHECK(o.bits == sim.params().info_bits);
            CHECK(o.bit_errors == 0);
        }
    }
}

TEST_CASE("frames are deterministic per seed")
{
    const LinkSimulator sim(small_desk(), parse_detector("pic"));
    auto a = sim.make_workspace(), b = sim.make_workspace();
    for (std::uint64_t f = 0; f < 10; ++f) {
        const auto x = sim.run_frame(*a, f, 0.3), y = sim.run_frame(*b, f, 0.3);
        CHECK(x.bit_errors == y.bit_errors);
    }
    const auto r1 = run_point(small_desk(), parse_detector("mmsec"), 3.0, quick(40), 99);
    const auto r2 = run_point(small_desk(), parse_detector("mmsec"), 3.0, quick(40), 99);
    CHECK(same_counts(r1, r2));
    CHECK(r1.frames_sent == 40);
}

TEST_CASE("worker count does not change the record")
{
    StopRule s;
    s.min_bit_errors = 150;
    const auto a = run_point(small_desk(), parse_detector("gmmse"), 2.0, s, 5, RunOptions{1, 16});
    const auto b = run_point(small_desk(), parse_detector("gmmse"), 2.0, s, 5, RunOptions{3, 16});
    const auto c = run_point(small_desk(), parse_detector("gmmse"), 2.0, s, 5, RunOptions{8, 7});
    CHECK(same_counts(a, b));
    CHECK(same_counts(a, c));
    CHECK(a.bit_errors >= 150);
}

TEST_CASE("stop rule")
{
    StopRule s;
    s.min_bit_errors = 50;
    s.min_frame_errors = 1000;
    s.max_frames = 500;
    const auto r = run_point(small_desk(), parse_detector("egc"), 0.0, s, 3);
    CHECK(r.bit_errors >= 50);
    CHECK(r.frames_sent < 500);

    s.min_frames = 300;
    const auto m = run_point(small_desk(), parse_detector("egc"), 0.0, s, 3);
    CHECK(m.frames_sent == 300);

    const auto capped = run_point(small_desk(), parse_detector("egc"), 30.0, quick(25), 3);
    CHECK(capped.frames_sent == 25);
    CHECK(capped.bits_sent == 25LL * validate(small_desk()).info_bits);

    s.min_frames = 600;
    CHECK_THROWS_AS(run_point(small_desk(), parse_detector("egc"), 0.0, s, 3), ConfigError);
}

TEST_CASE("single-stage PIC record equals MMSEC")
{
    const auto a = run_point(small_desk(), parse_detector("pic:stages=1"), 4.0, quick(60), 11);
    const auto b = run_point(small_desk(), parse_detector("mmsec"), 4.0, quick(60), 11);
    CHECK(a.bit_errors == b.bit_errors);
    CHECK(a.frame_errors == b.frame_errors);
    CHECK(a.bits_sent == b.bits_sent);
}

TEST_CASE("sweep plan and sharding")
{
    const std::vector<DetectorSpec> dets{parse_detector("mmsec"), parse_detector("egc")};
    const std::vector<double> grid{0.0, 3.0};
    const std::vector<int> loads{2, 4};
    const auto plan = sweep_plan(dets, grid, loads);
    REQUIRE(plan.size() == 8);
    CHECK(plan[0].users == 2);
    CHECK(plan[2].detector == dets[1]);
    CHECK(plan[5].ebn0_db == 3.0);

    const auto serial = sweep(desk_preset(), dets, grid, loads, quick(10), 42);
    REQUIRE(serial.size() == 8);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        CHECK(serial[i].users == plan[i].users);
        CHECK(serial[i].detector == to_string(plan[i].detector));
        CHECK(serial[i].ebn0_db == plan[i].ebn0_db);
        CHECK(serial[i].seed == point_seed(42, plan[i].ebn0_db));
    }

    std::vector<std::vector<SimRecord>> shards;
    std::size_t streamed = 0;
    for (int s = 0; s < 3; ++s)
        shards.push_back(sweep(desk_preset(), dets, grid, loads, quick(10), 42, {}, Shard{s, 3}, [&](const SimRecord&) { ++streamed; }));
    CHECK(streamed == 8);
    const auto merged = merge_shards(shards);
    REQUIRE(merged.size() == serial.size());
    for (std::size_t i = 0; i < merged.size(); ++i)
        CHECK(same_counts(merged[i], serial[i]));
    CHECK(to_csv(merged) == to_csv(serial));

    auto p = small_desk();
    const auto one = sweep(p, {dets[0]}, {3.0}, {4}, quick(10), 42);
    const auto direct = run_point(p, dets[0], 3.0, quick(10), point_seed(42, 3.0));
    REQUIRE(one.size() == 1);
    CHECK(same_counts(one[0], direct));

    CHECK_THROWS_AS(sweep(p, dets, grid, loads, quick(10), 42, {}, Shard{3, 3}), ConfigError);
}
