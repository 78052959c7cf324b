// mcsim: MC-CDMA downlink link-level simulator.
//
//   mcsim simulate --config <file> --detectors <list> --ebn0 <start:step:stop>
//                  --users <list> --out <csv> [--seed n] [--preset paper|desk]
//   mcsim extract --in <csv> --target-ber 1e-4 --out <csv>
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error.

#include "mccdma/simkit.hpp"

#include <CLI11.hpp>

#include <sstream>
#include <fstream>
#include <iostream>

namespace {

constexpr int kConfigError = 1;
constexpr int kIoError = 2;

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ','))
        if (!cur.empty())
            out.push_back(cur);
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace mccdma;

    CLI::App app{"MC-CDMA downlink multi-user detection simulator"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "Run a BER/FER sweep over Eb/N0 and load");
    std::string config_path, preset_name = "desk", detectors_text, ebn0_text, users_text, out_path;
    std::uint64_t seed = 1;
    bool seed_given = false;
    int workers = 1;
    int shard_index = 0, shard_count = 1;
    StopRule stop;
    simulate->add_option("--config", config_path, "Key/value configuration file");
    simulate->add_option("--preset", preset_name, "Base parameter set: paper or desk")->capture_default_str();
    simulate->add_option("--detectors", detectors_text, "Comma-separated detector specs, e.g. mmsec,gmmse,pic:stages=2")->required();
    simulate->add_option("--ebn0", ebn0_text, "Eb/N0 grid in dB, start:step:stop or a comma list")->required();
    simulate->add_option("--users", users_text, "Comma-separated numbers of active codes")->required();
    simulate->add_option("--out", out_path, "Output CSV")->required();
    auto* seed_opt = simulate->add_option("--seed", seed, "Master seed (overrides the config)");
    simulate->add_option("--workers", workers, "Worker threads per point")->capture_default_str();
    simulate->add_option("--min-bit-errors", stop.min_bit_errors)->capture_default_str();
    simulate->add_option("--min-frame-errors", stop.min_frame_errors)->capture_default_str();
    simulate->add_option("--min-frames", stop.min_frames)->capture_default_str();
    simulate->add_option("--max-frames", stop.max_frames)->capture_default_str();
    simulate->add_option("--shard-index", shard_index, "Run only points with index mod count == shard index")->capture_default_str();
    simulate->add_option("--shard-count", shard_count)->capture_default_str();

    auto* extract = app.add_subcommand("extract", "Interpolate required Eb/N0 at a target BER or FER");
    std::string in_path, extract_out;
    double target_ber = 0.0, target_fer = 0.0;
    extract->add_option("--in", in_path, "Simulation CSV")->required();
    extract->add_option("--out", extract_out, "Output CSV")->required();
    auto* ber_opt = extract->add_option("--target-ber", target_ber, "Target bit error rate");
    auto* fer_opt = extract->add_option("--target-fer", target_fer, "Target frame error rate");
    ber_opt->excludes(fer_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }
    seed_given = seed_opt->count() > 0;

    try {
        if (*simulate) {
            SystemParams params = preset(preset_name);
            if (!config_path.empty())
                params = load_config(config_path, params);
            if (seed_given)
                params.seed = seed;
            std::vector<DetectorSpec> detectors;
            for (const auto& d : split_list(detectors_text))
                detectors.push_back(parse_detector(d));
            if (detectors.empty())
                throw ConfigError("no detectors given");
            const auto grid = parse_ebn0_grid(ebn0_text);
            const auto users = parse_int_list(users_text);
            validate(stop);
            for (int k : users) {
                auto p = params;
                p.n_users = k;
                validate(p);
            }
            (void)resolve_pdp(params.pdp);

            std::ofstream out(out_path, std::ios::trunc);
            if (!out)
                throw IoError("cannot write '" + out_path + "'");
            write_csv_header(out);
            out.flush();
            sweep(params, detectors, grid, users, stop, params.seed, RunOptions{workers, 128}, Shard{shard_index, shard_count},
                  [&](const SimRecord& r) {
                      write_csv_row(out, r);
                      out.flush();
                      if (!out)
                          throw IoError("write to '" + out_path + "' failed");
                      std::cerr << r.detector << " K=" << r.users << " Eb/N0=" << r.ebn0_db << " dB  BER=" << r.ber
                                << " FER=" << r.fer << " (" << r.frames_sent << " frames, " << r.elapsed << " s)\n";
                  });
        } else if (*extract) {
            if (ber_opt->count() == 0 && fer_opt->count() == 0)
                throw ConfigError("one of --target-ber or --target-fer is required");
            const bool ber = ber_opt->count() > 0;
            const auto records = read_csv_file(in_path);
            const auto points = extract_required(records, ber ? target_ber : target_fer, ber ? Metric::BER : Metric::FER);
            std::ofstream out(extract_out, std::ios::trunc);
            if (!out)
                throw IoError("cannot write '" + extract_out + "'");
            write_required_csv(out, points);
            if (!out)
                throw IoError("write to '" + extract_out + "' failed");
        }
    } catch (const IoError& e) {
        std::cerr << "mcsim: " << e.what() << '\n';
        return kIoError;
    } catch (const ConfigError& e) {
        std::cerr << "mcsim: " << e.what() << '\n';
        return kConfigError;
    }
    return 0;
}
