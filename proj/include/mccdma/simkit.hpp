#pragma once

#include "mccdma/channel.hpp"
#include "mccdma/detectors.hpp"
#include "mccdma/fec.hpp"
#include "mccdma/mapping.hpp"
#include "mccdma/ofdm.hpp"
#include "mccdma/spreading.hpp"
#include "mccdma/sysmodel.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mccdma {

/// One measured operating point.
struct SimRecord {
    std::string detector;
    int users = 0;
    double ebn0_db = 0.0;
    long long bits_sent = 0;
    long long bit_errors = 0;
    long long frames_sent = 0;
    long long frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double elapsed = 0.0;  // seconds, not part of the CSV
    std::uint64_t seed = 0;
};

/// A point stops once it has `min_frames` frames and either error target,
/// or unconditionally at `max_frames`.
struct StopRule {
    long long min_bit_errors = 200;
    long long min_frame_errors = 50;
    long long min_frames = 0;
    long long max_frames = 20000;
};

void validate(const StopRule& rule);

struct RunOptions {
    int workers = 1;
    int batch_frames = 128;
};

/// splitmix64 finalizer applied to a ^ (b * golden ratio).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Seed of a sweep point. Only the master seed and the Eb/N0 value enter,
/// so every detector and load at one Eb/N0 sees the same channel, noise
/// and user-0 data (common random numbers).
std::uint64_t point_seed(std::uint64_t master, double ebn0_db);

/// Outcome of one simulated frame for user 0.
struct FrameOutcome {
    long long bits = 0;
    long long bit_errors = 0;
};

/// Transmitter, channel and receiver chain for fixed parameters and
/// detector. Thread-safe: per-thread state lives in `Workspace`.
class LinkSimulator {
public:
    LinkSimulator(const SystemParams& params, DetectorSpec detector);

    const CheckedParams& params() const { return params_; }
    const DetectorSpec& detector() const { return spec_; }
    const CodeMatrix& codes() const { return codes_; }

    struct Workspace;
    std::unique_ptr<Workspace> make_workspace() const;

    /// Simulates one frame with seeds derived from `frame_seed`.
    FrameOutcome run_frame(Workspace& ws, std::uint64_t frame_seed, double noise_var) const;

private:
    CheckedParams params_;
    DetectorSpec spec_;
    CodeMatrix codes_;
    Constellation constellation_;
    std::optional<fec::ConvCode> code_;
    fec::Interleaver interleaver_;
    std::vector<int> layout_;
    FadingChannel channel_;
};

struct LinkSimulator::Workspace {
    OfdmModem modem;
};

SimRecord run_point(const SystemParams& params, const DetectorSpec& detector, double ebn0_db, const StopRule& stop,
                    std::uint64_t seed, const RunOptions& options = {});

struct Shard {
    int index = 0;
    int count = 1;
};

struct SweepPoint {
    std::size_t index = 0;
    DetectorSpec detector;
    int users = 0;
    double ebn0_db = 0.0;
};

/// Canonical point order: load-major, then detector, then Eb/N0.
std::vector<SweepPoint> sweep_plan(const std::vector<DetectorSpec>& detectors, const std::vector<double>& ebn0_grid,
                                   const std::vector<int>& load_grid);

/// Runs the points of `shard` (index i goes to shard i mod count) in
/// canonical order; `on_record` sees each record as it completes.
std::vector<SimRecord> sweep(const SystemParams& params, const std::vector<DetectorSpec>& detectors,
                             const std::vector<double>& ebn0_grid, const std::vector<int>& load_grid, const StopRule& stop,
                             std::uint64_t master_seed, const RunOptions& options = {}, Shard shard = {},
                             const std::function<void(const SimRecord&)>& on_record = {});

/// Restores canonical order from per-shard results.
std::vector<SimRecord> merge_shards(const std::vector<std::vector<SimRecord>>& shards);

enum class Metric { BER, FER };

/// Eb/N0 at which `metric` crosses `target`, by log-linear interpolation
/// between bracketing points of one detector/load curve.
///
/// The curve is first made non-increasing with a running minimum over
/// increasing Eb/N0; a zero count is replaced by half an event. Returns
/// nullopt ("not reached") when no pair of points brackets the target.
std::optional<double> required_ebn0(std::vector<SimRecord> records, double target, Metric metric);

struct RequiredPoint {
    std::string detector;
    int users = 0;
    Metric metric = Metric::BER;
    double target = 0.0;
    std::optional<double> ebn0_db;
};

/// Groups by (detector, K) in order of first appearance.
std::vector<RequiredPoint> extract_required(const std::vector<SimRecord>& records, double target, Metric metric);

/// CSV: detector,K,ebn0_db,bits,bit_errors,frames,frame_errors,ber,fer,seed
extern const char* const csv_header;
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SimRecord& r);
std::string to_csv(const std::vector<SimRecord>& records);
std::vector<SimRecord> read_csv(std::istream& in);
std::vector<SimRecord> read_csv_file(const std::string& path);

/// CSV: detector,K,metric,target,required_ebn0_db ("not_reached" when absent)
extern const char* const required_csv_header;
void write_required_csv(std::ostream& out, const std::vector<RequiredPoint>& points);

/// Parses "start:step:stop" (inclusive) or a comma list.
std::vector<double> parse_ebn0_grid(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

} // namespace mccdma
