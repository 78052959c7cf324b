#include "mccdma/simkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace mccdma {

namespace {

// Stream tags for the per-frame generators.
enum : std::uint64_t { kUserBits = 1, kOtherBits = 2, kChannel = 3, kNoise = 4 };

void random_bits(Bits& out, std::mt19937_64& rng)
{
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i % 64 == 0)
            word = rng();
        out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
}

std::string format_double(const char* fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ','))
        out.push_back(cur);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

void validate(const StopRule& r)
{
    if (r.min_frames < 0 || r.max_frames < 1 || r.max_frames < r.min_frames)
        throw ConfigError("stop rule needs 0 <= min_frames <= max_frames and max_frames >= 1");
    if (r.min_bit_errors < 0 || r.min_frame_errors < 0)
        throw ConfigError("stop rule error targets must be non-negative");
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t z = a ^ (b * 0x9E3779B97F4A7C15ull);
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t point_seed(std::uint64_t master, double ebn0_db)
{
    const auto milli = static_cast<std::int64_t>(std::llround(ebn0_db * 1000.0));
    return mix_seed(master, static_cast<std::uint64_t>(milli));
}

// ---------------------------------------------------------------------------
// LinkSimulator

namespace {

CodeMatrix make_codes(const SystemParams& p)
{
    if (p.code_assignment == CodeAssignment::Random)
        return random_hadamard_codes(p.spreading_factor, p.n_users, mix_seed(p.seed, 0xC0DE));
    return hadamard_codes(p.spreading_factor, p.n_users);
}

ChannelGeometry make_geometry(const SystemParams& p, const std::vector<int>& layout)
{
    return ChannelGeometry{p.fft_size, p.guard_len, layout, (p.fft_size + p.guard_len) / p.sampling_freq};
}

} // namespace

LinkSimulator::LinkSimulator(const SystemParams& params, DetectorSpec detector)
    : params_(validate(params)),
      spec_(std::move(detector)),
      codes_(make_codes(params)),
      constellation_(params.modulation),
      layout_(symmetric_layout(params.fft_size, params.n_carriers)),
      channel_(resolve_pdp(params.pdp), make_geometry(params, layout_), doppler_hz(params), params.fading)
{
    validate(spec_);
    if (params.code_rate != CodeRate::Uncoded)
        code_ = fec::umts_code(params.code_rate);
    interleaver_ = fec::Interleaver(static_cast<std::size_t>(params_.coded_capacity), mix_seed(params.seed, 0x1EAF));
}

std::unique_ptr<LinkSimulator::Workspace> LinkSimulator::make_workspace() const
{
    return std::make_unique<Workspace>(Workspace{OfdmModem(params_.p.fft_size, params_.p.guard_len, layout_)});
}

FrameOutcome LinkSimulator::run_frame(Workspace& ws, std::uint64_t frame_seed, double noise_var) const
{
    const auto& p = params_.p;
    const auto k = static_cast<std::size_t>(p.n_users);
    const auto sf = static_cast<std::size_t>(p.spreading_factor);
    const auto nu = static_cast<std::size_t>(params_.n_subbands);
    const auto n_sym = static_cast<std::size_t>(p.frame_ofdm_symbols);
    const auto cap = static_cast<std::size_t>(params_.coded_capacity);

    // Transmitter, user 0: encode, pad, interleave, map.
    std::mt19937_64 user_rng(mix_seed(frame_seed, kUserBits));
    Bits info(static_cast<std::size_t>(params_.info_bits));
    random_bits(info, user_rng);
    Bits coded = code_ ? fec::conv_encode(info, *code_) : info;
    coded.resize(cap, 0);
    std::vector<CVec> symbols(k);
    symbols[0] = constellation_.map(interleaver_.interleave(coded));

    // Interfering users carry coded, interleaved data; i.i.d. bits stand in.
    std::mt19937_64 other_rng(mix_seed(frame_seed, kOtherBits));
    Bits other(cap);
    for (std::size_t u = 1; u < k; ++u) {
        random_bits(other, other_rng);
        symbols[u] = constellation_.map(other);
    }

    // Spread, frequency-interleave and OFDM-modulate every symbol.
    const auto len = static_cast<std::size_t>(ws.modem.symbol_len());
    CVec tx(n_sym * len);
    CVec block(k), chips(sf), subband_chips(sf * nu);
    for (std::size_t t = 0; t < n_sym; ++t) {
        for (std::size_t m = 0; m < nu; ++m) {
            for (std::size_t u = 0; u < k; ++u)
                block[u] = symbols[u][t * nu + m];
            codes_.spread(block, std::span<cplx>(subband_chips).subspan(m * sf, sf));
        }
        const CVec carriers = freq_interleave(subband_chips, p.spreading_factor, params_.n_subbands);
        ws.modem.modulate(carriers, std::span<cplx>(tx).subspan(t * len, len));
    }

    ChannelRealization channel = channel_.realize(p.frame_ofdm_symbols, mix_seed(frame_seed, kChannel));
    channel.noise_var = noise_var;
    const CVec rx = apply(tx, channel, mix_seed(frame_seed, kNoise));

    // Receiver: demodulate, de-interleave carriers, detect per sub-band.
    CVec est(params_.symbols_per_user);
    std::vector<double> var(static_cast<std::size_t>(params_.symbols_per_user));
    CVec carriers(layout_.size());
    for (std::size_t t = 0; t < n_sym; ++t) {
        ws.modem.demodulate(std::span<const cplx>(rx).subspan(t * len, len), carriers);
        const CVec y = freq_deinterleave(carriers, p.spreading_factor, params_.n_subbands);
        const CVec h = freq_deinterleave(channel.H[t], p.spreading_factor, params_.n_subbands);
        for (std::size_t m = 0; m < nu; ++m) {
            SubbandProblem pb{std::span<const cplx>(y).subspan(m * sf, sf), std::span<const cplx>(h).subspan(m * sf, sf), &codes_,
                              noise_var, 1.0};
            std::span<const cplx> truth;
            if (spec_.genie) {
                for (std::size_t u = 0; u < k; ++u)
                    block[u] = symbols[u][t * nu + m];
                truth = block;
            }
            const auto r = detect(pb, spec_, constellation_, truth, 0);
            est[t * nu + m] = r.d_hat[0];
            // Exact detectors report zero error at zero noise; keep LLRs finite.
            var[t * nu + m] = std::max(r.noise_var[0], 1e-12);
        }
    }

    const Llrs llrs = interleaver_.deinterleave(constellation_.soft_demap(est, var));
    Bits decoded;
    if (code_) {
        const std::span<const double> payload(llrs.data(), static_cast<std::size_t>(params_.encoded_bits));
        decoded = fec::decode(payload, *code_, params_.info_bits);
    } else {
        decoded.resize(info.size());
        for (std::size_t i = 0; i < info.size(); ++i)
            decoded[i] = llrs[i] < 0.0 ? 1 : 0;
    }

    FrameOutcome out;
    out.bits = static_cast<long long>(info.size());
    for (std::size_t i = 0; i < info.size(); ++i)
        out.bit_errors += decoded[i] != info[i] ? 1 : 0;
    return out;
}

// ---------------------------------------------------------------------------
// Points and sweeps

SimRecord run_point(const SystemParams& params, const DetectorSpec& detector, double ebn0_db, const StopRule& stop,
                    std::uint64_t seed, const RunOptions& options)
{
    validate(stop);
    const auto start = std::chrono::steady_clock::now();
    const LinkSimulator sim(params, detector);
    const double noise_var = ebn0_to_noisevar(ebn0_db, sim.params());
    const int workers = std::max(1, options.workers);
    const long long batch = std::max(1, options.batch_frames);

    std::vector<std::unique_ptr<LinkSimulator::Workspace>> spaces;
    for (int w = 0; w < workers; ++w)
        spaces.push_back(sim.make_workspace());

    SimRecord rec;
    rec.detector = to_string(detector);
    rec.users = params.n_users;
    rec.ebn0_db = ebn0_db;
    rec.seed = seed;

    std::vector<FrameOutcome> results;
    bool done = false;
    for (long long first = 0; !done; first += batch) {
        const long long count = std::min(batch, stop.max_frames - first);
        results.assign(static_cast<std::size_t>(count), {});
        auto work = [&](int w) {
            for (long long i = w; i < count; i += workers)
                results[static_cast<std::size_t>(i)] =
                    sim.run_frame(*spaces[static_cast<std::size_t>(w)], mix_seed(seed, static_cast<std::uint64_t>(first + i)), noise_var);
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(work, w);
        }
        // Frames are accounted in index order, so the stopping frame does not
        // depend on the worker count.
        for (const auto& f : results) {
            rec.frames_sent += 1;
            rec.bits_sent += f.bits;
            rec.bit_errors += f.bit_errors;
            rec.frame_errors += f.bit_errors > 0 ? 1 : 0;
            const bool enough = rec.frames_sent >= stop.min_frames &&
                                (rec.bit_errors >= stop.min_bit_errors || rec.frame_errors >= stop.min_frame_errors);
            if (enough || rec.frames_sent >= stop.max_frames) {
                done = true;
                break;
            }
        }
    }
    rec.ber = rec.bits_sent ? static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits_sent) : 0.0;
    rec.fer = rec.frames_sent ? static_cast<double>(rec.frame_errors) / static_cast<double>(rec.frames_sent) : 0.0;
    rec.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::vector<SweepPoint> sweep_plan(const std::vector<DetectorSpec>& detectors, const std::vector<double>& ebn0_grid,
                                   const std::vector<int>& load_grid)
{
    std::vector<SweepPoint> plan;
    for (int users : load_grid)
        for (const auto& d : detectors)
            for (double e : ebn0_grid)
                plan.push_back({plan.size(), d, users, e});
    return plan;
}

std::vector<SimRecord> sweep(const SystemParams& params, const std::vector<DetectorSpec>& detectors,
                             const std::vector<double>& ebn0_grid, const std::vector<int>& load_grid, const StopRule& stop,
                             std::uint64_t master_seed, const RunOptions& options, Shard shard,
                             const std::function<void(const SimRecord&)>& on_record)
{
    if (shard.count < 1 || shard.index < 0 || shard.index >= shard.count)
        throw ConfigError("invalid shard");
    std::vector<SimRecord> out;
    for (const auto& pt : sweep_plan(detectors, ebn0_grid, load_grid)) {
        if (static_cast<int>(pt.index % static_cast<std::size_t>(shard.count)) != shard.index)
            continue;
        auto p = params;
        p.n_users = pt.users;
        out.push_back(run_point(p, pt.detector, pt.ebn0_db, stop, point_seed(master_seed, pt.ebn0_db), options));
        if (on_record)
            on_record(out.back());
    }
    return out;
}

std::vector<SimRecord> merge_shards(const std::vector<std::vector<SimRecord>>& shards)
{
    std::vector<SimRecord> out;
    std::vector<std::size_t> pos(shards.size(), 0);
    for (bool more = true; more;) {
        more = false;
        for (std::size_t s = 0; s < shards.size(); ++s)
            if (pos[s] < shards[s].size()) {
                out.push_back(shards[s][pos[s]++]);
                more = true;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Required Eb/N0

std::optional<double> required_ebn0(std::vector<SimRecord> records, double target, Metric metric)
{
    if (!(target > 0.0 && target < 1.0))
        throw ConfigError("target error rate must lie in (0, 1)");
    std::sort(records.begin(), records.end(), [](const SimRecord& a, const SimRecord& b) { return a.ebn0_db < b.ebn0_db; });
    if (records.size() < 2)
        return std::nullopt;

    std::vector<double> x, y;
    double running = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        double v;
        if (metric == Metric::BER)
            v = r.bit_errors > 0 ? r.ber : 0.5 / static_cast<double>(std::max<long long>(r.bits_sent, 1));
        else
            v = r.frame_errors > 0 ? r.fer : 0.5 / static_cast<double>(std::max<long long>(r.frames_sent, 1));
        running = std::min(running, v);
        x.push_back(r.ebn0_db);
        y.push_back(running);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] == target)
            return x[i];
        if (i + 1 < x.size() && y[i] > target && y[i + 1] < target) {
            const double l0 = std::log10(y[i]), l1 = std::log10(y[i + 1]);
            return x[i] + (std::log10(target) - l0) * (x[i + 1] - x[i]) / (l1 - l0);
        }
    }
    return std::nullopt;
}

std::vector<RequiredPoint> extract_required(const std::vector<SimRecord>& records, double target, Metric metric)
{
    std::vector<std::pair<std::string, int>> order;
    std::map<std::pair<std::string, int>, std::vector<SimRecord>> groups;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.detector, r.users);
        if (!groups.contains(key))
            order.push_back(key);
        groups[key].push_back(r);
    }
    std::vector<RequiredPoint> out;
    for (const auto& key : order)
        out.push_back({key.first, key.second, metric, target, required_ebn0(groups[key], target, metric)});
    return out;
}

// ---------------------------------------------------------------------------
// CSV

const char* const csv_header = "detector,K,ebn0_db,bits,bit_errors,frames,frame_errors,ber,fer,seed";
const char* const required_csv_header = "detector,K,metric,target,required_ebn0_db";

void write_csv_header(std::ostream& out)
{
    out << csv_header << '\n';
}

void write_csv_row(std::ostream& out, const SimRecord& r)
{
    out << r.detector << ',' << r.users << ',' << format_double("%.6g", r.ebn0_db) << ',' << r.bits_sent << ','
        << r.bit_errors << ',' << r.frames_sent << ',' << r.frame_errors << ',' << format_double("%.6e", r.ber) << ','
        << format_double("%.6e", r.fer) << ',' << r.seed << '\n';
}

std::string to_csv(const std::vector<SimRecord>& records)
{
    std::ostringstream s;
    write_csv_header(s);
    for (const auto& r : records)
        write_csv_row(s, r);
    return s.str();
}

std::vector<SimRecord> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("empty CSV input");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != csv_header)
        throw ConfigError("unexpected CSV header: '" + line + "'");
    std::vector<SimRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto f = split_csv(line);
        if (f.size() != 10)
            throw ConfigError("CSV line " + std::to_string(lineno) + ": expected 10 fields");
        try {
            SimRecord r;
            r.detector = f[0];
            r.users = std::stoi(f[1]);
            r.ebn0_db = std::stod(f[2]);
            r.bits_sent = std::stoll(f[3]);
            r.bit_errors = std::stoll(f[4]);
            r.frames_sent = std::stoll(f[5]);
            r.frame_errors = std::stoll(f[6]);
            r.ber = std::stod(f[7]);
            r.fer = std::stod(f[8]);
            r.seed = std::stoull(f[9]);
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ConfigError("CSV line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return out;
}

std::vector<SimRecord> read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    return read_csv(in);
}

void write_required_csv(std::ostream& out, const std::vector<RequiredPoint>& points)
{
    out << required_csv_header << '\n';
    for (const auto& p : points) {
        out << p.detector << ',' << p.users << ',' << (p.metric == Metric::BER ? "BER" : "FER") << ','
            << format_double("%.6g", p.target) << ',';
        if (p.ebn0_db)
            out << format_double("%.4f", *p.ebn0_db);
        else
            out << "not_reached";
        out << '\n';
    }
}

std::vector<double> parse_ebn0_grid(const std::string& text)
{
    std::vector<double> out;
    try {
        if (text.find(':') != std::string::npos) {
            std::vector<double> parts;
            std::istringstream in(text);
            std::string tok;
            while (std::getline(in, tok, ':'))
                parts.push_back(std::stod(tok));
            if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0])
                throw ConfigError("Eb/N0 range must be start:step:stop with step > 0 and stop >= start");
            const auto n = static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
            for (long i = 0; i <= n; ++i)
                out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
        } else {
            std::istringstream in(text);
            std::string tok;
            while (std::getline(in, tok, ','))
                out.push_back(std::stod(tok));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::logic_error&) {
        throw ConfigError("invalid Eb/N0 grid '" + text + "'");
    }
    if (out.empty())
        throw ConfigError("empty Eb/N0 grid");
    return out;
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::istringstream in(text);
    std::string tok;
    try {
        while (std::getline(in, tok, ','))
            out.push_back(std::stoi(tok));
    } catch (const std::logic_error&) {
        throw ConfigError("invalid integer list '" + text + "'");
    }
    if (out.empty())
        throw ConfigError("empty integer list");
    return out;
}

} // namespace mccdma
