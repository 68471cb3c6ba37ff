#include "myo/io.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "myo/errors.hpp"
#include "myo/rng.hpp"

namespace myo {

using nlohmann::json;

namespace {

constexpr const char* kMagic = "MYOREC";
constexpr const char* kEndOfHeader = "END_HEADER";

[[noreturn]] void malformed(const std::string& what) {
    throw FormatError(FormatError::Kind::malformed_header, what);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
    out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) {
        throw FormatError(FormatError::Kind::dimension, "payload length missing");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_block(std::ostream& out, std::span<const double> values) {
    put_u64(out, static_cast<std::uint64_t>(values.size()) * 8U);
    for (double x : values) put_u64(out, std::bit_cast<std::uint64_t>(x));
}

std::vector<double> get_block(std::istream& in, std::size_t expected_values, const char* what) {
    const std::uint64_t bytes = get_u64(in);
    if (bytes != static_cast<std::uint64_t>(expected_values) * 8U) {
        throw FormatError(FormatError::Kind::dimension,
                          std::string(what) + ": header implies " + std::to_string(expected_values * 8) +
                              " bytes, block declares " + std::to_string(bytes));
    }
    std::vector<double> out(expected_values);
    for (auto& x : out) {
        unsigned char b[8];
        if (!in.read(reinterpret_cast<char*>(b), 8)) {
            throw FormatError(FormatError::Kind::dimension, std::string(what) + ": payload truncated");
        }
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        x = std::bit_cast<double>(v);
    }
    return out;
}

RecordingKind kind_from_string(const std::string& s) {
    if (s == "raw") return RecordingKind::raw;
    if (s == "preprocessed") return RecordingKind::preprocessed;
    malformed("unknown recording kind '" + s + "'");
}

std::size_t expected_rows(RecordingKind kind, std::size_t n_electrodes) {
    if (kind == RecordingKind::raw) return n_electrodes;
    if (n_electrodes < 3) throw FormatError(FormatError::Kind::dimension, "fewer than 3 electrodes");
    return n_electrodes - 2;
}

}  // namespace

std::string to_string(RecordingKind k) { return k == RecordingKind::raw ? "raw" : "preprocessed"; }

void RecordingFile::validate() const {
    array.validate();
    grid.validate();
    if (data.rows() != expected_rows(kind, array.count()) || data.cols() != grid.size()) {
        throw ShapeError("recording data does not match its electrode array and sampling grid");
    }
    if (kind == RecordingKind::preprocessed) {
        if (channel_min.size() != data.rows() || channel_max.size() != data.rows()) {
            throw ShapeError("per-channel scaling ranges must have one entry per channel");
        }
    } else if (!channel_min.empty() || !channel_max.empty()) {
        throw ShapeError("raw recordings carry no scaling ranges");
    }
    if (ground_truth) ground_truth->validate();
}

Recording RecordingFile::to_recording() const {
    if (kind != RecordingKind::raw) throw ConfigError("recording is not raw");
    return {data, array, grid, ground_truth};
}

PreprocessedRecording RecordingFile::to_preprocessed() const {
    if (kind != RecordingKind::preprocessed) throw ConfigError("recording is not preprocessed");
    return {data, channel_min, channel_max};
}

void write_recording(std::ostream& out, const RecordingFile& file) {
    file.validate();
    json h;
    h["format_version"] = kRecordingFormatVersion;
    h["kind"] = to_string(file.kind);
    h["n_electrodes"] = file.array.count();
    h["n_rows"] = file.data.rows();
    h["n_samples"] = file.grid.size();
    h["sample_rate"] = file.grid.sample_rate;
    h["times"] = file.grid.times;
    json pos = json::array();
    for (const auto& p : file.array.positions) pos.push_back({p.axial, p.lateral, p.normal});
    h["electrode_positions"] = pos;
    h["array_uniform"] = file.array.uniform;
    h["units"] = {{"position", "m"},
                  {"time", "s"},
                  {"value", file.kind == RecordingKind::raw ? "V" : "1 (per-channel min-max scaled)"}};
    h["seed"] = file.seed;
    h["config_hash"] = file.config_hash;
    h["provenance"] = file.provenance;
    h["muscle_id"] = file.muscle_id;
    h["mu_index"] = file.mu_index;
    h["channel_min"] = file.channel_min;
    h["channel_max"] = file.channel_max;
    if (file.ground_truth) {
        double iz = 0.0, v = 0.0;
        for (const auto& f : file.ground_truth->fibres) {
            iz += f.iz;
            v += f.v;
        }
        const double n = static_cast<double>(file.ground_truth->fibres.size());
        h["ground_truth"] = {{"n_fibres", file.ground_truth->fibres.size()}, {"iz_mean_m", iz / n}, {"v_mean_mps", v / n}};
    } else {
        h["ground_truth"] = nullptr;
    }

    out << kMagic << ' ' << kRecordingFormatVersion << '\n' << h.dump(2) << '\n' << kEndOfHeader << '\n';
    put_block(out, file.data.flat());
    if (file.ground_truth) {
        std::vector<double> fibres;
        fibres.reserve(file.ground_truth->fibres.size() * 6);
        for (const auto& f : file.ground_truth->fibres) {
            fibres.insert(fibres.end(), {f.iz, f.v, f.length, f.depth, f.lateral_offset, f.z_start});
        }
        put_block(out, fibres);
    }
    if (!out) throw FormatError(FormatError::Kind::io, "write failed");
}

RecordingFile read_recording(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) malformed("empty recording file");
    std::istringstream first(line);
    std::string magic;
    first >> magic;
    if (magic != kMagic) malformed("not a recording file (bad magic)");
    int version = 0;
    if (!(first >> version)) malformed("format version missing");
    if (version != kRecordingFormatVersion) {
        throw FormatError(FormatError::Kind::version, "unsupported recording format version " +
                                                          std::to_string(version) + " (expected " +
                                                          std::to_string(kRecordingFormatVersion) + ")");
    }
    std::string text;
    bool ended = false;
    while (std::getline(in, line)) {
        if (line == kEndOfHeader) {
            ended = true;
            break;
        }
        text += line;
        text += '\n';
    }
    if (!ended) malformed("end-of-header marker missing");

    RecordingFile f;
    std::size_t rows = 0, cols = 0;
    bool has_truth = false;
    std::size_t n_fibres = 0;
    try {
        const json h = json::parse(text);
        if (h.at("format_version").get<int>() != version) {
            throw FormatError(FormatError::Kind::version, "header version disagrees with the first line");
        }
        f.kind = kind_from_string(h.at("kind").get<std::string>());
        const auto n_e = h.at("n_electrodes").get<std::size_t>();
        rows = h.at("n_rows").get<std::size_t>();
        cols = h.at("n_samples").get<std::size_t>();
        f.grid.sample_rate = h.at("sample_rate").get<double>();
        f.grid.times = h.at("times").get<std::vector<double>>();
        for (const auto& p : h.at("electrode_positions")) {
            if (!p.is_array() || p.size() != 3) malformed("electrode position must be [axial, lateral, normal]");
            f.array.positions.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
        f.array.uniform = h.at("array_uniform").get<bool>();
        f.seed = h.at("seed").get<std::uint64_t>();
        f.config_hash = h.at("config_hash").get<std::string>();
        f.provenance = h.at("provenance").get<std::vector<std::string>>();
        f.muscle_id = h.at("muscle_id").get<int>();
        f.mu_index = h.at("mu_index").get<int>();
        f.channel_min = h.at("channel_min").get<std::vector<double>>();
        f.channel_max = h.at("channel_max").get<std::vector<double>>();
        const json& gt = h.at("ground_truth");
        if (!gt.is_null()) {
            has_truth = true;
            n_fibres = gt.at("n_fibres").get<std::size_t>();
        }
        if (f.array.count() != n_e) {
            throw FormatError(FormatError::Kind::dimension, "electrode position count disagrees with n_electrodes");
        }
        if (f.grid.times.size() != cols) {
            throw FormatError(FormatError::Kind::dimension, "time axis length disagrees with n_samples");
        }
        if (rows != expected_rows(f.kind, n_e)) {
            throw FormatError(FormatError::Kind::dimension,
                              "header declares " + std::to_string(rows) + " rows for " + std::to_string(n_e) +
                                  " electrodes of a " + to_string(f.kind) + " recording");
        }
    } catch (const json::exception& e) {
        malformed(std::string("recording header: ") + e.what());
    }

    std::vector<double> values = get_block(in, rows * cols, "voltage payload");
    f.data = Matrix(rows, cols);
    std::copy(values.begin(), values.end(), f.data.flat().begin());
    if (has_truth) {
        const std::vector<double> g = get_block(in, n_fibres * 6, "ground-truth block");
        MotorUnit mu;
        for (std::size_t i = 0; i < n_fibres; ++i) {
            const double* p = g.data() + 6 * i;
            mu.fibres.push_back({p[0], p[1], p[2], p[3], p[4], p[5]});
        }
        f.ground_truth = std::move(mu);
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError(FormatError::Kind::dimension, "trailing bytes after the declared blocks");
    }
    try {
        f.validate();
    } catch (const ShapeError& e) {
        throw FormatError(FormatError::Kind::dimension, e.what());
    } catch (const Error& e) {
        malformed(e.what());
    }
    return f;
}

void write_recording(const std::filesystem::path& path, const RecordingFile& file) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::io, "cannot open '" + path.string() + "' for writing");
    write_recording(out, file);
}

RecordingFile read_recording(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatError::Kind::io, "cannot open '" + path.string() + "'");
    return read_recording(in);
}

// ---------------------------------------------------------------- run config

namespace {

json interval(const Interval& i) { return {{"lo", i.lo}, {"hi", i.hi}}; }

/// Reads a JSON object into existing defaults and rejects unknown keys.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : j_.items()) {
            if (seen_.count(key) == 0) throw ConfigError("unknown key '" + path_ + "." + key + "'");
        }
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("wrong type for '" + path_ + "." + key + "'");
        }
    }

    void get(const char* key, Interval& out) {
        if (const json* s = sub(key)) {
            Section sec(*s, path_ + "." + key);
            sec.get("lo", out.lo);
            sec.get("hi", out.hi);
        }
    }

    void get_snr(const char* key, double& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        if (v.is_null()) {
            out = std::numeric_limits<double>::infinity();
        } else if (v.is_number()) {
            out = v.get<double>();
        } else {
            throw ConfigError("'" + path_ + "." + key + "' must be a number or null");
        }
    }

    const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json to_json(const RunConfig& c) {
    json j;
    const SynthConfig& s = c.synth;
    j["synth"] = {{"n_motor_units_total", s.n_motor_units_total},
                  {"fibres_per_mu", {{"lo", s.fibres_per_mu.lo}, {"hi", s.fibres_per_mu.hi}}},
                  {"cv_mean_range", interval(s.cv_mean_range)},
                  {"cv_std", s.cv_std},
                  {"length_ranges", {interval(s.length_ranges[0]), interval(s.length_ranges[1])}},
                  {"length_range_index", s.length_range_index},
                  {"cross_section_area", s.cross_section_area},
                  {"muscle_depth_offset", s.muscle_depth_offset},
                  {"iz_centre_window", interval(s.iz_centre_window)},
                  {"iz_spread_std", s.iz_spread_std},
                  {"muscle_id", s.muscle_id},
                  {"seed", s.seed}};
    j["array"] = {{"n_electrodes", c.array.n_electrodes},
                  {"span", c.array.span},
                  {"n_samples", c.array.n_samples},
                  {"sample_rate", c.array.sample_rate}};
    const VolumeConductorConfig& v = c.conductor;
    j["conductor"] = {{"conductivity", v.conductivity},   {"quadrature_points", v.quadrature_points},
                      {"source_scale", v.source_scale},   {"ap_amplitude_mv", v.ap_amplitude_mv},
                      {"ap_resting_mv", v.ap_resting_mv}, {"spatial_scale", v.spatial_scale},
                      {"tail_cutoff", v.tail_cutoff}};
    const PreprocessConfig& p = c.preprocess;
    j["preprocess"] = {
        {"filter", {{"order", p.filter.order}, {"low_hz", p.filter.low_hz}, {"high_hz", p.filter.high_hz}}},
        {"apply_filter", p.apply_filter},
        {"snr_db", std::isinf(p.snr_db) ? json(nullptr) : json(p.snr_db)}};
    j["encoder"] = {{"n_blocks", c.encoder.n_blocks},
                    {"activation", to_string(c.encoder.activation)},
                    {"leaky_slope", c.encoder.leaky_slope},
                    {"n_params", c.encoder.n_params},
                    {"seed", c.encoder.seed}};
    const TrainConfig& t = c.train;
    j["train"] = {{"epochs", t.epochs},
                  {"patience", t.patience},
                  {"min_delta", t.min_delta},
                  {"clipnorm", t.clipnorm},
                  {"lambda_mse", t.weights.mse},
                  {"lambda_cc", t.weights.cc},
                  {"learning_rate", t.learning_rate},
                  {"weight_decay", t.weight_decay},
                  {"seed", t.seed},
                  {"scaler_v", interval(t.scaler_v)},
                  {"warm_start", t.warm_start},
                  {"warm_start_iz_step", t.warm_start_iz_step},
                  {"warm_start_v_step", t.warm_start_v_step}};
    const BaselineConfig& b = c.baseline;
    j["baseline"] = {{"wavelet_width", b.wavelet_width}, {"dbscan_eps", b.dbscan_eps},
                     {"dbscan_min_points", b.dbscan_min_points}, {"ref_cv", b.ref_cv},
                     {"ridge_threshold", b.ridge_threshold}, {"window", b.window},
                     {"arrival_tolerance", b.arrival_tolerance}};
    j["landscape"] = {{"iz", interval(c.landscape.iz)},
                      {"iz_step", c.landscape.iz_step},
                      {"v", interval(c.landscape.v)},
                      {"v_step", c.landscape.v_step}};
    return j;
}

void from_json(const json& j, RunConfig& c) {
    Section root(j, "config");
    if (const json* sj = root.sub("synth")) {
        Section s(*sj, "synth");
        SynthConfig& x = c.synth;
        s.get("n_motor_units_total", x.n_motor_units_total);
        if (const json* fj = s.sub("fibres_per_mu")) {
            Section f(*fj, "synth.fibres_per_mu");
            f.get("lo", x.fibres_per_mu.lo);
            f.get("hi", x.fibres_per_mu.hi);
        }
        s.get("cv_mean_range", x.cv_mean_range);
        s.get("cv_std", x.cv_std);
        if (const json* lj = s.sub("length_ranges")) {
            if (!lj->is_array() || lj->size() != 2) throw ConfigError("'synth.length_ranges' must hold two intervals");
            for (std::size_t i = 0; i < 2; ++i) {
                Section r((*lj)[i], "synth.length_ranges[" + std::to_string(i) + "]");
                r.get("lo", x.length_ranges[i].lo);
                r.get("hi", x.length_ranges[i].hi);
            }
        }
        s.get("length_range_index", x.length_range_index);
        s.get("cross_section_area", x.cross_section_area);
        s.get("muscle_depth_offset", x.muscle_depth_offset);
        s.get("iz_centre_window", x.iz_centre_window);
        s.get("iz_spread_std", x.iz_spread_std);
        s.get("muscle_id", x.muscle_id);
        s.get("seed", x.seed);
    }
    if (const json* aj = root.sub("array")) {
        Section s(*aj, "array");
        s.get("n_electrodes", c.array.n_electrodes);
        s.get("span", c.array.span);
        s.get("n_samples", c.array.n_samples);
        s.get("sample_rate", c.array.sample_rate);
    }
    if (const json* vj = root.sub("conductor")) {
        Section s(*vj, "conductor");
        VolumeConductorConfig& x = c.conductor;
        s.get("conductivity", x.conductivity);
        s.get("quadrature_points", x.quadrature_points);
        s.get("source_scale", x.source_scale);
        s.get("ap_amplitude_mv", x.ap_amplitude_mv);
        s.get("ap_resting_mv", x.ap_resting_mv);
        s.get("spatial_scale", x.spatial_scale);
        s.get("tail_cutoff", x.tail_cutoff);
    }
    if (const json* pj = root.sub("preprocess")) {
        Section s(*pj, "preprocess");
        if (const json* fj = s.sub("filter")) {
            Section f(*fj, "preprocess.filter");
            f.get("order", c.preprocess.filter.order);
            f.get("low_hz", c.preprocess.filter.low_hz);
            f.get("high_hz", c.preprocess.filter.high_hz);
        }
        s.get("apply_filter", c.preprocess.apply_filter);
        s.get_snr("snr_db", c.preprocess.snr_db);
    }
    if (const json* ej = root.sub("encoder")) {
        Section s(*ej, "encoder");
        s.get("n_blocks", c.encoder.n_blocks);
        std::string act = to_string(c.encoder.activation);
        s.get("activation", act);
        c.encoder.activation = activation_from_string(act);
        s.get("leaky_slope", c.encoder.leaky_slope);
        s.get("n_params", c.encoder.n_params);
        s.get("seed", c.encoder.seed);
    }
    if (const json* tj = root.sub("train")) {
        Section s(*tj, "train");
        TrainConfig& x = c.train;
        s.get("epochs", x.epochs);
        s.get("patience", x.patience);
        s.get("min_delta", x.min_delta);
        s.get("clipnorm", x.clipnorm);
        s.get("lambda_mse", x.weights.mse);
        s.get("lambda_cc", x.weights.cc);
        s.get("learning_rate", x.learning_rate);
        s.get("weight_decay", x.weight_decay);
        s.get("seed", x.seed);
        s.get("scaler_v", x.scaler_v);
        s.get("warm_start", x.warm_start);
        s.get("warm_start_iz_step", x.warm_start_iz_step);
        s.get("warm_start_v_step", x.warm_start_v_step);
    }
    if (const json* bj = root.sub("baseline")) {
        Section s(*bj, "baseline");
        BaselineConfig& x = c.baseline;
        s.get("wavelet_width", x.wavelet_width);
        s.get("dbscan_eps", x.dbscan_eps);
        s.get("dbscan_min_points", x.dbscan_min_points);
        s.get("ref_cv", x.ref_cv);
        s.get("ridge_threshold", x.ridge_threshold);
        s.get("window", x.window);
        s.get("arrival_tolerance", x.arrival_tolerance);
    }
    if (const json* lj = root.sub("landscape")) {
        Section s(*lj, "landscape");
        s.get("iz", c.landscape.iz);
        s.get("iz_step", c.landscape.iz_step);
        s.get("v", c.landscape.v);
        s.get("v_step", c.landscape.v_step);
    }
}

}  // namespace

void RunConfig::validate() const {
    synth.validate();
    array.validate();
    conductor.validate();
    encoder.validate();
    train.validate();
    baseline.validate();
    if (preprocess.filter.order < 2 || preprocess.filter.order % 2 != 0) {
        throw ConfigError("preprocess.filter.order must be a positive even number");
    }
    landscape.validate(train.bounds(array.electrodes()));
}

std::string run_config_to_json(const RunConfig& cfg) { return to_json(cfg).dump(2); }

RunConfig run_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    from_json(j, cfg);
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(FormatError::Kind::io, "cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return run_config_from_json(ss.str());
}

std::string config_hash(const RunConfig& cfg) {
    const std::uint64_t h = fnv1a64(to_json(cfg).dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------- checkpoint

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
    json j;
    j["format_version"] = 1;
    j["encoder"] = {{"n_blocks", cp.encoder.n_blocks},
                    {"activation", to_string(cp.encoder.activation)},
                    {"leaky_slope", cp.encoder.leaky_slope},
                    {"n_params", cp.encoder.n_params},
                    {"seed", cp.encoder.seed}};
    j["input_size"] = cp.input_size;
    j["params"] = cp.params;
    j["estimate"] = {{"iz_hat_m", cp.estimate.iz_hat}, {"v_hat_mps", cp.estimate.v_hat}};
    j["loss"] = {{"mse", cp.loss.mse}, {"cc", cp.loss.cc}, {"combined", cp.loss.combined}};
    j["best_epoch"] = cp.best_epoch;
    j["seed"] = cp.seed;
    j["config_hash"] = cp.config_hash;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::io, "cannot open '" + path.string() + "' for writing");
    out << j.dump() << '\n';
    if (!out) throw FormatError(FormatError::Kind::io, "write failed");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(FormatError::Kind::io, "cannot open checkpoint '" + path.string() + "'");
    Checkpoint cp;
    try {
        const json j = json::parse(in);
        if (j.at("format_version").get<int>() != 1) {
            throw FormatError(FormatError::Kind::version, "unsupported checkpoint version");
        }
        const json& e = j.at("encoder");
        cp.encoder.n_blocks = e.at("n_blocks").get<int>();
        cp.encoder.activation = activation_from_string(e.at("activation").get<std::string>());
        cp.encoder.leaky_slope = e.at("leaky_slope").get<double>();
        cp.encoder.n_params = e.at("n_params").get<int>();
        cp.encoder.seed = e.at("seed").get<std::uint64_t>();
        cp.input_size = j.at("input_size").get<std::size_t>();
        cp.params = j.at("params").get<std::vector<double>>();
        cp.estimate = {j.at("estimate").at("iz_hat_m").get<double>(), j.at("estimate").at("v_hat_mps").get<double>()};
        cp.loss = {j.at("loss").at("mse").get<double>(), j.at("loss").at("cc").get<double>(),
                   j.at("loss").at("combined").get<double>()};
        cp.best_epoch = j.at("best_epoch").get<int>();
        cp.seed = j.at("seed").get<std::uint64_t>();
        cp.config_hash = j.at("config_hash").get<std::string>();
    } catch (const json::exception& e) {
        malformed(std::string("checkpoint: ") + e.what());
    }
    try {
        (void)cp.state();
    } catch (const ShapeError& e) {
        throw FormatError(FormatError::Kind::dimension, std::string("checkpoint: ") + e.what());
    }
    return cp;
}

// ---------------------------------------------------------------- lock

OutputLock::OutputLock(const std::filesystem::path& dir) : file_(dir / ".lock") {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw FormatError(FormatError::Kind::io, "cannot create '" + dir.string() + "': " + ec.message());
    const int fd = ::open(file_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        const std::string why = errno == EEXIST ? "another run holds " : "cannot create ";
        throw FormatError(FormatError::Kind::io, why + file_.string());
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

OutputLock::~OutputLock() {
    std::error_code ec;
    std::filesystem::remove(file_, ec);
}

}  // namespace myo
