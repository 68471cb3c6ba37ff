#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "myo/baseline.hpp"
#include "myo/errors.hpp"
#include "myo/evaluation.hpp"
#include "myo/format.hpp"
#include "myo/io.hpp"
#include "myo/preprocess.hpp"
#include "myo/synth.hpp"
#include "myo/train.hpp"

namespace myo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Options shared by every subcommand that reads configuration.
struct Common {
    std::string config;  ///< path, or "default" / empty for built-in defaults
    std::optional<std::uint64_t> seed;
};

RunConfig load_config(const Common& c) {
    if (c.config.empty() || c.config == "default") return RunConfig{};
    return load_run_config(c.config);
}

/// Randomised stages take their seed from --seed or, failing that, from an
/// explicit config file. Built-in defaults alone are not enough.
std::uint64_t require_seed(const Common& c, std::uint64_t from_config, const char* stage) {
    if (c.seed) return *c.seed;
    if (!c.config.empty() && c.config != "default") return from_config;
    throw UsageError(std::string(stage) + " is randomised: pass --seed or a --config file");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw FormatError(FormatError::Kind::io, "cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw FormatError(FormatError::Kind::io, "write to '" + path.string() + "' failed");
}

json read_json(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw FormatError(FormatError::Kind::io, "cannot open '" + path.string() + "'");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::malformed_header, path.string() + ": " + e.what());
    }
}

/// The decoder's fibre template: the mean fibre of the ground truth when the
/// recording carries one, the default template otherwise.
DecoderContext decoder_context(const RecordingFile& rec, const RunConfig& cfg) {
    DecoderContext ctx{rec.array, rec.grid, FibreGeometry{}, cfg.conductor};
    if (rec.ground_truth) ctx.geometry = prototype_params(*rec.ground_truth).geometry;
    return ctx;
}

RngStream noise_stream(std::uint64_t seed, const RecordingFile& rec) {
    const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(rec.muscle_id)) << 32) |
                     static_cast<std::uint32_t>(rec.mu_index);
    return derive_stream(seed, key, "noise");
}

std::string describe_filter(const PreprocessConfig& p) {
    std::ostringstream s;
    s << "bandpass order=" << p.filter.order << " low_hz=" << format_shortest(p.filter.low_hz)
      << " high_hz=" << format_shortest(p.filter.high_hz) << " zero_phase";
    return s.str();
}

/// Raw recordings are preprocessed with the configured pipeline; already
/// preprocessed ones pass through unchanged.
RecordingFile ensure_preprocessed(const RecordingFile& rec, const RunConfig& cfg, const Common& common,
                                  const std::string& hash) {
    if (rec.kind == RecordingKind::preprocessed) return rec;
    RecordingFile out = rec;
    std::optional<RngStream> rng;
    std::uint64_t seed = rec.seed;
    if (std::isfinite(cfg.preprocess.snr_db)) {
        seed = require_seed(common, cfg.synth.seed, "noise injection");
        rng = noise_stream(seed, rec);
    }
    const PreprocessedRecording p =
        preprocess(rec.data, rec.grid.sample_rate, cfg.preprocess, rng ? &*rng : nullptr);
    out.kind = RecordingKind::preprocessed;
    out.data = p.m;
    out.channel_min = p.channel_min;
    out.channel_max = p.channel_max;
    out.seed = seed;
    out.config_hash = hash;
    out.provenance.push_back("double_differences");
    if (rng) out.provenance.push_back("noise snr_db=" + format_shortest(cfg.preprocess.snr_db));
    if (cfg.preprocess.apply_filter) out.provenance.push_back(describe_filter(cfg.preprocess));
    out.provenance.push_back("minmax_scale");
    return out;
}

/// Double differences with the min-max scaling undone, positioned at the
/// centre electrode of each triple.
Matrix descaled(const RecordingFile& pre) {
    Matrix dd = pre.data;
    for (std::size_t j = 0; j < dd.rows(); ++j) {
        const double lo = pre.channel_min[j], range = pre.channel_max[j] - pre.channel_min[j];
        for (std::size_t i = 0; i < dd.cols(); ++i) dd(j, i) = lo + dd(j, i) * range;
    }
    return dd;
}

json baseline_json(const BaselineResult& r, const BaselineConfig& b, const std::string& hash, std::uint64_t seed) {
    return {{"iz_estimate_mm", r.iz_estimate * 1e3},
            {"n_candidates", r.n_candidates},
            {"n_clustered", r.n_clustered},
            {"interpretation",
             {{"wavelet_width", b.wavelet_width},
              {"wavelet_scale_s", std::abs(b.wavelet_width)},
              {"wavelet_width_sign", "ignored; magnitude is the Mexican-hat scale in seconds"},
              {"dbscan_eps_units", "mm, with time scaled by ref_cv"},
              {"dbscan_eps", b.dbscan_eps},
              {"dbscan_min_points", b.dbscan_min_points},
              {"ref_cv_mps", b.ref_cv},
              {"input", "double differences (min-max scaling undone)"}}},
            {"config_hash", hash},
            {"seed", seed}};
}

BaselineResult run_baseline(const RecordingFile& rec, const BaselineConfig& b) {
    const std::vector<double> pos = dd_channel_positions(rec.array);
    if (rec.kind == RecordingKind::raw) {
        return estimate_iz_baseline(double_differences(rec.data), pos, rec.grid.sample_rate, b);
    }
    return estimate_iz_baseline(descaled(rec), pos, rec.grid.sample_rate, b);
}

json loss_json(const LossBreakdown& l) {
    return {{"mse", l.mse}, {"cc", l.cc}, {"combined", l.combined}};
}

void write_history_csv(const fs::path& path, const std::vector<EpochRecord>& history, const std::string& hash,
                       std::uint64_t seed) {
    std::ostringstream s;
    s << "# config_hash=" << hash << " seed=" << seed << '\n';
    s << "epoch,mse,cc,combined,iz_hat_mm,v_hat_mps,grad_norm,minmax_switches\n";
    for (const auto& r : history) {
        s << r.epoch << ',' << format_shortest(r.loss.mse) << ',' << format_shortest(r.loss.cc) << ','
          << format_shortest(r.loss.combined) << ',' << format_shortest(r.estimate.iz_hat * 1e3) << ','
          << format_shortest(r.estimate.v_hat) << ',' << format_shortest(r.grad_norm) << ',' << r.minmax_switches
          << '\n';
    }
    write_text(path, s.str());
}

/// Writes the artifacts of one trained encoder into `dir`.
void write_run(const fs::path& dir, const RecordingFile& pre, const EncoderConfig& enc, const TrainResult& res,
               const RunConfig& cfg, const std::string& hash, std::uint64_t seed) {
    write_recording(dir / "preprocessed.rec", pre);
    write_history_csv(dir / "history.csv", res.history, hash, seed);
    Checkpoint cp{enc, pre.data.size(), std::vector<double>(res.best_state.params().begin(), res.best_state.params().end()),
                  res.best_estimate, res.best_loss, res.best_epoch, seed, hash};
    write_checkpoint(dir / "checkpoint.json", cp);
    write_text(dir / "config.json", run_config_to_json(cfg) + "\n");
    const json est = {{"iz_hat_mm", res.best_estimate.iz_hat * 1e3},
                      {"v_hat_mps", res.best_estimate.v_hat},
                      {"best_epoch", res.best_epoch},
                      {"epochs_run", res.history.size()},
                      {"stopped_early", res.stopped_early},
                      {"loss", loss_json(res.best_loss)},
                      {"encoder", {{"n_blocks", enc.n_blocks}, {"activation", to_string(enc.activation)}}},
                      {"muscle_id", pre.muscle_id},
                      {"mu_index", pre.mu_index},
                      {"config_hash", hash},
                      {"seed", seed}};
    write_text(dir / "estimate.json", est.dump(2) + "\n");
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "run configuration JSON, or 'default'");
    sub->add_option("--seed", c.seed, "seed for every randomised step of this stage");
}

// ---------------------------------------------------------------- subcommands

struct SimulateArgs {
    Common common;
    int muscle = 0;
    std::optional<int> mu_index;
    std::optional<int> extracted;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    RunConfig cfg = load_config(a.common);
    cfg.synth.seed = require_seed(a.common, cfg.synth.seed, "simulate");
    cfg.synth.muscle_id = a.muscle;
    cfg.validate();
    int index = a.mu_index.value_or(0);
    if (a.extracted) {
        const std::vector<int> picks = extracted_motor_unit_indices(cfg.synth);
        if (*a.extracted < 0 || *a.extracted >= static_cast<int>(picks.size())) {
            throw UsageError("--extracted must be in [0, " + std::to_string(picks.size()) + ")");
        }
        index = picks[static_cast<std::size_t>(*a.extracted)];
    }
    const std::string hash = config_hash(cfg);
    const MotorUnit mu = generate_motor_unit(cfg.synth, index);
    const Recording rec = simulate_recording(mu, cfg.array, cfg.conductor);
    RecordingFile f;
    f.kind = RecordingKind::raw;
    f.data = rec.voltages;
    f.array = rec.array;
    f.grid = rec.grid;
    f.ground_truth = rec.ground_truth;
    f.seed = cfg.synth.seed;
    f.config_hash = hash;
    f.muscle_id = a.muscle;
    f.mu_index = index;
    f.provenance = {"simulate muscle=" + std::to_string(a.muscle) + " mu=" + std::to_string(index)};
    write_recording(fs::path(a.out), f);
    const PrototypeParams pr = prototype_params(mu);
    out << "simulated muscle " << a.muscle << " unit " << index << ": " << mu.fibres.size() << " fibres, "
        << rec.voltages.rows() << "x" << rec.voltages.cols() << " samples, iz_pr " << format_fixed4(pr.iz_pr * 1e3)
        << " mm, v_pr " << format_fixed4(pr.v_pr) << " m/s -> " << a.out << '\n';
    return ok;
}

struct InOutArgs {
    Common common;
    std::string in;
    std::string out;
    std::optional<double> snr_db;
    std::optional<int> epochs;
    std::optional<double> learning_rate;
};

void apply_overrides(RunConfig& cfg, const InOutArgs& a) {
    if (a.snr_db) cfg.preprocess.snr_db = *a.snr_db;
    if (a.epochs) cfg.train.epochs = *a.epochs;
    if (a.learning_rate) cfg.train.learning_rate = *a.learning_rate;
    cfg.validate();
}

int cmd_preprocess(const InOutArgs& a, std::ostream& out) {
    RunConfig cfg = load_config(a.common);
    apply_overrides(cfg, a);
    const RecordingFile rec = read_recording(fs::path(a.in));
    if (rec.kind != RecordingKind::raw) throw UsageError("'" + a.in + "' is already preprocessed");
    const RecordingFile pre = ensure_preprocessed(rec, cfg, a.common, config_hash(cfg));
    write_recording(fs::path(a.out), pre);
    out << "preprocessed " << a.in << " -> " << a.out << " (" << pre.data.rows() << "x" << pre.data.cols() << ")\n";
    return ok;
}

int cmd_train(const InOutArgs& a, std::ostream& out) {
    RunConfig cfg = load_config(a.common);
    apply_overrides(cfg, a);
    cfg.train.seed = require_seed(a.common, cfg.train.seed, "train");
    const std::string hash = config_hash(cfg);
    const RecordingFile rec = read_recording(fs::path(a.in));
    const fs::path dir(a.out);
    OutputLock lock(dir);
    const RecordingFile pre = ensure_preprocessed(rec, cfg, a.common, hash);
    const DecoderContext ctx = decoder_context(pre, cfg);
    const TrainResult res = train(pre.to_preprocessed(), cfg.encoder, cfg.train, ctx);
    write_run(dir, pre, cfg.encoder, res, cfg, hash, cfg.train.seed);
    out << "trained " << res.history.size() << " epochs (best " << res.best_epoch << "): iz_hat "
        << format_fixed4(res.best_estimate.iz_hat * 1e3) << " mm, v_hat " << format_fixed4(res.best_estimate.v_hat)
        << " m/s, loss " << format_shortest(res.best_loss.combined) << " -> " << dir.string() << '\n';
    return ok;
}

int cmd_hyperopt(const InOutArgs& a, std::ostream& out) {
    RunConfig cfg = load_config(a.common);
    apply_overrides(cfg, a);
    cfg.train.seed = require_seed(a.common, cfg.train.seed, "hyperopt");
    const std::string hash = config_hash(cfg);
    const RecordingFile rec = read_recording(fs::path(a.in));
    const fs::path dir(a.out);
    OutputLock lock(dir);
    const RecordingFile pre = ensure_preprocessed(rec, cfg, a.common, hash);
    const DecoderContext ctx = decoder_context(pre, cfg);
    const HyperoptResult h =
        hyperparameter_search(pre.to_preprocessed(), cfg.train, ctx, default_hyperopt_grid(cfg.encoder));
    std::ostringstream s;
    s << "# config_hash=" << hash << " seed=" << cfg.train.seed << '\n';
    s << "activation,n_blocks,best_loss,best_epoch,iz_hat_mm,v_hat_mps,error\n";
    for (const auto& c : h.cells) {
        s << to_string(c.config.activation) << ',' << c.config.n_blocks << ',';
        if (c.ok()) {
            s << format_shortest(c.result->best_loss.combined) << ',' << c.result->best_epoch << ','
              << format_shortest(c.result->best_estimate.iz_hat * 1e3) << ','
              << format_shortest(c.result->best_estimate.v_hat) << ",\n";
        } else {
            std::string msg = c.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            s << ",,,," << msg << '\n';
        }
    }
    write_text(dir / "hyperopt.csv", s.str());
    write_run(dir, pre, h.best_config, h.best, cfg, hash, cfg.train.seed);
    out << "best cell " << to_string(h.best_config.activation) << " x " << h.best_config.n_blocks
        << " blocks: loss " << format_shortest(h.best.best_loss.combined) << " -> " << dir.string() << '\n';
    return ok;
}

struct EstimateArgs {
    Common common;
    std::string checkpoint;
    std::string in;
    std::string out;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
    RunConfig cfg = load_config(a.common);
    cfg.validate();
    const Checkpoint cp = read_checkpoint(fs::path(a.checkpoint));
    const RecordingFile rec = read_recording(fs::path(a.in));
    const RecordingFile pre = ensure_preprocessed(rec, cfg, a.common, config_hash(cfg));
    const EncoderState state = cp.state();
    const EstimatedParams p = encode(state, pre.data, cfg.train.bounds(pre.array));
    const json j = {{"iz_hat_mm", p.iz_hat * 1e3}, {"v_hat_mps", p.v_hat}, {"checkpoint", a.checkpoint},
                    {"config_hash", cp.config_hash}, {"seed", cp.seed}};
    if (!a.out.empty()) write_text(a.out, j.dump(2) + "\n");
    out << j.dump(2) << '\n';
    return ok;
}

struct BaselineArgs {
    Common common;
    std::string in;
    std::string out;
};

int cmd_baseline(const BaselineArgs& a, std::ostream& out) {
    RunConfig cfg = load_config(a.common);
    cfg.validate();
    const RecordingFile rec = read_recording(fs::path(a.in));
    const BaselineResult r = run_baseline(rec, cfg.baseline);
    const json j = baseline_json(r, cfg.baseline, config_hash(cfg), rec.seed);
    if (!a.out.empty()) write_text(a.out, j.dump(2) + "\n");
    out << j.dump(2) << '\n';
    return ok;
}

struct LandscapeArgs {
    Common common;
    std::string in;
    std::string out;
};

int cmd_landscape(const LandscapeArgs& a, std::ostream& out) {
    RunConfig cfg = load_config(a.common);
    cfg.validate();
    const std::string hash = config_hash(cfg);
    const RecordingFile rec = read_recording(fs::path(a.in));
    const RecordingFile pre = ensure_preprocessed(rec, cfg, a.common, hash);
    const DecoderContext ctx = decoder_context(pre, cfg);
    cfg.landscape.validate(cfg.train.bounds(ctx.array));
    const Landscape l = loss_landscape(pre.data, ctx, cfg.landscape, cfg.train.weights);
    std::ostringstream csv;
    csv << "# config_hash=" << hash << " seed=" << pre.seed << '\n';
    write_landscape_csv(csv, l);
    write_text(a.out, csv.str());
    const EstimatedParams mse_min = l.point(l.argmin_mse), comb_min = l.point(l.argmin_combined);
    json j = {{"argmin_mse", {{"iz_mm", mse_min.iz_hat * 1e3}, {"v_mps", mse_min.v_hat}}},
              {"argmin_combined", {{"iz_mm", comb_min.iz_hat * 1e3}, {"v_mps", comb_min.v_hat}}},
              {"cells", l.values.size()},
              {"config_hash", hash}};
    if (pre.ground_truth) {
        const PrototypeParams pr = prototype_params(*pre.ground_truth);
        // Recorded, not asserted: on multi-fibre data the prototype need not be the minimum.
        j["prototype"] = {{"iz_mm", pr.iz_pr * 1e3}, {"v_mps", pr.v_pr}};
    }
    out << j.dump(2) << '\n';
    return ok;
}

struct EvaluateArgs {
    Common common;
    std::vector<std::string> runs;
    std::vector<std::string> truth;
    std::string rows;
    std::string out;
};

void emit_tables(const fs::path& dir, const std::vector<EvalRow>& rows, const std::string& hash, std::ostream& out) {
    std::ostringstream t1;
    t1 << "# config_hash=" << hash << '\n';
    write_rows_csv(t1, rows);
    write_text(dir / "table1.csv", t1.str());
    const std::string r1 = render_rows_table(rows);
    write_text(dir / "table1.txt", r1);

    const std::vector<AggregateRow> agg = aggregate_results(rows);
    std::ostringstream t2;
    t2 << "# config_hash=" << hash << '\n';
    write_aggregate_csv(t2, agg);
    write_text(dir / "table2.csv", t2.str());
    const std::string r2 = render_aggregate_table(agg);
    write_text(dir / "table2.txt", r2);
    out << r1 << '\n' << r2;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_config(a.common);
    cfg.validate();
    const std::string hash = config_hash(cfg);
    const fs::path dir(a.out);
    OutputLock lock(dir);

    if (!a.rows.empty()) {
        if (!a.runs.empty()) throw UsageError("--rows and --runs are mutually exclusive");
        std::ifstream f(a.rows);
        if (!f) throw FormatError(FormatError::Kind::io, "cannot open '" + a.rows + "'");
        emit_tables(dir, read_rows_csv(f), hash, out);
        return ok;
    }
    if (a.runs.empty()) throw UsageError("evaluate needs --runs or --rows");

    std::map<std::pair<int, int>, MotorUnit> truth;
    for (const auto& t : a.truth) {
        const RecordingFile r = read_recording(fs::path(t));
        if (!r.ground_truth) throw UsageError("'" + t + "' carries no ground truth");
        truth[{r.muscle_id, r.mu_index}] = *r.ground_truth;
    }

    std::vector<EvalRow> rows;
    json provenance = json::array();
    for (const auto& run : a.runs) {
        const fs::path rd(run);
        const json est = read_json(rd / "estimate.json");
        const RecordingFile pre = read_recording(rd / "preprocessed.rec");
        const std::pair<int, int> key{pre.muscle_id, pre.mu_index};
        MotorUnit mu;
        if (auto it = truth.find(key); it != truth.end()) {
            mu = it->second;
        } else if (pre.ground_truth) {
            mu = *pre.ground_truth;
        } else {
            throw UsageError("no ground truth for run '" + run + "'");
        }
        const PrototypeParams pr = prototype_params(mu);
        DecoderContext ctx{pre.array, pre.grid, pr.geometry, cfg.conductor};
        EstimatedParams ae;
        try {
            ae = {est.at("iz_hat_mm").get<double>() * 1e-3, est.at("v_hat_mps").get<double>()};
        } catch (const json::exception& e) {
            throw FormatError(FormatError::Kind::malformed_header, run + "/estimate.json: " + e.what());
        }
        std::optional<double> clustering;
        if (fs::exists(rd / "baseline.json")) {
            clustering = read_json(rd / "baseline.json").at("iz_estimate_mm").get<double>() * 1e-3;
        } else {
            try {
                clustering = run_baseline(pre, cfg.baseline).iz_estimate;
            } catch (const BaselineError& e) {
                err << "warning: clustering baseline failed on " << run << ": " << e.what() << '\n';
            }
        }
        const auto r = evaluation_rows(pre.muscle_id, pre.mu_index, pr, pre.data, ctx, cfg.train.weights, ae,
                                       clustering);
        rows.insert(rows.end(), r.begin(), r.end());
        provenance.push_back({{"run", run},
                              {"config_hash", est.value("config_hash", std::string())},
                              {"seed", est.value("seed", std::uint64_t{0})}});
    }
    write_text(dir / "provenance.json", json({{"config_hash", hash}, {"runs", provenance}}).dump(2) + "\n");
    emit_tables(dir, rows, hash, out);
    return ok;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Innervation-zone and conduction-velocity estimation from surface EMG", "myo"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "simulate one motor unit and write a raw recording");
    add_common(s, sim.common);
    s->add_option("--muscle", sim.muscle, "muscle id (selects the seeded population)");
    auto* mu_opt = s->add_option("--mu", sim.mu_index, "motor-unit index within the muscle");
    s->add_option("--extracted", sim.extracted, "k-th of the eight units with evenly spaced mean CV")
        ->excludes(mu_opt);
    s->add_option("--out", sim.out, "output recording")->required();

    InOutArgs pre;
    auto* p = app.add_subcommand("preprocess", "double differences, noise, band-pass, min-max");
    add_common(p, pre.common);
    p->add_option("--in", pre.in, "raw recording")->required();
    p->add_option("--out", pre.out, "preprocessed recording")->required();
    p->add_option("--snr-db", pre.snr_db, "noise level after double differencing");

    InOutArgs tr;
    auto* t = app.add_subcommand("train", "train the informed autoencoder on one recording");
    add_common(t, tr.common);
    t->add_option("--in", tr.in, "raw or preprocessed recording")->required();
    t->add_option("--out", tr.out, "run directory")->required();
    t->add_option("--snr-db", tr.snr_db, "noise level when preprocessing a raw recording");
    t->add_option("--epochs", tr.epochs, "epoch budget");
    t->add_option("--lr", tr.learning_rate, "learning rate");

    InOutArgs hy;
    auto* h = app.add_subcommand("hyperopt", "grid search over activation and block count");
    add_common(h, hy.common);
    h->add_option("--in", hy.in, "raw or preprocessed recording")->required();
    h->add_option("--out", hy.out, "run directory")->required();
    h->add_option("--snr-db", hy.snr_db, "noise level when preprocessing a raw recording");
    h->add_option("--epochs", hy.epochs, "epoch budget per cell");
    h->add_option("--lr", hy.learning_rate, "learning rate");

    EstimateArgs es;
    auto* e = app.add_subcommand("estimate", "encode a recording with a trained checkpoint");
    add_common(e, es.common);
    e->add_option("--checkpoint", es.checkpoint, "checkpoint.json of a run")->required();
    e->add_option("--in", es.in, "recording")->required();
    e->add_option("--out", es.out, "optional JSON output");

    BaselineArgs ba;
    auto* b = app.add_subcommand("baseline", "clustering innervation-zone estimate");
    add_common(b, ba.common);
    b->add_option("--in", ba.in, "raw or preprocessed recording")->required();
    b->add_option("--out", ba.out, "optional JSON output");

    LandscapeArgs la;
    auto* l = app.add_subcommand("landscape", "loss over an (iz, v) grid");
    add_common(l, la.common);
    l->add_option("--in", la.in, "raw or preprocessed recording")->required();
    l->add_option("--out", la.out, "CSV output")->required();

    EvaluateArgs ev;
    auto* v = app.add_subcommand("evaluate", "per-unit and aggregated error tables");
    add_common(v, ev.common);
    auto* runs_opt = v->add_option("--runs", ev.runs, "run directories");
    v->add_option("--truth", ev.truth, "raw recordings carrying ground truth");
    v->add_option("--rows", ev.rows, "re-render from a stored table1.csv")->excludes(runs_opt);
    v->add_option("--out", ev.out, "output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? ok : usage_error;
    }

    if (s->parsed()) return cmd_simulate(sim, out);
    if (p->parsed()) return cmd_preprocess(pre, out);
    if (t->parsed()) return cmd_train(tr, out);
    if (h->parsed()) return cmd_hyperopt(hy, out);
    if (e->parsed()) return cmd_estimate(es, out);
    if (b->parsed()) return cmd_baseline(ba, out);
    if (l->parsed()) return cmd_landscape(la, out);
    if (v->parsed()) return cmd_evaluate(ev, out, err);
    return usage_error;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage_error;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
        return format_error;
    } catch (const GeometryError& e) {
        err << "geometry error: " << e.what() << '\n';
        return data_error;
    } catch (const ShapeError& e) {
        err << "shape error: " << e.what() << '\n';
        return data_error;
    } catch (const DegenerateInputError& e) {
        err << "degenerate input: " << e.what() << '\n';
        return data_error;
    } catch (const TrainingError& e) {
        err << "training error at epoch " << e.epoch() << ": " << e.what() << '\n';
        return training_error;
    } catch (const BaselineError& e) {
        err << "baseline error: " << e.what() << '\n';
        return baseline_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return other_error;
    }
}

}  // namespace myo::cli
