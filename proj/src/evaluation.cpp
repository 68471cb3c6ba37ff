#include "myo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <tuple>

#include "myo/errors.hpp"
#include "myo/format.hpp"

namespace myo {

PrototypeParams prototype_params(const MotorUnit& mu) {
    if (mu.fibres.empty()) throw ShapeError("motor unit has no fibres");
    double iz = 0.0, v = 0.0, length = 0.0, depth = 0.0, lateral = 0.0, z_start = 0.0;
    for (const auto& f : mu.fibres) {
        iz += f.iz;
        v += f.v;
        length += f.length;
        depth += f.depth;
        lateral += f.lateral_offset;
        z_start += f.z_start;
    }
    const double n = static_cast<double>(mu.fibres.size());
    PrototypeParams pr;
    pr.iz_pr = iz / n;
    pr.v_pr = v / n;
    pr.geometry = {length / n, depth / n, lateral / n, z_start / n};
    return pr;
}

AbsoluteErrors absolute_errors(const PrototypeParams& pr, const EstimatedParams& estimate) {
    return {std::abs(pr.iz_pr - estimate.iz_hat), std::abs(pr.v_pr - estimate.v_hat)};
}

LossBreakdown prototype_losses(const Matrix& m, const PrototypeParams& pr, const DecoderContext& ctx,
                               const LossWeights& weights) {
    const Matrix n = decode_value(pr.as_estimate(), ctx);
    return loss_combined(n, m, weights);
}

std::string to_string(Method m) {
    return m == Method::clustering ? "clustering" : "informed_ae";
}

Method method_from_string(const std::string& name) {
    if (name == "clustering") return Method::clustering;
    if (name == "informed_ae") return Method::informed_ae;
    throw ConfigError("unknown method '" + name + "'");
}

std::vector<EvalRow> evaluation_rows(int muscle_id, int mu_id, const PrototypeParams& pr, const Matrix& m,
                                     const DecoderContext& ctx, const LossWeights& weights,
                                     const EstimatedParams& ae_estimate,
                                     std::optional<double> clustering_iz) {
    std::vector<EvalRow> rows;
    EvalRow base;
    base.muscle_id = muscle_id;
    base.mu_id = mu_id;
    base.iz_pr_mm = pr.iz_pr * 1e3;
    base.v_pr = pr.v_pr;
    if (clustering_iz) {
        EvalRow r = base;
        r.method = Method::clustering;
        r.d_iz_mm = std::abs(pr.iz_pr - *clustering_iz) * 1e3;
        rows.push_back(r);
    }
    const AbsoluteErrors err = absolute_errors(pr, ae_estimate);
    const LossBreakdown pred = loss_combined(decode_value(ae_estimate, ctx), m, weights);
    const LossBreakdown prot = prototype_losses(m, pr, ctx, weights);
    EvalRow r = base;
    r.method = Method::informed_ae;
    r.d_iz_mm = err.iz * 1e3;
    r.d_v = err.v;
    r.sqrt_mse_pred = std::sqrt(pred.mse);
    r.cc_pred = pred.cc;
    r.sqrt_mse_prot = std::sqrt(prot.mse);
    r.cc_prot = prot.cc;
    rows.push_back(r);
    return rows;
}

namespace {

/// Mean of the present values, summed in sorted order so the result does
/// not depend on input order.
std::optional<double> mean_of(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

struct Columns {
    std::vector<double> iz_pr, v_pr, d_iz, d_v, sm_pred, cc_pred, sm_prot, cc_prot;

    template <class Row>
    void add(const Row& r) {
        iz_pr.push_back(r.iz_pr_mm);
        v_pr.push_back(r.v_pr);
        d_iz.push_back(r.d_iz_mm);
        if (r.d_v) d_v.push_back(*r.d_v);
        if (r.sqrt_mse_pred) sm_pred.push_back(*r.sqrt_mse_pred);
        if (r.cc_pred) cc_pred.push_back(*r.cc_pred);
        if (r.sqrt_mse_prot) sm_prot.push_back(*r.sqrt_mse_prot);
        if (r.cc_prot) cc_prot.push_back(*r.cc_prot);
    }

    AggregateRow reduce(std::optional<int> muscle, Method method, std::size_t count) const {
        AggregateRow a;
        a.muscle_id = muscle;
        a.method = method;
        a.iz_pr_mm = *mean_of(iz_pr);
        a.v_pr = *mean_of(v_pr);
        a.d_iz_mm = *mean_of(d_iz);
        a.d_v = mean_of(d_v);
        a.sqrt_mse_pred = mean_of(sm_pred);
        a.cc_pred = mean_of(cc_pred);
        a.sqrt_mse_prot = mean_of(sm_prot);
        a.cc_prot = mean_of(cc_prot);
        a.count = count;
        return a;
    }
};

}  // namespace

std::vector<AggregateRow> aggregate_results(std::span<const EvalRow> rows) {
    if (rows.empty()) throw ShapeError("no evaluation rows to aggregate");
    std::map<std::pair<int, Method>, std::pair<Columns, std::size_t>> groups;
    for (const auto& r : rows) {
        auto& g = groups[{r.muscle_id, r.method}];
        g.first.add(r);
        ++g.second;
    }
    std::vector<AggregateRow> out;
    std::map<Method, std::pair<Columns, std::size_t>> grand;
    for (const auto& [key, g] : groups) {
        AggregateRow a = g.first.reduce(key.first, key.second, g.second);
        auto& gm = grand[key.second];
        gm.first.add(a);
        ++gm.second;
        out.push_back(a);
    }
    for (const auto& [method, g] : grand) out.push_back(g.first.reduce(std::nullopt, method, g.second));
    return out;
}

namespace {

std::string cell(const std::optional<double>& x) { return x ? format_shortest(*x) : std::string(); }

std::optional<double> parse_cell(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

constexpr const char* kRowsHeader =
    "muscle_id,mu_id,iz_pr_mm,v_pr_mps,method,d_iz_mm,d_v_mps,sqrt_mse_pred_v,cc_pred_v2,sqrt_mse_prot_v,cc_prot_v2";

}  // namespace

void write_rows_csv(std::ostream& out, std::span<const EvalRow> rows) {
    out << kRowsHeader << '\n';
    for (const auto& r : rows) {
        out << r.muscle_id << ',' << r.mu_id << ',' << format_shortest(r.iz_pr_mm) << ','
            << format_shortest(r.v_pr) << ',' << to_string(r.method) << ',' << format_shortest(r.d_iz_mm) << ','
            << cell(r.d_v) << ',' << cell(r.sqrt_mse_pred) << ',' << cell(r.cc_pred) << ','
            << cell(r.sqrt_mse_prot) << ',' << cell(r.cc_prot) << '\n';
    }
}

std::vector<EvalRow> read_rows_csv(std::istream& in) {
    std::string line;
    // Leading '#' lines carry provenance and are skipped.
    while (std::getline(in, line) && !line.empty() && line.front() == '#') {
    }
    if (!in || line != kRowsHeader) {
        throw FormatError(FormatError::Kind::malformed_header, "unexpected evaluation CSV header");
    }
    std::vector<EvalRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 11) throw FormatError(FormatError::Kind::dimension, "evaluation CSV row needs 11 fields");
        try {
            EvalRow r;
            r.muscle_id = std::stoi(f[0]);
            r.mu_id = std::stoi(f[1]);
            r.iz_pr_mm = parse_double(f[2]);
            r.v_pr = parse_double(f[3]);
            r.method = method_from_string(f[4]);
            r.d_iz_mm = parse_double(f[5]);
            r.d_v = parse_cell(f[6]);
            r.sqrt_mse_pred = parse_cell(f[7]);
            r.cc_pred = parse_cell(f[8]);
            r.sqrt_mse_prot = parse_cell(f[9]);
            r.cc_prot = parse_cell(f[10]);
            rows.push_back(r);
        } catch (const std::invalid_argument& e) {
            throw FormatError(FormatError::Kind::malformed_header, std::string("bad evaluation CSV value: ") + e.what());
        } catch (const ConfigError& e) {
            throw FormatError(FormatError::Kind::malformed_header, e.what());
        }
    }
    return rows;
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
    out << "muscle_id,iz_pr_mm,v_pr_mps,method,d_iz_mm,d_v_mps,sqrt_mse_pred_v,cc_pred_v2,sqrt_mse_prot_v,"
           "cc_prot_v2,count\n";
    for (const auto& r : rows) {
        out << (r.muscle_id ? std::to_string(*r.muscle_id) : std::string("mean")) << ','
            << format_shortest(r.iz_pr_mm) << ',' << format_shortest(r.v_pr) << ',' << to_string(r.method) << ','
            << format_shortest(r.d_iz_mm) << ',' << cell(r.d_v) << ',' << cell(r.sqrt_mse_pred) << ','
            << cell(r.cc_pred) << ',' << cell(r.sqrt_mse_prot) << ',' << cell(r.cc_prot) << ',' << r.count << '\n';
    }
}

namespace {

std::string method_label(Method m) { return m == Method::clustering ? "Clustering" : "Informed AE"; }

std::string render(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& body) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : body) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) out << "  ";
            out << std::string(width[c] - cells[c].size(), ' ') << cells[c];
        }
        out << '\n';
    };
    line(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    for (const auto& row : body) line(row);
    return out.str();
}

}  // namespace

std::string render_rows_table(std::span<const EvalRow> rows) {
    const std::vector<std::string> header{"Motor Unit ID", "iz_PR [mm]", "v_PR [m/s]", "Estimation Method",
                                          "d_abs_iz [mm]", "d_abs_v [m/s]", "pred sqrt(L_mse) [V]",
                                          "pred L_cc [V^2]", "prot sqrt(L_mse) [V]", "prot L_cc [V^2]"};
    std::vector<EvalRow> sorted(rows.begin(), rows.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const EvalRow& a, const EvalRow& b) {
        return std::tie(a.muscle_id, a.mu_id, a.method) < std::tie(b.muscle_id, b.mu_id, b.method);
    });
    std::vector<std::vector<std::string>> body;
    for (const auto& r : sorted) {
        body.push_back({std::to_string(r.mu_id), format_fixed4(r.iz_pr_mm), format_fixed4(r.v_pr),
                        method_label(r.method), format_fixed4(r.d_iz_mm), format_fixed4(r.d_v),
                        format_fixed4(r.sqrt_mse_pred), format_fixed4(r.cc_pred), format_fixed4(r.sqrt_mse_prot),
                        format_fixed4(r.cc_prot)});
    }
    return render(header, body);
}

std::string render_aggregate_table(std::span<const AggregateRow> rows) {
    const std::vector<std::string> header{"Muscle ID", "mean iz_PR [mm]", "mean v_PR [m/s]", "Estimation Method",
                                          "mean d_abs_iz [mm]", "mean d_abs_v [m/s]", "pred sqrt(L_mse) [V]",
                                          "pred L_cc [V^2]", "prot sqrt(L_mse) [V]", "prot L_cc [V^2]"};
    std::vector<std::vector<std::string>> body;
    for (const auto& r : rows) {
        body.push_back({r.muscle_id ? std::to_string(*r.muscle_id) : std::string("mean"), format_fixed4(r.iz_pr_mm),
                        format_fixed4(r.v_pr), method_label(r.method), format_fixed4(r.d_iz_mm), format_fixed4(r.d_v),
                        format_fixed4(r.sqrt_mse_pred), format_fixed4(r.cc_pred), format_fixed4(r.sqrt_mse_prot),
                        format_fixed4(r.cc_prot)});
    }
    return render(header, body);
}

namespace {

std::vector<double> axis(const Interval& range, double step) {
    const auto n = static_cast<std::size_t>(std::floor(range.width() / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = range.lo + step * static_cast<double>(i);
    return out;
}

void finish(Landscape& l) {
    auto by = [&](auto key) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < l.values.size(); ++i) {
            if (key(l.values[i]) < key(l.values[best])) best = i;
        }
        return best;
    };
    l.argmin_mse = by([](const LossBreakdown& b) { return b.mse; });
    l.argmin_combined = by([](const LossBreakdown& b) { return b.combined; });
}

Landscape prepare(const DecoderContext& ctx, const LandscapeGrid& grid) {
    grid.validate(PhysicalScalerBounds::for_array(ctx.array));
    Landscape l;
    l.iz = grid.iz_values();
    l.v = grid.v_values();
    l.values.resize(l.iz.size() * l.v.size());
    return l;
}

}  // namespace

std::vector<double> LandscapeGrid::iz_values() const { return axis(iz, iz_step); }
std::vector<double> LandscapeGrid::v_values() const { return axis(v, v_step); }

void LandscapeGrid::validate(const PhysicalScalerBounds& bounds) const {
    if (!(iz_step > 0.0) || !(v_step > 0.0)) throw ConfigError("landscape steps must be positive");
    if (!(iz.hi >= iz.lo) || !(v.hi >= v.lo)) throw ConfigError("landscape ranges must be ordered");
    constexpr double tol = 1e-12;
    if (iz.lo < bounds.iz.lo - tol || iz.hi > bounds.iz.hi + tol || v.lo < bounds.v.lo - tol ||
        v.hi > bounds.v.hi + tol) {
        throw ConfigError("landscape grid leaves the physical bounds");
    }
}

Landscape loss_landscape(const Matrix& m, const DecoderContext& ctx, const LandscapeGrid& grid,
                         const LossWeights& weights) {
    Landscape l = prepare(ctx, grid);
    const auto cells = static_cast<std::ptrdiff_t>(l.values.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
        const auto k = static_cast<std::size_t>(c);
        l.values[k] = loss_combined(decode_value(l.point(k), ctx), m, weights);
    }
    finish(l);
    return l;
}

namespace reference {

Landscape loss_landscape(const Matrix& m, const DecoderContext& ctx, const LandscapeGrid& grid,
                         const LossWeights& weights) {
    Landscape l = prepare(ctx, grid);
    for (std::size_t k = 0; k < l.values.size(); ++k) {
        l.values[k] = loss_combined(reference::decode_value(l.point(k), ctx), m, weights);
    }
    finish(l);
    return l;
}

}  // namespace reference

void write_landscape_csv(std::ostream& out, const Landscape& landscape) {
    out << "iz_m,v_mps,mse,cc,combined\n";
    for (std::size_t k = 0; k < landscape.values.size(); ++k) {
        const EstimatedParams p = landscape.point(k);
        const LossBreakdown& b = landscape.values[k];
        out << format_shortest(p.iz_hat) << ',' << format_shortest(p.v_hat) << ',' << format_shortest(b.mse) << ','
            << format_shortest(b.cc) << ',' << format_shortest(b.combined) << '\n';
    }
}

}  // namespace myo
