#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "myo/errors.hpp"
#include "myo/evaluation.hpp"
#include "myo/format.hpp"
#include "support.hpp"

using namespace myo;

namespace {

EvalRow row(int muscle, int mu, Method method, double d_iz, std::optional<double> d_v = std::nullopt) {
    EvalRow r;
    r.muscle_id = muscle;
    r.mu_id = mu;
    r.iz_pr_mm = 1.5 * mu - 2.0;
    r.v_pr = 3.0 + 0.25 * mu;
    r.method = method;
    r.d_iz_mm = d_iz;
    r.d_v = d_v;
    if (method == Method::informed_ae) {
        r.sqrt_mse_pred = 0.1 * mu + 0.012345;
        r.cc_pred = -0.2 - 0.01 * mu;
        r.sqrt_mse_prot = 0.05 * mu + 0.0001;
        r.cc_prot = -0.21 - 0.01 * mu;
    }
    return r;
}

std::vector<EvalRow> sample_rows() {
    std::vector<EvalRow> rows;
    for (int muscle : {0, 1}) {
        for (int mu = 0; mu < 4; ++mu) {
            rows.push_back(row(muscle, mu, Method::clustering, 1.0 + mu + muscle));
            rows.push_back(row(muscle, mu, Method::informed_ae, 0.1 * mu + 0.3 * muscle, 0.01 * mu + 0.123456789));
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("prototype: arithmetic means over fibres") {
    const MotorUnit u{{{0.001, 3.0, 0.15, 0.010, 0.0, -0.070}, {0.003, 5.0, 0.16, 0.020, 0.002, -0.080}}};
    const PrototypeParams p = prototype_params(u);
    CHECK(p.iz_pr == doctest::Approx(0.002));
    CHECK(p.v_pr == 4.0);
    CHECK(p.geometry.length == doctest::Approx(0.155));
    CHECK(p.geometry.depth == doctest::Approx(0.015));
    CHECK(p.geometry.z_start == doctest::Approx(-0.075));
    const AbsoluteErrors e = absolute_errors(p, {0.0, 4.5});
    CHECK(e.iz == doctest::Approx(0.002));
    CHECK(e.v == 0.5);
    CHECK_THROWS_AS(prototype_params(MotorUnit{}), ShapeError);
}

TEST_CASE("prototype losses vanish on the prototype's own model output") {
    const MotorUnit u{{test::centred_fibre(0.003, 4.1, 0.012)}};
    const PrototypeParams p = prototype_params(u);
    const DecoderContext ctx = test::default_context(p.geometry);
    const Matrix m = minmax_scale(decode_value(p.as_estimate(), ctx)).m;
    const LossBreakdown l = prototype_losses(m, p, ctx, LossWeights{});
    CHECK(std::sqrt(l.mse) < 1e-6);
    const auto rows = evaluation_rows(0, 7, p, m, ctx, LossWeights{}, p.as_estimate(), 0.0041);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == Method::clustering);
    CHECK(rows[0].d_iz_mm == doctest::Approx(1.1));
    CHECK_FALSE(rows[0].d_v.has_value());
    CHECK_FALSE(rows[0].cc_prot.has_value());
    CHECK(rows[1].method == Method::informed_ae);
    CHECK(rows[1].d_iz_mm == 0.0);
    CHECK(*rows[1].sqrt_mse_pred == *rows[1].sqrt_mse_prot);
    CHECK(evaluation_rows(0, 7, p, m, ctx, LossWeights{}, p.as_estimate(), std::nullopt).size() == 1);
}

TEST_CASE("aggregation: muscle means, grand mean of muscle means and order independence") {
    const auto rows = sample_rows();
    const auto agg = aggregate_results(rows);
    // Two muscles x two methods, then one grand mean per method.
    REQUIRE(agg.size() == 6);
    const auto find = [&](std::optional<int> muscle, Method m) {
        return *std::find_if(agg.begin(), agg.end(),
                             [&](const AggregateRow& a) { return a.muscle_id == muscle && a.method == m; });
    };
    CHECK(find(0, Method::clustering).d_iz_mm == doctest::Approx(2.5));
    CHECK(find(1, Method::clustering).d_iz_mm == doctest::Approx(3.5));
    CHECK(find(std::nullopt, Method::clustering).d_iz_mm == doctest::Approx(3.0));
    CHECK_FALSE(find(std::nullopt, Method::clustering).d_v.has_value());
    CHECK(find(0, Method::informed_ae).count == 4);
    CHECK(*find(std::nullopt, Method::informed_ae).d_v == doctest::Approx(0.015 + 0.123456789));

    std::vector<EvalRow> shuffled = rows;
    std::mt19937_64 g(1);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(shuffled.begin(), shuffled.end(), g);
        const auto again = aggregate_results(shuffled);
        REQUIRE(again.size() == agg.size());
        for (std::size_t i = 0; i < agg.size(); ++i) {
            CHECK(again[i].muscle_id == agg[i].muscle_id);
            CHECK(again[i].d_iz_mm == agg[i].d_iz_mm);
            CHECK(again[i].d_v == agg[i].d_v);
            CHECK(again[i].cc_prot == agg[i].cc_prot);
        }
    }
    CHECK_THROWS_AS(aggregate_results(std::vector<EvalRow>{}), ShapeError);
}

TEST_CASE("aggregation: identical rows aggregate to themselves") {
    const std::vector<EvalRow> rows(5, row(2, 3, Method::informed_ae, 0.7, 0.05));
    const auto agg = aggregate_results(rows);
    CHECK(agg.front().d_iz_mm == 0.7);
    CHECK(*agg.front().d_v == 0.05);
    CHECK(*agg.front().cc_pred == doctest::Approx(*rows[0].cc_pred).epsilon(1e-15));
}

TEST_CASE("rows CSV: lossless round trip and provenance lines are skipped") {
    const auto rows = sample_rows();
    std::ostringstream out;
    out << "# config_hash=0123456789abcdef seed=7\n";
    write_rows_csv(out, rows);
    std::istringstream in(out.str());
    const auto back = read_rows_csv(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].muscle_id == rows[i].muscle_id);
        CHECK(back[i].mu_id == rows[i].mu_id);
        CHECK(back[i].method == rows[i].method);
        CHECK(back[i].iz_pr_mm == rows[i].iz_pr_mm);
        CHECK(back[i].d_iz_mm == rows[i].d_iz_mm);
        CHECK(back[i].d_v == rows[i].d_v);
        CHECK(back[i].sqrt_mse_pred == rows[i].sqrt_mse_pred);
        CHECK(back[i].cc_prot == rows[i].cc_prot);
    }
    std::istringstream bad("muscle_id,mu_id\n1,x\n");
    CHECK_THROWS(read_rows_csv(bad));
}

TEST_CASE("tables: column structure and four-decimal rounding") {
    const auto rows = sample_rows();
    const std::string t1 = render_rows_table(rows);
    std::istringstream lines(t1);
    std::string header;
    std::getline(lines, header);
    for (const char* col : {"Motor Unit ID", "iz_PR [mm]", "v_PR [m/s]", "Estimation Method", "d_abs_iz [mm]",
                            "d_abs_v [m/s]", "pred sqrt(L_mse) [V]", "pred L_cc [V^2]", "prot sqrt(L_mse) [V]",
                            "prot L_cc [V^2]"}) {
        CHECK(header.find(col) != std::string::npos);
    }
    CHECK(t1.find("0.1235") != std::string::npos);  // 0.123456789 rounded
    CHECK(t1.find("Clustering") != std::string::npos);
    CHECK(t1.find("Informed AE") != std::string::npos);
    CHECK(t1.find("--") != std::string::npos);
    const std::string t2 = render_aggregate_table(aggregate_results(rows));
    CHECK(t2.find("Muscle ID") != std::string::npos);
    CHECK(t2.find("mean d_abs_iz [mm]") != std::string::npos);
    CHECK(t2.find("mean") != std::string::npos);
    CHECK(format_fixed4(-0.00001) == "0.0000");
    CHECK(format_fixed4(2.71828) == "2.7183");
    CHECK(format_fixed4(std::optional<double>{}) == "--");
}

TEST_CASE("landscape: argmin on model output and serial agreement") {
    const DecoderContext ctx = test::default_context();
    const Matrix m = minmax_scale(decode_value({0.002, 4.5}, ctx)).m;
    LandscapeGrid grid;
    grid.iz = {-0.004, 0.008};
    grid.iz_step = 0.001;
    grid.v = {4.0, 5.0};
    grid.v_step = 0.1;
    const Landscape l = loss_landscape(m, ctx, grid, LossWeights{});
    REQUIRE(l.iz.size() == 13);
    REQUIRE(l.v.size() == 11);
    const EstimatedParams best = l.point(l.argmin_mse);
    CHECK(best.iz_hat == doctest::Approx(0.002));
    CHECK(best.v_hat == doctest::Approx(4.5));
    const EstimatedParams comb = l.point(l.argmin_combined);
    CHECK(std::abs(comb.iz_hat - 0.002) <= grid.iz_step + 1e-12);
    CHECK(std::abs(comb.v_hat - 4.5) <= grid.v_step + 1e-12);

    const Landscape r = reference::loss_landscape(m, ctx, grid, LossWeights{});
    for (std::size_t i = 0; i < l.values.size(); ++i) CHECK(l.values[i].combined == r.values[i].combined);
    CHECK(l.argmin_combined == r.argmin_combined);

    std::ostringstream csv;
    write_landscape_csv(csv, l);
    const std::string text = csv.str();
    CHECK(text.rfind("iz_m,v_mps,mse,cc,combined\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 13 * 11);
}
