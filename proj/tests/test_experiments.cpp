#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loopdec/experiments.hpp"
#include "loopdec/samples.hpp"

using namespace loopdec;

TEST_CASE("wilson interval") {
    auto [lo, hi] = wilson_interval(0, 100);
    CHECK(lo < 1e-12);
    CHECK(hi < 0.05);
    auto [lo2, hi2] = wilson_interval(50, 100);
    CHECK(lo2 < 0.5);
    CHECK(hi2 > 0.5);
    CHECK(hi2 - lo2 < 0.25);
}

TEST_CASE("zcheck suite passes at the acceptance tolerance") {
    ZCheckConfig cfg;
    cfg.draws = 10;  // the acceptance run uses 50
    auto rows = run_zcheck_suite(cfg);
    REQUIRE(rows.size() >= 5);
    for (const auto& row : rows) {
        CAPTURE(row.graph);
        CHECK(row.pass);
        CHECK(row.max_rel_err <= 1e-8);
    }
    // tree graphs carry an empty series and tighter error
    for (const auto& row : rows)
        if (row.graph.rfind("tree", 0) == 0) {
            CHECK(row.n_loops == 0);
            CHECK(row.max_rel_err <= 1e-10);
        }
}

TEST_CASE("fer sweep on the tanner code") {
    FerConfig cfg;
    cfg.s2_grid = {10.0};
    cfg.trials = 60;
    auto rows = run_fer_sweep(build_tanner_155(), cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].lp_failures == 0);      // quiet channel
    CHECK(rows[0].erasure_failures == 0);
    CHECK(rows[0].erasure_failures <= rows[0].lp_failures);
}

TEST_CASE("correction report on an empty catalog") {
    InstantonCatalog empty;
    CorrectionConfig cfg;
    auto report = run_instanton_correction(build_tanner_155(), cfg, &empty);
    CHECK(report.rows.empty());
    CHECK(report.n_instantons == 0);
    CHECK(report.corrected_fraction == -1.0);
}
