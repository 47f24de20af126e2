#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loopdec/code.hpp"
#include "loopdec/instanton.hpp"
#include "loopdec/lp.hpp"

namespace loopdec {

struct CorrectionConfig {
    int n_seeds = 500;
    std::uint64_t seed0 = 1000;
    int max_instantons = 50;   // lowest-d_eff records to test
    double epsilon = 0.0;
    int rescale_points = 5;    // amplitudes 1+eps .. lambda_max per instanton
    double rescale_max = 1.2;  // capped per instanton by sqrt(20 / d_eff)
    double hamming_distance = 20.0;
    int threads = 0;
    ErasureParams erasure;
};

struct CorrectionRow {
    std::uint64_t seed = 0;
    double d_eff = 0.0;
    double lambda = 1.0;  // displacement rescaling
    bool bare_lp_failed = false;
    bool corrected = false;
    bool decoded_transmitted = false;
    int loops_tried = 0;
    double loop_r = 0.0;
    double threshold = 0.0;
    std::vector<int> erased_bits;
};

struct CorrectionReport {
    std::vector<CorrectionRow> rows;
    int n_instantons = 0;
    double corrected_fraction = -1.0;  // -1 when the report is empty
};

// The error-floor correction experiment: regenerate instantons, verify the
// bare LP fails just past the tie surface, run LP-erasure, sweep rescaled
// amplitudes within the Hamming-sphere geometry.
CorrectionReport run_instanton_correction(const ParityCheckCode& code,
                                          const CorrectionConfig& config,
                                          const InstantonCatalog* catalog = nullptr);

struct FerConfig {
    std::vector<double> s2_grid = {1.5, 2.0, 2.5};
    int trials = 1000;
    std::uint64_t seed0 = 77;
    double epsilon = 0.0;
    int threads = 0;
    ErasureParams erasure;
};

struct FerRow {
    double s2 = 0.0;
    int trials = 0;
    int lp_failures = 0;
    int erasure_failures = 0;
    double lp_fer = 0.0, lp_lo = 0.0, lp_hi = 0.0;              // Wilson 95%
    double er_fer = 0.0, er_lo = 0.0, er_hi = 0.0;
};

// Monte-Carlo frame-error-rate comparison of bare LP and LP-erasure.
// A frame error is any decode other than the transmitted all-(+1) word.
std::vector<FerRow> run_fer_sweep(const ParityCheckCode& code, const FerConfig& config);

struct ZCheckRow {
    std::string graph;
    int n_loops = 0;
    double max_rel_err = 0.0;
    int draws = 0;
    int skipped_saturated = 0;
    bool pass = false;
};

struct ZCheckConfig {
    int draws = 50;
    std::uint64_t seed0 = 5;
    double h_scale = 1.0;
    double rel_tol = 1e-8;
};

// Loop-series exactness regression over the bundled small graphs.
std::vector<ZCheckRow> run_zcheck_suite(const ZCheckConfig& config);

// Wilson 95% confidence interval for k successes in n trials.
std::pair<double, double> wilson_interval(int k, int n);

}  // namespace loopdec
