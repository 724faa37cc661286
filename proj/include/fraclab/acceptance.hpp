#pragma once
// The acceptance battery: ten numbered criteria with pinned seeds and
// thresholds, runnable singly, per battery, or as the full set.
#include "fraclab/config.hpp"

#include <string>
#include <vector>

namespace fraclab::acceptance {

using config::CriterionResult;

struct AcceptanceOptions {
    int threads = 0;    // <= 0: hardware, always capped by FRACLAB_THREADS
    bool small = false; // 10^2-sample statistical checks with widened 5-stderr gates
};

// W2(empirical(7.5), Gibbs draws) gate for the quartic ensemble, pinned from
// the calibration run (measured 0.0425 at 10^4 samples; repeat seeds gave
// 0.037..0.048, so the gate sits at roughly twice the observed level).
inline constexpr double kW2CalibrationThreshold = 0.08;

CriterionResult criterion_coefficient_identities();                  // 1
CriterionResult criterion_coefficient_asymptotics();                 // 2
CriterionResult criterion_linear_fode();                             // 3
CriterionResult criterion_comparison_principles();                   // 4
CriterionResult criterion_mittag_leffler();                          // 5
CriterionResult criterion_fbm_statistics(const AcceptanceOptions&);  // 6
CriterionResult criterion_quartic_ensemble(const AcceptanceOptions&); // 7
CriterionResult criterion_contraction(const AcceptanceOptions&);     // 8
CriterionResult criterion_gradient_flow();                           // 9
CriterionResult criterion_determinism(const AcceptanceOptions&);     // 10

// battery in {coeffs, fode, fsde-small, fsde-paper, gradflow}; UsageError
// otherwise. coeffs = {1,2}, fode = {3,4,5}, fsde-small = {6,10} at reduced
// samples, fsde-paper = {7,8}, gradflow = {9}.
std::vector<CriterionResult> run_battery(const std::string& battery, const AcceptanceOptions& opts = {});

// Full set 1..10 when battery is empty or "all"; the named battery otherwise.
// The manifest records the pinned seeds actually consumed.
config::RunManifest run_acceptance(const std::string& battery, const AcceptanceOptions& opts = {});

} // namespace fraclab::acceptance
