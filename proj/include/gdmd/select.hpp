#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdmd/innovation.hpp"

namespace gdmd {

enum class Confidence { strong, weak, none };

const char* confidence_name(Confidence c);

/// Tunables for reading the dimple structure of a spectrogram.  These
/// defaults formalize what is otherwise read off the heatmap by eye.
struct SelectParams {
    Eigen::Index k_min = 2;      // smaller k excluded from the argmin
    double tie_tol = 1e-7;       // absolute window for noise-floor argmin ties
    double depth_strong = 10.0;  // median(r)/r(n_star) needed for "strong"
    double depth_some = 2.0;     // below this there is no dimple at all
    double majority = 2.0 / 3.0; // row agreement needed for "strong"
};

struct OrderRecommendation {
    Eigen::Index n_star = 0;
    std::vector<Eigen::Index> per_row_argmin;       // one k per row (0 = no data)
    std::optional<Eigen::Index> period_estimate;    // spacing of repeated dimples
    double depth = 0.0;                             // median(r) / r(n_star)
    Confidence confidence = Confidence::none;

    /// Single-line JSON {n_star, confidence, period_estimate, depth}.
    std::string to_json() const;
};

struct ConditioningReport {
    std::vector<double> condition;   // condition[k-1] = cond(X_{1:k})
    std::vector<bool> colinear;      // sigma_min/sigma_max < 1e-8
};

/// Per-row argmin over k >= k_min (values within tie_tol of the row minimum
/// count as ties, broken toward smaller k), majority vote across rows, and
/// a depth ratio; see SelectParams for the confidence rules.
OrderRecommendation recommend_order(const GapSpectrogram& sg, const SelectParams& params = {});

OrderRecommendation recommend_order(const GapSpectrogram& sg, Eigen::Index k_min);

/// Condition numbers of the growing prefix windows X_{1:k}, k = 1..k_max,
/// with colinearity flags where gap values become unreliable.
ConditioningReport conditioning_report(const SnapshotMatrix& m, Eigen::Index k_max);

void write_conditioning_csv(const ConditioningReport& r, std::ostream& out);

} // namespace gdmd
