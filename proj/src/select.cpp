#include "gdmd/select.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>

namespace gdmd {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid) - 1, v.end());
    return 0.5 * (v[mid - 1] + hi);
}

Eigen::Index median_spacing(const std::vector<Eigen::Index>& positions) {
    std::vector<double> diffs;
    for (size_t i = 1; i < positions.size(); ++i)
        diffs.push_back(static_cast<double>(positions[i] - positions[i - 1]));
    return static_cast<Eigen::Index>(std::llround(median(std::move(diffs))));
}

} // namespace

const char* confidence_name(Confidence c) {
    switch (c) {
        case Confidence::strong: return "strong";
        case Confidence::weak: return "weak";
        case Confidence::none: return "none";
    }
    return "none";
}

OrderRecommendation recommend_order(const GapSpectrogram& sg, const SelectParams& params) {
    if (params.k_min < 2) throw ValidationError("recommend_order: k_min must be >= 2");
    if (sg.l_max < 1) throw ValidationError("recommend_order: empty spectrogram");

    OrderRecommendation rec;
    rec.per_row_argmin.assign(static_cast<size_t>(sg.l_max), 0);

    std::map<Eigen::Index, Eigen::Index> votes;
    Eigen::Index voting_rows = 0;
    for (Eigen::Index l = 1; l <= sg.l_max; ++l) {
        double row_min = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = params.k_min; k <= sg.k_max; ++k)
            if (sg.at(l, k).present) row_min = std::min(row_min, sg.at(l, k).value);
        if (!std::isfinite(row_min)) continue;
        // Values at the noise floor are ties; parsimony picks the smallest k.
        Eigen::Index argmin = 0;
        for (Eigen::Index k = params.k_min; k <= sg.k_max; ++k)
            if (sg.at(l, k).present && sg.at(l, k).value <= row_min + params.tie_tol) {
                argmin = k;
                break;
            }
        rec.per_row_argmin[static_cast<size_t>(l - 1)] = argmin;
        ++votes[argmin];
        ++voting_rows;
    }
    if (voting_rows == 0)
        throw ValidationError("recommend_order: no spectrogram entries at k >= k_min");

    Eigen::Index best_k = 0, best_count = 0;
    for (const auto& [k, count] : votes)
        if (count > best_count) {  // map order breaks count ties toward smaller k
            best_k = k;
            best_count = count;
        }
    rec.n_star = best_k;

    std::vector<double> all_values, star_values;
    for (Eigen::Index l = 1; l <= sg.l_max; ++l) {
        for (Eigen::Index k = params.k_min; k <= sg.k_max; ++k)
            if (sg.at(l, k).present) all_values.push_back(sg.at(l, k).value);
        if (rec.n_star <= sg.k_max && sg.at(l, rec.n_star).present)
            star_values.push_back(sg.at(l, rec.n_star).value);
    }
    const double r_star = median(std::move(star_values));
    rec.depth = median(std::move(all_values)) / std::max(r_star, 1e-300);

    const double agreement =
        static_cast<double>(best_count) / static_cast<double>(voting_rows);
    if (agreement >= params.majority && rec.depth >= params.depth_strong)
        rec.confidence = Confidence::strong;
    else if (rec.depth >= params.depth_some)
        rec.confidence = Confidence::weak;
    else
        rec.confidence = Confidence::none;

    // Dimple spacing read off row 1 only, mirroring the single-start profile.
    if (sg.l_max >= 1 && rec.n_star >= 1 && rec.n_star <= sg.k_max &&
        sg.at(1, rec.n_star).present) {
        const double cutoff = 2.0 * sg.at(1, rec.n_star).value;
        std::vector<Eigen::Index> minima;
        for (Eigen::Index k = std::max<Eigen::Index>(params.k_min, 2); k <= sg.k_max; ++k) {
            const auto& prev = sg.at(1, k - 1);
            const auto& cur = sg.at(1, k);
            if (!cur.present || !prev.present) continue;
            const bool right_ok =
                (k == sg.k_max) || !sg.at(1, k + 1).present || cur.value < sg.at(1, k + 1).value;
            if (cur.value < prev.value && right_ok && cur.value <= cutoff)
                minima.push_back(k);
        }
        if (minima.size() >= 2) rec.period_estimate = median_spacing(minima);
    }
    return rec;
}

OrderRecommendation recommend_order(const GapSpectrogram& sg, Eigen::Index k_min) {
    SelectParams p;
    p.k_min = k_min;
    return recommend_order(sg, p);
}

std::string OrderRecommendation::to_json() const {
    nlohmann::ordered_json j;
    j["n_star"] = n_star;
    j["confidence"] = confidence_name(confidence);
    if (period_estimate)
        j["period_estimate"] = *period_estimate;
    else
        j["period_estimate"] = nullptr;
    j["depth"] = depth;
    return j.dump();
}

ConditioningReport conditioning_report(const SnapshotMatrix& m, Eigen::Index k_max) {
    if (k_max < 1 || k_max > m.cols())
        throw ValidationError("conditioning_report: k_max must lie in [1,L]");
    ConditioningReport rep;
    rep.condition.reserve(static_cast<size_t>(k_max));
    rep.colinear.reserve(static_cast<size_t>(k_max));
    for (Eigen::Index k = 1; k <= k_max; ++k) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m.window({1, k}).view());
        const Eigen::VectorXd& sigma = svd.singularValues();
        const double s_max = sigma(0);
        const double s_min = sigma(sigma.size() - 1);
        const bool flat = s_max <= 0.0;
        rep.condition.push_back(flat || s_min <= 0.0
                                    ? std::numeric_limits<double>::infinity()
                                    : s_max / s_min);
        rep.colinear.push_back(flat || s_min < 1e-8 * s_max);
    }
    return rep;
}

void write_conditioning_csv(const ConditioningReport& r, std::ostream& out) {
    out << "k,condition,flag\n";
    for (size_t i = 0; i < r.condition.size(); ++i)
        out << (i + 1) << ',' << format_double(r.condition[i]) << ','
            << (r.colinear[i] ? "colinear" : "ok") << '\n';
}

} // namespace gdmd
