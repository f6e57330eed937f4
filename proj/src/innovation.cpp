#include "gdmd/innovation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

namespace gdmd {

namespace {

const char* method_name(IpMethod m) {
    return m == IpMethod::recursive ? "recursive" : "svd";
}

void check_profile_bounds(const SnapshotMatrix& m, Eigen::Index start, Eigen::Index k_max) {
    if (start < 1) throw ValidationError("profile start must be >= 1");
    if (k_max < 1) throw ValidationError("profile k_max must be >= 1");
    if (start + k_max > m.cols() - 1)
        throw ValidationError("profile windows overrun the data: start=" +
                              std::to_string(start) + ", k_max=" + std::to_string(k_max) +
                              " requires start+k_max <= L-1 = " + std::to_string(m.cols() - 1));
}

// |sin(acos(c))| without the trig round-trip; exact for c in [-1,1].
double sine_from_cosine(double c) {
    c = std::clamp(c, -1.0, 1.0);
    return std::sqrt(std::max(0.0, (1.0 - c) * (1.0 + c)));
}

struct EntryResult {
    double value;
    bool degenerate;
};

// One r_k through the econ-SVD route, flagged when either window lost rank.
EntryResult svd_entry(const SnapshotMatrix& m, Eigen::Index start, Eigen::Index k,
                      double rel_tol) {
    OrthonormalBasis b1 = orthonormalize(m.window({start, k}), rel_tol);
    OrthonormalBasis b2 = orthonormalize(m.window({start + 1, k}), rel_tol);
    GapValue g = gap(b1, b2);
    return {g.gap, std::min(b1.rank(), b2.rank()) < k};
}

void finish_profile(InnovationProfile& p) {
    p.angles.resize(p.values.size());
    for (size_t i = 0; i < p.values.size(); ++i)
        p.angles[i] = std::asin(std::clamp(p.values[i], 0.0, 1.0));
}

} // namespace

InnovationProfile ip_profile_svd(const SnapshotMatrix& m, Eigen::Index start,
                                 Eigen::Index k_max, double rel_tol) {
    check_profile_bounds(m, start, k_max);
    InnovationProfile p;
    p.start = start;
    p.method = IpMethod::svd;
    p.values.reserve(static_cast<size_t>(k_max));
    p.degenerate.reserve(static_cast<size_t>(k_max));
    for (Eigen::Index k = 1; k <= k_max; ++k) {
        EntryResult e = svd_entry(m, start, k, rel_tol);
        p.values.push_back(e.value);
        p.degenerate.push_back(e.degenerate);
    }
    finish_profile(p);
    return p;
}

InnovationProfile ip_profile_recursive(const SnapshotMatrix& m, Eigen::Index start,
                                       Eigen::Index k_max, double rel_tol) {
    check_profile_bounds(m, start, k_max);
    InnovationProfile p;
    p.start = start;
    p.method = IpMethod::recursive;
    p.values.resize(static_cast<size_t>(k_max));
    p.degenerate.assign(static_cast<size_t>(k_max), false);

    const Eigen::Index n = m.rows();
    Eigen::MatrixXd basis(n, k_max);  // orthonormal columns spanning the middle window
    Eigen::Index basis_cols = 0;

    auto deflate = [&](Eigen::VectorXd& v) {
        if (basis_cols == 0) return;
        auto u = basis.leftCols(basis_cols);
        v.noalias() -= u * (u.transpose() * v);
        v.noalias() -= u * (u.transpose() * v);  // second pass holds orthogonality
    };

    const Eigen::VectorXd x_first = m.snapshot(start);
    const double x_first_norm = x_first.norm();

    Eigen::VectorXd res_first = x_first;  // running deflation of x_start
    Eigen::VectorXd u_last;               // unit direction added by the newest snapshot
    bool first_alive = x_first_norm > 0.0;
    bool last_alive = false;

    {
        const Eigen::VectorXd x2 = m.snapshot(start + 1);
        const double x2_norm = x2.norm();
        if (first_alive && x2_norm > 0.0) {
            u_last = x2 / x2_norm;
            last_alive = true;
            const double c = res_first.dot(u_last) / x_first_norm;
            p.values[0] = sine_from_cosine(c);
        } else {
            EntryResult e = svd_entry(m, start, 1, rel_tol);
            p.values[0] = e.value;
            p.degenerate[0] = true;
        }
    }

    for (Eigen::Index k = 2; k <= k_max; ++k) {
        if (first_alive && last_alive) {
            // Middle window gains the previous newest snapshot.
            basis.col(basis_cols++) = u_last;
            const double proj = res_first.dot(u_last);
            res_first.noalias() -= proj * u_last;
            deflate(res_first);  // re-orthogonalization pass
            if (res_first.norm() < kDeflationCollapseTol * x_first_norm) first_alive = false;
        }
        if (first_alive) {
            const Eigen::VectorXd x_new = m.snapshot(start + k);
            const double x_new_norm = x_new.norm();
            Eigen::VectorXd w = x_new;
            deflate(w);
            const double w_norm = w.norm();
            if (x_new_norm > 0.0 && w_norm >= kDeflationCollapseTol * x_new_norm) {
                u_last = w / w_norm;
                last_alive = true;
                const double c = res_first.dot(u_last) / res_first.norm();
                p.values[static_cast<size_t>(k - 1)] = sine_from_cosine(c);
                continue;
            }
            last_alive = false;  // snapshot lies in the current span
        }
        // Rank degeneracy: the mismatch rule would be wrong when both windows
        // lost rank together (periodic data has gap 0 there), so defer to the
        // SVD path for this entry.
        EntryResult e = svd_entry(m, start, k, rel_tol);
        p.values[static_cast<size_t>(k - 1)] = e.value;
        p.degenerate[static_cast<size_t>(k - 1)] = true;
    }
    finish_profile(p);
    return p;
}

InnovationProfile ip_profile(const SnapshotMatrix& m, Eigen::Index start, Eigen::Index k_max,
                             IpMethod method, double rel_tol) {
    return method == IpMethod::recursive ? ip_profile_recursive(m, start, k_max, rel_tol)
                                         : ip_profile_svd(m, start, k_max, rel_tol);
}

GapSpectrogram spectrogram(const SnapshotMatrix& m, Eigen::Index l_max, Eigen::Index k_max,
                           IpMethod method, double rel_tol) {
    if (l_max < 1 || k_max < 1)
        throw ValidationError("spectrogram requires l_max >= 1 and k_max >= 1");
    if (l_max > m.cols() - 2)
        throw ValidationError("spectrogram l_max=" + std::to_string(l_max) +
                              " leaves no valid window; maximum is L-2 = " +
                              std::to_string(m.cols() - 2));
    GapSpectrogram sg;
    sg.l_max = l_max;
    sg.k_max = k_max;
    sg.method = method;
    sg.entries.assign(static_cast<size_t>(l_max),
                      std::vector<GapSpectrogram::Entry>(static_cast<size_t>(k_max)));

    auto run_row = [&](Eigen::Index l) {
        const Eigen::Index row_k = std::min<Eigen::Index>(k_max, m.cols() - 1 - l);
        if (row_k < 1) return;
        InnovationProfile p = ip_profile(m, l, row_k, method, rel_tol);
        auto& row = sg.entries[static_cast<size_t>(l - 1)];
        for (Eigen::Index k = 1; k <= row_k; ++k) {
            auto& e = row[static_cast<size_t>(k - 1)];
            e.value = p.values[static_cast<size_t>(k - 1)];
            e.present = true;
            e.degenerate = p.degenerate[static_cast<size_t>(k - 1)];
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = static_cast<unsigned>(
        std::min<Eigen::Index>(static_cast<Eigen::Index>(hw), l_max));
    if (n_threads <= 1) {
        for (Eigen::Index l = 1; l <= l_max; ++l) run_row(l);
        return sg;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (Eigen::Index l = 1 + static_cast<Eigen::Index>(t); l <= l_max;
                     l += static_cast<Eigen::Index>(n_threads))
                    run_row(l);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    return sg;
}

GramKernel gram_kernel(const SnapshotMatrix& m) {
    GramKernel g;
    auto v = m.view();
    // rank-update keeps the kernel exactly symmetric
    g.k = Eigen::MatrixXd::Zero(m.cols(), m.cols());
    g.k.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose());
    g.k.triangularView<Eigen::StrictlyUpper>() = g.k.transpose();
    const Eigen::Index l = g.k.rows();
    const double eps =
        1e-12 * (g.k.trace() / static_cast<double>(l)) + std::numeric_limits<double>::min();
    double worst = 0.0;
    for (Eigen::Index d = 0; d < l; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        const Eigen::Index count = l - d;
        for (Eigen::Index i = 0; i < count; ++i) {
            const double v_ij = g.k(i, i + d);
            lo = std::min(lo, v_ij);
            hi = std::max(hi, v_ij);
            sum += v_ij;
        }
        const double mean = sum / static_cast<double>(count);
        worst = std::max(worst, (hi - lo) / (std::abs(mean) + eps));
    }
    g.toeplitz_deviation = worst;
    return g;
}

void write_profile_csv(const InnovationProfile& p, std::ostream& out) {
    out << "k,r,theta,method,flag\n";
    for (Eigen::Index k = 1; k <= p.k_max(); ++k) {
        const size_t i = static_cast<size_t>(k - 1);
        out << k << ',' << format_double(p.values[i]) << ',' << format_double(p.angles[i])
            << ',' << method_name(p.method) << ','
            << (p.degenerate[i] ? "degenerate" : "ok") << '\n';
    }
}

void write_spectrogram_csv(const GapSpectrogram& sg, std::ostream& out) {
    out << 'l';
    for (Eigen::Index k = 1; k <= sg.k_max; ++k) out << ',' << k;
    out << '\n';
    for (Eigen::Index l = 1; l <= sg.l_max; ++l) {
        out << l;
        for (Eigen::Index k = 1; k <= sg.k_max; ++k) {
            const auto& e = sg.at(l, k);
            out << ',';
            if (e.present) out << format_double(e.value);
        }
        out << '\n';
    }
}

GapSpectrogram read_spectrogram_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty spectrogram CSV", 1, 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("l,", 0) != 0) throw ParseError("spectrogram CSV header must start with 'l,'", 1, 1);

    GapSpectrogram sg;
    {
        size_t pos = 2;
        Eigen::Index expect = 1;
        while (pos <= line.size()) {
            size_t comma = line.find(',', pos);
            std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                          : comma - pos);
            if (std::to_string(expect) != tok)
                throw ParseError("spectrogram header: expected k=" + std::to_string(expect) +
                                     ", got '" + tok + "'",
                                 1, expect + 1);
            ++expect;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        sg.k_max = expect - 1;
    }
    if (sg.k_max < 1) throw ParseError("spectrogram CSV has no k columns", 1, 1);

    long line_no = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        if (line.empty()) continue;
        std::vector<GapSpectrogram::Entry> row(static_cast<size_t>(sg.k_max));
        size_t pos = 0;
        long field = 0;
        Eigen::Index row_label = -1;
        while (true) {
            size_t comma = line.find(',', pos);
            std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                          : comma - pos);
            ++field;
            if (field == 1) {
                row_label = static_cast<Eigen::Index>(parse_double(tok, line_no, field));
            } else if (!tok.empty()) {
                if (field - 1 > sg.k_max)
                    throw ParseError("spectrogram row has too many fields", line_no, field);
                auto& e = row[static_cast<size_t>(field - 2)];
                e.value = parse_double(tok, line_no, field);
                e.present = true;
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (row_label != static_cast<Eigen::Index>(sg.entries.size()) + 1)
            throw ParseError("spectrogram rows must be labeled 1..l_max in order", line_no, 1);
        sg.entries.push_back(std::move(row));
    }
    sg.l_max = static_cast<Eigen::Index>(sg.entries.size());
    if (sg.l_max < 1) throw ParseError("spectrogram CSV has no rows", 2, 1);
    return sg;
}

} // namespace gdmd
