#include "gdmd/dmd.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace gdmd {

namespace {

Eigen::MatrixXd companion_from(const Eigen::VectorXd& c) {
    const Eigen::Index p = c.size();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 1; i < p; ++i) s(i, i - 1) = 1.0;
    s.col(p - 1) = c;
    return s;
}

} // namespace

Eigen::MatrixXd CompanionModel::companion_matrix() const { return companion_from(coeffs); }

CompanionModel fit_window(const SnapshotMatrix& m, Eigen::Index start, Eigen::Index n,
                          double rel_tol) {
    if (n < 2) throw ValidationError("fit requires n >= 2");
    if (start < 1 || start + n - 1 > m.cols())
        throw ValidationError("fit window [" + std::to_string(start) + "," +
                              std::to_string(start + n - 1) + "] out of range [1," +
                              std::to_string(m.cols()) + "]");

    CompanionModel model;
    model.n = n;
    if (m.rows() < n - 1)
        model.warnings.push_back("state dimension N=" + std::to_string(m.rows()) +
                                 " is below n-1=" + std::to_string(n - 1) +
                                 "; the regression is necessarily rank-deficient");

    const Eigen::MatrixXd x = m.window({start, n - 1}).view();
    const Eigen::VectorXd target = m.snapshot(start + n - 1);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rel_tol);
    model.coeffs = svd.solve(target);

    const Eigen::VectorXd& sigma = svd.singularValues();
    const double s_max = sigma(0);
    const double s_min = sigma(sigma.size() - 1);
    if (svd.rank() < n - 1) {
        model.condition = std::numeric_limits<double>::infinity();
        model.rank_degenerate = true;
        model.warnings.push_back("X_{1:n-1} is rank-deficient (rank " +
                                 std::to_string(svd.rank()) + " of " + std::to_string(n - 1) +
                                 "); coefficients are the minimum-norm solution");
    } else {
        model.condition = s_max / s_min;
    }

    model.residual = (target - x * model.coeffs).norm();
    const double target_norm = target.norm();
    model.residual_rel = target_norm > 0.0 ? model.residual / target_norm : 0.0;

    Eigen::EigenSolver<Eigen::MatrixXd> es(companion_from(model.coeffs));
    if (es.info() != Eigen::Success)
        throw NumericError("companion eigenvalue computation did not converge");
    model.eigenvalues = es.eigenvalues();
    return model;
}

CompanionModel fit(const SnapshotMatrix& m, Eigen::Index n, double rel_tol) {
    return fit_window(m, 1, n, rel_tol);
}

ModeSet modes_window(const SnapshotMatrix& m, Eigen::Index start, const CompanionModel& model) {
    const Eigen::Index n = model.n;
    if (n < 2 || model.coeffs.size() != n - 1)
        throw ValidationError("modes: model is not fitted");
    if (start < 1 || start + n - 2 > m.cols())
        throw ValidationError("modes: window does not fit the matrix");

    Eigen::EigenSolver<Eigen::MatrixXd> es(model.companion_matrix());
    if (es.info() != Eigen::Success)
        throw NumericError("companion eigenvector computation did not converge");

    ModeSet ms;
    ms.n = n;
    ms.eigenvalues = es.eigenvalues();
    ms.warnings = model.warnings;

    const Eigen::MatrixXcd w = es.eigenvectors();
    {
        Eigen::JacobiSVD<Eigen::MatrixXcd> wsvd(w);
        const auto& ws = wsvd.singularValues();
        if (ws(ws.size() - 1) <= 0.0 || ws(0) / ws(ws.size() - 1) > 1e8)
            ms.warnings.push_back(
                "clustered or defective eigenvalues; modes and amplitudes are ill-conditioned");
    }

    const Eigen::MatrixXcd x = m.window({start, n - 1}).view().cast<std::complex<double>>();
    ms.modes = x * w;
    for (Eigen::Index j = 0; j < ms.modes.cols(); ++j) {
        const double nrm = ms.modes.col(j).norm();
        if (nrm > 0.0)
            ms.modes.col(j) /= nrm;
        else
            ms.warnings.push_back("mode " + std::to_string(j + 1) +
                                  " vanishes (eigenvector in the null space of the window)");
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> msvd(ms.modes, Eigen::ComputeThinU | Eigen::ComputeThinV);
    msvd.setThreshold(1e-12);
    ms.amplitudes = msvd.solve(Eigen::VectorXcd(m.snapshot(start).cast<std::complex<double>>()));
    return ms;
}

ModeSet modes(const SnapshotMatrix& m, const CompanionModel& model) {
    return modes_window(m, 1, model);
}

SnapshotMatrix stack_lagged(const SnapshotMatrix& m, Eigen::Index lags) {
    if (lags < 1) throw ValidationError("stack_lagged requires lags >= 1; use the matrix directly");
    if (lags + 2 > m.cols())
        throw ValidationError("stack_lagged with lags=" + std::to_string(lags) +
                              " leaves fewer than 2 columns of L=" + std::to_string(m.cols()));
    const Eigen::Index n = m.rows();
    const Eigen::Index cols = m.cols() - lags;
    Eigen::MatrixXd out((lags + 1) * n, cols);
    for (Eigen::Index t = 1; t <= cols; ++t)
        for (Eigen::Index j = 0; j <= lags; ++j)
            out.block((lags - j) * n, t - 1, n, 1) = m.snapshot(t + j);
    return SnapshotMatrix(std::move(out));
}

void write_eigenvalues_csv(const Eigen::VectorXcd& eigenvalues, std::ostream& out) {
    std::vector<std::complex<double>> sorted(eigenvalues.data(),
                                             eigenvalues.data() + eigenvalues.size());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        const double pa = std::arg(a), pb = std::arg(b);
        if (pa != pb) return pa < pb;
        return std::abs(a) < std::abs(b);
    });
    out << "re,im,modulus,phase\n";
    for (const auto& ev : sorted)
        out << format_double(ev.real()) << ',' << format_double(ev.imag()) << ','
            << format_double(std::abs(ev)) << ',' << format_double(std::arg(ev)) << '\n';
}

void write_coefficients_csv(const Eigen::VectorXd& coeffs, std::ostream& out) {
    out << "j,c_j\n";
    for (Eigen::Index j = 0; j < coeffs.size(); ++j)
        out << (j + 1) << ',' << format_double(coeffs(j)) << '\n';
}

void save_modes(const ModeSet& ms, const std::filesystem::path& path) {
    const Eigen::Index n_modes = ms.modes.cols();
    Eigen::MatrixXd interleaved(ms.modes.rows(), 2 * n_modes);
    for (Eigen::Index j = 0; j < n_modes; ++j) {
        interleaved.col(2 * j) = ms.modes.col(j).real();
        interleaved.col(2 * j + 1) = ms.modes.col(j).imag();
    }
    save_matrix(SnapshotMatrix(std::move(interleaved)), path, MatrixFormat::gdmd_binary);

    nlohmann::ordered_json j;
    j["n"] = ms.n;
    auto pairs = [](const Eigen::VectorXcd& v) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            arr.push_back({v(i).real(), v(i).imag()});
        return arr;
    };
    j["eigenvalues"] = pairs(ms.eigenvalues);
    j["amplitudes"] = pairs(ms.amplitudes);

    const std::filesystem::path sidecar = path.string() + ".json";
    std::ofstream out(sidecar);
    if (!out) throw IoError("cannot open for writing: " + sidecar.string());
    out << j.dump() << '\n';
    if (!out.flush()) throw IoError("write failure: " + sidecar.string());
}

ModeSet load_modes(const std::filesystem::path& path) {
    SnapshotMatrix interleaved = load_matrix(path, MatrixFormat::gdmd_binary);
    if (interleaved.cols() % 2 != 0)
        throw ParseError("modes file must have an even column count");

    const std::filesystem::path sidecar = path.string() + ".json";
    std::ifstream in(sidecar);
    if (!in) throw IoError("cannot open for reading: " + sidecar.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("modes sidecar " + sidecar.string() + ": " + e.what());
    }

    ModeSet ms;
    ms.n = j.at("n").get<Eigen::Index>();
    auto unpairs = [&](const char* key) {
        const auto& arr = j.at(key);
        Eigen::VectorXcd v(arr.size());
        for (size_t i = 0; i < arr.size(); ++i)
            v(static_cast<Eigen::Index>(i)) =
                std::complex<double>(arr[i][0].get<double>(), arr[i][1].get<double>());
        return v;
    };
    ms.eigenvalues = unpairs("eigenvalues");
    ms.amplitudes = unpairs("amplitudes");

    const Eigen::Index n_modes = interleaved.cols() / 2;
    if (ms.eigenvalues.size() != n_modes)
        throw ParseError("modes sidecar eigenvalue count does not match the matrix");
    ms.modes.resize(interleaved.rows(), n_modes);
    auto v = interleaved.view();
    for (Eigen::Index jcol = 0; jcol < n_modes; ++jcol)
        ms.modes.col(jcol) =
            v.col(2 * jcol) + std::complex<double>(0, 1) * v.col(2 * jcol + 1);
    return ms;
}

} // namespace gdmd
