#pragma once

#include <Eigen/Core>

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "gdmd/snapshot_matrix.hpp"

namespace gdmd {

/// Companion-form fit x_n ~ X_{1:n-1} c.  The companion matrix has ones on
/// the subdiagonal and c as its last column, so the eigenvalues are the
/// roots of lambda^{n-1} - c_{n-1} lambda^{n-2} - ... - c_1.
struct CompanionModel {
    Eigen::Index n = 0;                         // window parameter; n-1 columns used
    Eigen::VectorXd coeffs;                     // c, length n-1
    Eigen::VectorXcd eigenvalues;               // spectrum of the companion matrix
    double residual = 0.0;                      // ||x_n - X_{1:n-1} c||
    double residual_rel = 0.0;                  // residual / ||x_n||
    double condition = 0.0;                     // sigma_max/sigma_min of X_{1:n-1}; +inf when rank-deficient
    bool rank_degenerate = false;
    std::vector<std::string> warnings;

    Eigen::MatrixXd companion_matrix() const;
};

/// Spatial modes X_{1:n-1} w_i (unit norm) for the companion eigenvectors
/// w_i, with amplitudes fitted to x_1 by least squares.
struct ModeSet {
    Eigen::MatrixXcd modes;        // N x (n-1)
    Eigen::VectorXcd amplitudes;
    Eigen::VectorXcd eigenvalues;  // copied from the model, same column order
    Eigen::Index n = 0;
    std::vector<std::string> warnings;
};

/// Least-squares companion fit on columns 1..n (SVD pseudoinverse,
/// relative truncation 1e-10; minimum-norm under rank deficiency).
CompanionModel fit(const SnapshotMatrix& m, Eigen::Index n, double rel_tol = 1e-10);

/// fit() applied to columns start..start+n-1.
CompanionModel fit_window(const SnapshotMatrix& m, Eigen::Index start, Eigen::Index n,
                          double rel_tol = 1e-10);

/// Modes for a model fitted from m with fit(); pass the same window the
/// model was fitted on.
ModeSet modes(const SnapshotMatrix& m, const CompanionModel& model);
ModeSet modes_window(const SnapshotMatrix& m, Eigen::Index start, const CompanionModel& model);

/// Lagged-state stacking: column t of the result is [x_{t+lags}; ...; x_t],
/// size (lags+1)*N x (L-lags).
SnapshotMatrix stack_lagged(const SnapshotMatrix& m, Eigen::Index lags);

/// CSV with header "re,im,modulus,phase", one row per eigenvalue.
void write_eigenvalues_csv(const Eigen::VectorXcd& eigenvalues, std::ostream& out);

/// CSV with header "j,c_j".
void write_coefficients_csv(const Eigen::VectorXd& coeffs, std::ostream& out);

/// Modes as a gdmd-binary matrix with interleaved Re/Im columns, plus a
/// one-line JSON sidecar {n, eigenvalues, amplitudes} at path + ".json".
void save_modes(const ModeSet& ms, const std::filesystem::path& path);
ModeSet load_modes(const std::filesystem::path& path);

} // namespace gdmd
