#pragma once

#include <iosfwd>
#include <vector>

#include "gdmd/snapshot_matrix.hpp"
#include "gdmd/subspace.hpp"

namespace gdmd {

enum class IpMethod { recursive, svd };

/// A deflated snapshot with norm below this fraction of the original is
/// treated as lying inside the current span (rank degeneracy).
inline constexpr double kDeflationCollapseTol = 1e-12;

/// Innovation parameters r_k = d(range(X_{l:l+k-1}), range(X_{l+1:l+k}))
/// for a fixed starting index l and k = 1..k_max.  Entries where a rank
/// drop was detected are flagged; their values come from the SVD path
/// regardless of the requested method.
struct InnovationProfile {
    Eigen::Index start = 1;
    std::vector<double> values;       // r_k, values[k-1] in [0,1]
    std::vector<double> angles;       // theta_k = arcsin(r_k)
    std::vector<bool> degenerate;     // rank-drop flag per k
    IpMethod method = IpMethod::svd;

    Eigen::Index k_max() const { return static_cast<Eigen::Index>(values.size()); }
};

/// r_{l,k} over starting index l (rows) and window size k (columns).
/// Entries with l+k+1 > L do not exist; they are kept absent rather than
/// encoded as 0 or 1, both of which are meaningful gap values.
struct GapSpectrogram {
    struct Entry {
        double value = 0.0;
        bool present = false;
        bool degenerate = false;
    };

    Eigen::Index l_max = 0;
    Eigen::Index k_max = 0;
    IpMethod method = IpMethod::recursive;
    std::vector<std::vector<Entry>> entries;  // entries[l-1][k-1]

    const Entry& at(Eigen::Index l, Eigen::Index k) const {
        return entries[static_cast<size_t>(l - 1)][static_cast<size_t>(k - 1)];
    }
};

/// Gram matrix K(i,j) = <x_i, x_j> with a measure of how far it is from
/// Toeplitz structure (max over diagonals of (max-min)/(|mean|+eps)).
struct GramKernel {
    Eigen::MatrixXd k;
    double toeplitz_deviation = 0.0;
};

/// Reference path: per-k econ SVDs of both windows, then the subspace gap.
InnovationProfile ip_profile_svd(const SnapshotMatrix& m, Eigen::Index start,
                                 Eigen::Index k_max, double rel_tol = kDefaultRankTol);

/// Incremental path: maintains an orthonormal basis U of the shared middle
/// window and deflated-and-normalized images of the two end snapshots;
/// r = sin(acos(<u_first, u_last>)).  Gram-Schmidt deflation is applied
/// twice per step to hold orthogonality near co-linear data.  Agrees with
/// the SVD path within 1e-6 away from rank degeneracy; degenerate entries
/// fall back to the SVD path and are flagged.
InnovationProfile ip_profile_recursive(const SnapshotMatrix& m, Eigen::Index start,
                                       Eigen::Index k_max, double rel_tol = kDefaultRankTol);

InnovationProfile ip_profile(const SnapshotMatrix& m, Eigen::Index start, Eigen::Index k_max,
                             IpMethod method, double rel_tol = kDefaultRankTol);

/// All r_{l,k} for l = 1..l_max, k = 1..k_max.  Rows are independent and
/// are evaluated concurrently; results are identical to sequential
/// evaluation.
GapSpectrogram spectrogram(const SnapshotMatrix& m, Eigen::Index l_max, Eigen::Index k_max,
                           IpMethod method = IpMethod::recursive,
                           double rel_tol = kDefaultRankTol);

GramKernel gram_kernel(const SnapshotMatrix& m);

/// CSV with header "k,r,theta,method,flag", one row per k.
void write_profile_csv(const InnovationProfile& p, std::ostream& out);

/// CSV with a header row of k values, then one line per l; absent entries
/// are empty cells.
void write_spectrogram_csv(const GapSpectrogram& sg, std::ostream& out);

/// Inverse of write_spectrogram_csv (degeneracy flags are not round-tripped).
GapSpectrogram read_spectrogram_csv(std::istream& in);

} // namespace gdmd
