#pragma once

#include <Eigen/Core>

#include "gdmd/snapshot_matrix.hpp"

namespace gdmd {

/// Default relative rank tolerance: singular values below
/// rel_tol * sigma_max are discarded.
inline constexpr double kDefaultRankTol = 1e-10;

/// Subspace of R^N represented by a matrix with orthonormal columns,
/// plus the rank tolerance used when it was built.
struct OrthonormalBasis {
    Eigen::MatrixXd q;           // N x r, orthonormal columns
    double rank_tolerance = kDefaultRankTol;

    Eigen::Index ambient_dim() const { return q.rows(); }
    Eigen::Index rank() const { return q.cols(); }
};

/// Gap d(X1,X2) between two subspaces together with the angular distance
/// theta = arcsin(d).  When the dimensions differ the gap is 1 by
/// definition; `dims` lets callers tell "genuinely far" from "rank
/// dropped".
struct GapValue {
    double gap = 0.0;      // in [0,1]
    double angle = 0.0;    // arcsin(gap), radians
    Eigen::Index dim1 = 0;
    Eigen::Index dim2 = 0;

    bool dims_equal() const { return dim1 == dim2; }
};

/// Orthonormal basis for the numerically significant left singular
/// directions of m.  A zero matrix yields an empty basis (r = 0).
OrthonormalBasis orthonormalize(const SnapshotMatrix& m, double rel_tol = kDefaultRankTol);

/// As above, for a raw matrix (no snapshot-count constraint).
OrthonormalBasis orthonormalize(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                double rel_tol = kDefaultRankTol);

/// Gap metric between the two subspaces.  Equal dimensions: the largest
/// principal-angle sine, sqrt(1 - sigma_min(q1' q2)^2), evaluated through
/// the residual factor q2 - q1 (q1' q2) so that gaps near zero come out at
/// machine precision rather than sqrt(eps).  Unequal dimensions: exactly 1.
/// Symmetric in its arguments bit-for-bit.
GapValue gap(const OrthonormalBasis& b1, const OrthonormalBasis& b2);

/// Independent verification path: forms the dense projectors q_i q_i' and
/// returns the operator norm of their difference.  Guarded to N <= 2000;
/// use gap() beyond that.
GapValue gap_oracle(const OrthonormalBasis& b1, const OrthonormalBasis& b2);

/// Result of the colinear-perturbation sensitivity identity: the gap
/// between span(xi+d1, xi) and span(xi+d2, xi) equals the gap between
/// span(d1) and span(d2) once the perturbations are projected onto xi's
/// orthogonal complement.
struct SensitivityPair {
    double lhs;  // gap of the perturbed 2-D spans
    double rhs;  // gap of the projected perturbation lines
};

/// Projects d1, d2 onto the orthogonal complement of xi, then evaluates
/// both sides of the identity.  Throws ValidationError when xi or a
/// projected perturbation is numerically zero.
SensitivityPair sensitivity_check(const Eigen::VectorXd& xi, const Eigen::VectorXd& d1,
                                  const Eigen::VectorXd& d2);

} // namespace gdmd
