#include "gdmd/subspace.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace gdmd {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Deterministic content order so gap(a,b) and gap(b,a) run the identical
// computation and agree bit-for-bit.
bool lex_less(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (a(i, j) < b(i, j)) return true;
            if (a(i, j) > b(i, j)) return false;
        }
    return false;
}

GapValue make_gap(double g, Eigen::Index d1, Eigen::Index d2) {
    GapValue v;
    v.gap = clamp01(g);
    v.angle = std::asin(v.gap);
    v.dim1 = d1;
    v.dim2 = d2;
    return v;
}

} // namespace

OrthonormalBasis orthonormalize(const Eigen::Ref<const Eigen::MatrixXd>& m, double rel_tol) {
    if (rel_tol <= 0.0 || rel_tol >= 1.0)
        throw ValidationError("rank tolerance must lie in (0,1)");
    if (!m.allFinite()) throw ValidationError("orthonormalize: non-finite entries");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double sigma_max = sigma.size() ? sigma(0) : 0.0;

    Eigen::Index r = 0;
    if (sigma_max > 0.0) {
        const double cut = rel_tol * sigma_max;
        while (r < sigma.size() && sigma(r) > cut) ++r;
    }
    OrthonormalBasis b;
    b.q = svd.matrixU().leftCols(r);
    b.rank_tolerance = rel_tol;
    return b;
}

OrthonormalBasis orthonormalize(const SnapshotMatrix& m, double rel_tol) {
    return orthonormalize(Eigen::Ref<const Eigen::MatrixXd>(m.view()), rel_tol);
}

GapValue gap(const OrthonormalBasis& b1, const OrthonormalBasis& b2) {
    if (b1.ambient_dim() != b2.ambient_dim())
        throw ValidationError("gap: ambient dimensions differ (" +
                              std::to_string(b1.ambient_dim()) + " vs " +
                              std::to_string(b2.ambient_dim()) + ")");
    const Eigen::Index r1 = b1.rank(), r2 = b2.rank();
    if (r1 != r2) {
        GapValue v = make_gap(1.0, r1, r2);
        return v;
    }
    if (r1 == 0) return make_gap(0.0, 0, 0);

    const bool swap = lex_less(b2.q, b1.q);
    const Eigen::MatrixXd& qa = swap ? b2.q : b1.q;
    const Eigen::MatrixXd& qb = swap ? b1.q : b2.q;

    // sigma_max(qb - qa (qa' qb)) == sqrt(1 - sigma_min(qa' qb)^2), but the
    // residual form keeps full accuracy when the subspaces nearly coincide.
    Eigen::MatrixXd residual = qb - qa * (qa.transpose() * qb);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(residual);
    const double g = svd.singularValues()(0);
    return make_gap(g, r1, r2);
}

GapValue gap_oracle(const OrthonormalBasis& b1, const OrthonormalBasis& b2) {
    if (b1.ambient_dim() != b2.ambient_dim())
        throw ValidationError("gap_oracle: ambient dimensions differ");
    const Eigen::Index n = b1.ambient_dim();
    if (n > 2000)
        throw ValidationError("gap_oracle: N = " + std::to_string(n) +
                              " exceeds the dense-projector guard (2000); use gap()");
    Eigen::MatrixXd diff = b1.q * b1.q.transpose() - b2.q * b2.q.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double g = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    return make_gap(g, b1.rank(), b2.rank());
}

SensitivityPair sensitivity_check(const Eigen::VectorXd& xi, const Eigen::VectorXd& d1,
                                  const Eigen::VectorXd& d2) {
    if (xi.size() != d1.size() || xi.size() != d2.size())
        throw ValidationError("sensitivity_check: vector lengths differ");
    const double xi_norm = xi.norm();
    if (xi_norm == 0.0) throw ValidationError("sensitivity_check: xi is zero");

    auto project_out = [&](const Eigen::VectorXd& d) {
        Eigen::VectorXd p = d - (xi.dot(d) / (xi_norm * xi_norm)) * xi;
        if (p.norm() <= 1e-14 * (d.norm() + xi_norm))
            throw ValidationError(
                "sensitivity_check: perturbation is numerically parallel to xi");
        return p;
    };
    const Eigen::VectorXd p1 = project_out(d1);
    const Eigen::VectorXd p2 = project_out(d2);

    const Eigen::Index n = xi.size();
    Eigen::MatrixXd s1(n, 2), s2(n, 2);
    s1.col(0) = xi + p1;
    s1.col(1) = xi;
    s2.col(0) = xi + p2;
    s2.col(1) = xi;

    SensitivityPair out;
    out.lhs = gap(orthonormalize(s1), orthonormalize(s2)).gap;
    out.rhs = gap(orthonormalize(p1), orthonormalize(p2)).gap;
    return out;
}

} // namespace gdmd
