#pragma once

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gdmd/rng.hpp"
#include "gdmd/snapshot_matrix.hpp"
#include "gdmd/subspace.hpp"

namespace gdmd::test {

inline SnapshotMatrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.begin()->size());
    Eigen::MatrixXd m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return SnapshotMatrix(std::move(m));
}

/// Random r-dimensional subspace of R^n as an orthonormal basis.
inline OrthonormalBasis random_basis(PortableRng& rng, Eigen::Index n, Eigen::Index r) {
    return orthonormalize(Eigen::Ref<const Eigen::MatrixXd>(rng.normal_matrix(n, r)));
}

/// Exactly p-periodic matrix with independent period columns: random
/// rank-p block repeated cyclically.
inline SnapshotMatrix periodic_matrix(PortableRng& rng, Eigen::Index n, Eigen::Index l,
                                      Eigen::Index p) {
    Eigen::MatrixXd block = rng.normal_matrix(n, p);
    Eigen::MatrixXd m(n, l);
    for (Eigen::Index t = 0; t < l; ++t) m.col(t) = block.col(t % p);
    return SnapshotMatrix(std::move(m));
}

/// Durand-Kerner root finder for monic polynomials; independent of any
/// eigenvalue machinery.  coeffs are c in lambda^p - c_p lambda^{p-1} -
/// ... - c_1, i.e. the companion last column.
inline std::vector<std::complex<double>> polynomial_roots(const Eigen::VectorXd& coeffs) {
    using C = std::complex<double>;
    const Eigen::Index p = coeffs.size();
    // monic polynomial a_0..a_p with a_p = 1: a_j = -c_{j+1} for j < p
    std::vector<C> a(static_cast<size_t>(p) + 1);
    a[static_cast<size_t>(p)] = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) a[static_cast<size_t>(j)] = -coeffs(j);

    auto eval = [&](C z) {
        C acc = a[static_cast<size_t>(p)];
        for (Eigen::Index j = p - 1; j >= 0; --j) acc = acc * z + a[static_cast<size_t>(j)];
        return acc;
    };

    std::vector<C> roots(static_cast<size_t>(p));
    const C seed(0.4, 0.9);  // standard non-real starting ratio
    C cur(1.0, 0.0);
    for (auto& r : roots) {
        cur *= seed;
        r = cur;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (size_t i = 0; i < roots.size(); ++i) {
            C denom(1.0, 0.0);
            for (size_t j = 0; j < roots.size(); ++j)
                if (j != i) denom *= roots[i] - roots[j];
            const C delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-14) break;
    }
    return roots;
}

/// Operator norm via dense SVD; oracle-side helper.
inline double operator_norm(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Minimal XML well-formedness check: declaration, balanced tags, no
/// stray '<'.  Enough to keep the SVG output honest.
inline bool xml_well_formed(const std::string& text) {
    size_t pos = text.find("<?xml");
    if (pos != 0) return false;
    pos = text.find("?>");
    if (pos == std::string::npos) return false;
    pos += 2;
    std::vector<std::string> stack;
    while (pos < text.size()) {
        const size_t open = text.find('<', pos);
        if (open == std::string::npos) break;
        const size_t close = text.find('>', open);
        if (close == std::string::npos) return false;
        std::string tag = text.substr(open + 1, close - open - 1);
        if (tag.empty()) return false;
        if (tag.front() == '/') {
            if (stack.empty()) return false;
            if (stack.back() != tag.substr(1)) return false;
            stack.pop_back();
        } else if (tag.back() != '/') {
            const size_t sp = tag.find_first_of(" \t\n");
            stack.push_back(sp == std::string::npos ? tag : tag.substr(0, sp));
        }
        pos = close + 1;
    }
    return stack.empty();
}

class TempDir {
public:
    explicit TempDir(const std::string& name) {
        path_ = std::filesystem::temp_directory_path() / ("gdmd-test-" + name);
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace gdmd::test
