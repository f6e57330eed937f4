#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <memory>

#include "gdmd/errors.hpp"

namespace gdmd {

/// On-disk matrix formats.  `gdmd_binary` is the byte-deterministic format
/// (magic "GDMD", version u32=1, N u64, L u64, float64 column-major, all
/// little-endian); `csv` is one matrix row per line, no header, shortest
/// round-trip decimals.
enum class MatrixFormat { csv, gdmd_binary };

/// A window of columns [start, start+width-1], 1-based like all snapshot
/// indices in this library.
struct WindowSpec {
    Eigen::Index start = 1;
    Eigen::Index width = 1;
};

/// N x L matrix of column snapshots x_t, t in {1,...,L}.  Immutable after
/// construction; window() returns views that share storage with the parent,
/// so concurrent reads are safe and column values are bitwise those of the
/// parent.
class SnapshotMatrix {
public:
    /// Takes ownership of `data`.  Requires N >= 1, L >= 2, finite entries.
    explicit SnapshotMatrix(Eigen::MatrixXd data);

    Eigen::Index rows() const { return storage_->rows(); }
    Eigen::Index cols() const { return col_count_; }

    /// Snapshot x_t, 1-based t.
    Eigen::MatrixXd::ConstColXpr snapshot(Eigen::Index t) const;

    /// The whole (windowed) matrix as an Eigen expression.
    Eigen::Block<const Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true> view() const {
        return storage_->middleCols(col_begin_, col_count_);
    }

    /// Zero-copy view of columns [w.start, w.start+w.width-1].
    SnapshotMatrix window(WindowSpec w) const;

private:
    SnapshotMatrix(std::shared_ptr<const Eigen::MatrixXd> storage,
                   Eigen::Index begin, Eigen::Index count)
        : storage_(std::move(storage)), col_begin_(begin), col_count_(count) {}

    std::shared_ptr<const Eigen::MatrixXd> storage_;
    Eigen::Index col_begin_;  // 0-based offset into storage
    Eigen::Index col_count_;
};

SnapshotMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
void save_matrix(const SnapshotMatrix& m, const std::filesystem::path& path,
                 MatrixFormat format);

inline SnapshotMatrix window(const SnapshotMatrix& m, WindowSpec w) {
    return m.window(w);
}

/// Shortest decimal representation that round-trips through float64.
std::string format_double(double v);

/// Strict float64 parse of a whole token ("nan"/"inf" parse but fail the
/// finiteness checks downstream).  Throws ParseError on trailing garbage.
double parse_double(std::string_view token, long row, long col);

} // namespace gdmd
