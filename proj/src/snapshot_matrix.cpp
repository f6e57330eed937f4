#include "gdmd/snapshot_matrix.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace gdmd {

namespace {

void check_finite(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                if (!std::isfinite(m(i, j)))
                    throw ValidationError("non-finite entry at row " + std::to_string(i + 1) +
                                          ", column " + std::to_string(j + 1));
    }
}

void check_shape(Eigen::Index n, Eigen::Index l) {
    if (n < 1) throw ValidationError("matrix must have at least one row");
    if (l < 2) throw ValidationError("matrix must have at least two snapshot columns, got " +
                                     std::to_string(l));
}

uint64_t to_le(uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return __builtin_bswap64(v);
}

uint32_t to_le(uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return __builtin_bswap32(v);
}

void put_u32(std::string& buf, uint32_t v) {
    v = to_le(v);
    buf.append(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_u64(std::string& buf, uint64_t v) {
    v = to_le(v);
    buf.append(reinterpret_cast<const char*>(&v), sizeof v);
}

uint32_t get_u32(const char* p) {
    uint32_t v;
    std::memcpy(&v, p, sizeof v);
    return to_le(v);
}

uint64_t get_u64(const char* p) {
    uint64_t v;
    std::memcpy(&v, p, sizeof v);
    return to_le(v);
}

constexpr char kMagic[4] = {'G', 'D', 'M', 'D'};
constexpr uint32_t kVersion = 1;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure: " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("write failure: " + path.string());
}

Eigen::MatrixXd parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    size_t line_start = 0;
    long line_no = 0;
    while (line_start < text.size()) {
        size_t line_end = text.find('\n', line_start);
        if (line_end == std::string::npos) line_end = text.size();
        std::string_view line(text.data() + line_start, line_end - line_start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (!line.empty()) {
            std::vector<double> row;
            size_t field_start = 0;
            long col_no = 0;
            while (true) {
                size_t comma = line.find(',', field_start);
                std::string_view tok = line.substr(
                    field_start, comma == std::string_view::npos ? std::string_view::npos
                                                                 : comma - field_start);
                ++col_no;
                row.push_back(parse_double(tok, line_no, col_no));
                if (comma == std::string_view::npos) break;
                field_start = comma + 1;
            }
            if (!rows.empty() && row.size() != rows.front().size())
                throw ParseError("ragged row: expected " + std::to_string(rows.front().size()) +
                                     " fields, got " + std::to_string(row.size()),
                                 line_no, static_cast<long>(row.size()));
            rows.push_back(std::move(row));
        }
        line_start = line_end + 1;
    }
    if (rows.empty()) throw ParseError("empty CSV input", 1, 1);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return m;
}

std::string to_csv(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    std::string out;
    out.reserve(static_cast<size_t>(m.size()) * 8);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out.push_back(',');
            out += format_double(m(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

Eigen::MatrixXd parse_binary(const std::string& data, const std::filesystem::path& path) {
    constexpr size_t header = 4 + 4 + 8 + 8;
    if (data.size() < header) throw ParseError("truncated gdmd-binary header: " + path.string());
    if (std::memcmp(data.data(), kMagic, 4) != 0)
        throw ParseError("bad magic bytes (not a gdmd-binary file): " + path.string());
    uint32_t version = get_u32(data.data() + 4);
    if (version != kVersion)
        throw ParseError("unsupported gdmd-binary version " + std::to_string(version));
    uint64_t n = get_u64(data.data() + 8);
    uint64_t l = get_u64(data.data() + 16);
    if (n == 0 || l == 0 || n > (1ull << 32) || l > (1ull << 32))
        throw ParseError("implausible dimensions " + std::to_string(n) + "x" + std::to_string(l));
    uint64_t expected = header + n * l * sizeof(double);
    if (data.size() != expected)
        throw ParseError("gdmd-binary size mismatch: expected " + std::to_string(expected) +
                         " bytes, got " + std::to_string(data.size()));
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
    const char* p = data.data() + header;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i, p += 8)
            m(i, j) = std::bit_cast<double>(get_u64(p));
    return m;
}

std::string to_binary(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    std::string out;
    out.reserve(24 + static_cast<size_t>(m.size()) * 8);
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u64(out, static_cast<uint64_t>(m.rows()));
    put_u64(out, static_cast<uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            put_u64(out, std::bit_cast<uint64_t>(m(i, j)));
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, long row, long col) {
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t'))
        token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t'))
        token.remove_suffix(1);
    if (token.empty()) throw ParseError("empty field", row, col);
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw ParseError("malformed number '" + std::string(token) + "'", row, col);
    return v;
}

SnapshotMatrix::SnapshotMatrix(Eigen::MatrixXd data)
    : storage_(std::make_shared<const Eigen::MatrixXd>(std::move(data))),
      col_begin_(0),
      col_count_(storage_->cols()) {
    check_shape(storage_->rows(), storage_->cols());
    check_finite(*storage_);
}

Eigen::MatrixXd::ConstColXpr SnapshotMatrix::snapshot(Eigen::Index t) const {
    if (t < 1 || t > col_count_)
        throw ValidationError("snapshot index " + std::to_string(t) + " out of range [1," +
                              std::to_string(col_count_) + "]");
    return storage_->col(col_begin_ + t - 1);
}

SnapshotMatrix SnapshotMatrix::window(WindowSpec w) const {
    if (w.width < 1) throw ValidationError("window width must be >= 1");
    if (w.start < 1 || w.start + w.width - 1 > col_count_)
        throw ValidationError("window [" + std::to_string(w.start) + "," +
                              std::to_string(w.start + w.width - 1) + "] out of range [1," +
                              std::to_string(col_count_) + "]");
    return SnapshotMatrix(storage_, col_begin_ + w.start - 1, w.width);
}

SnapshotMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
    std::string data = read_file(path);
    Eigen::MatrixXd m =
        format == MatrixFormat::csv ? parse_csv(data) : parse_binary(data, path);
    return SnapshotMatrix(std::move(m));
}

void save_matrix(const SnapshotMatrix& m, const std::filesystem::path& path,
                 MatrixFormat format) {
    write_file(path, format == MatrixFormat::csv ? to_csv(m.view()) : to_binary(m.view()));
}

} // namespace gdmd
