#ifndef SKSC_IO_HPP
#define SKSC_IO_HPP

#include "sksc/data.hpp"

#include <filesystem>
#include <string_view>

namespace sksc {

enum class MatrixFormat {
    Csv,          // one datum per row, comma separated, optional trailing integer label
    MatrixMarket, // %%MatrixMarket matrix array real general, column-major
    RawBinary,    // "SKSC" | u64 D | u64 N | D*N little-endian f64, column-major
};

MatrixFormat parse_matrix_format(std::string_view name);
std::string_view to_string(MatrixFormat f);

/// Picks the format from the file extension (.csv, .mtx, .bin).
MatrixFormat format_from_extension(const std::filesystem::path& path);

struct CsvOptions {
    bool has_labels = false; // last column holds integer cluster ids
};

/// Parse failures are DataErrors carrying "line L, column C" of the offending token.
DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                       const CsvOptions& csv = {});

/// Text formats write 17 significant digits, so doubles round-trip exactly.
/// Labels are only written for CSV when present and csv.has_labels is set.
void save_matrix(const DataMatrix& X, const std::filesystem::path& path, MatrixFormat format,
                 const CsvOptions& csv = {});

} // namespace sksc

#endif
