#include "sksc/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sksc {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line, std::size_t col,
                             const std::string& what)
{
    throw DataError(path.string() + ": line " + std::to_string(line) + ", column "
                    + std::to_string(col) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view token, T& out)
{
    token = trim(token);
    if (!token.empty() && token.front() == '+')
        token.remove_prefix(1);
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end && !token.empty();
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(path, mode);
    if (!in)
        throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode);
    if (!out)
        throw DataError("cannot write " + path.string());
    return out;
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& opts)
{
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t fields_expected = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos)
                break;
            rest.remove_prefix(comma + 1);
        }
        if (fields_expected == 0)
            fields_expected = fields.size();
        else if (fields.size() != fields_expected)
            parse_fail(path, lineno, std::min(fields.size(), fields_expected) + 1,
                       "ragged row: expected " + std::to_string(fields_expected) + " fields, found "
                           + std::to_string(fields.size()));
        const std::size_t nvalues = opts.has_labels ? fields.size() - 1 : fields.size();
        if (nvalues == 0)
            parse_fail(path, lineno, 1, "row has no data values");
        std::vector<double> row(nvalues);
        for (std::size_t c = 0; c < nvalues; ++c)
            if (!parse_number(fields[c], row[c]))
                parse_fail(path, lineno, c + 1,
                           "not a number: '" + std::string(trim(fields[c])) + "'");
        if (opts.has_labels) {
            int label = 0;
            if (!parse_number(fields.back(), label) || label < 0)
                parse_fail(path, lineno, fields.size(),
                           "invalid label: '" + std::string(trim(fields.back())) + "'");
            labels.push_back(label);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw DataError(path.string() + ": no data rows");

    DataMatrix X;
    const auto D = static_cast<Index>(rows.front().size());
    const auto N = static_cast<Index>(rows.size());
    X.values.resize(D, N);
    for (Index j = 0; j < N; ++j)
        for (Index i = 0; i < D; ++i)
            X.values(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    if (opts.has_labels)
        X.labels = std::move(labels);
    return X;
}

void save_csv(const DataMatrix& X, const std::filesystem::path& path, const CsvOptions& opts)
{
    auto out = open_out(path);
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    const bool write_labels = opts.has_labels && X.labels.has_value();
    for (Index j = 0; j < X.values.cols(); ++j) {
        for (Index i = 0; i < X.values.rows(); ++i) {
            if (i > 0)
                out << ',';
            out << X.values(i, j);
        }
        if (write_labels)
            out << ',' << (*X.labels)[static_cast<std::size_t>(j)];
        out << '\n';
    }
}

DataMatrix load_mtx(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line))
        throw DataError(path.string() + ": empty file");
    {
        std::istringstream header(lower(line));
        std::string banner, object, layout, field, symmetry;
        header >> banner >> object >> layout >> field >> symmetry;
        if (banner != "%%matrixmarket" || object != "matrix")
            parse_fail(path, 1, 1, "missing %%MatrixMarket matrix banner");
        if (layout != "array" || field != "real" || symmetry != "general")
            parse_fail(path, 1, 1, "only dense 'array real general' matrices are supported");
    }

    Index D = -1, N = -1;
    Eigen::MatrixXd values;
    Index filled = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '%')
            continue;
        if (D < 0) {
            std::istringstream dims{std::string(t)};
            if (!(dims >> D >> N) || D < 1 || N < 1)
                parse_fail(path, lineno, 1, "invalid size line");
            values.resize(D, N);
            continue;
        }
        double v = 0;
        if (!parse_number(t, v))
            parse_fail(path, lineno, 1, "not a number: '" + std::string(t) + "'");
        if (filled >= D * N)
            parse_fail(path, lineno, 1,
                       "more entries than the declared " + std::to_string(D) + "x"
                           + std::to_string(N));
        values(filled % D, filled / D) = v;
        ++filled;
    }
    if (D < 0)
        throw DataError(path.string() + ": missing size line");
    if (filled != D * N)
        throw DataError(path.string() + ": dimension header declares " + std::to_string(D * N)
                        + " entries but file has " + std::to_string(filled));
    DataMatrix X;
    X.values = std::move(values);
    return X;
}

void save_mtx(const DataMatrix& X, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "%%MatrixMarket matrix array real general\n";
    out << X.values.rows() << ' ' << X.values.cols() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Index j = 0; j < X.values.cols(); ++j)
        for (Index i = 0; i < X.values.rows(); ++i)
            out << X.values(i, j) << '\n';
}

constexpr std::array<char, 4> kMagic{'S', 'K', 'S', 'C'};

template <typename T>
void put_le(std::ostream& out, T value)
{
    static_assert(sizeof(T) == 8);
    const auto bits = std::bit_cast<std::uint64_t>(value);
    std::array<char, 8> bytes{};
    for (std::size_t b = 0; b < 8; ++b)
        bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    out.write(bytes.data(), 8);
}

template <typename T>
bool get_le(std::istream& in, T& value)
{
    static_assert(sizeof(T) == 8);
    std::array<unsigned char, 8> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), 8))
        return false;
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    value = std::bit_cast<T>(bits);
    return true;
}

DataMatrix load_raw(const std::filesystem::path& path)
{
    auto in = open_in(path, std::ios::binary);
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || magic != kMagic)
        throw DataError(path.string() + ": bad magic, expected SKSC");
    std::uint64_t D = 0, N = 0;
    if (!get_le(in, D) || !get_le(in, N))
        throw DataError(path.string() + ": truncated header");
    const auto expected = 20 + 8 * D * N;
    const auto actual = std::filesystem::file_size(path);
    if (D == 0 || N == 0 || actual != expected)
        throw DataError(path.string() + ": dimension header " + std::to_string(D) + "x"
                        + std::to_string(N) + " does not match file size "
                        + std::to_string(actual));
    DataMatrix X;
    X.values.resize(static_cast<Index>(D), static_cast<Index>(N));
    for (Index k = 0; k < X.values.size(); ++k)
        get_le(in, X.values.data()[k]);
    return X;
}

void save_raw(const DataMatrix& X, const std::filesystem::path& path)
{
    auto out = open_out(path, std::ios::binary);
    out.write(kMagic.data(), 4);
    put_le(out, static_cast<std::uint64_t>(X.values.rows()));
    put_le(out, static_cast<std::uint64_t>(X.values.cols()));
    for (Index k = 0; k < X.values.size(); ++k)
        put_le(out, X.values.data()[k]);
}

} // namespace

MatrixFormat parse_matrix_format(std::string_view name)
{
    const auto n = lower(name);
    if (n == "csv")
        return MatrixFormat::Csv;
    if (n == "mtx" || n == "matrix-market" || n == "matrixmarket")
        return MatrixFormat::MatrixMarket;
    if (n == "bin" || n == "raw" || n == "raw-binary")
        return MatrixFormat::RawBinary;
    throw ConfigError("unknown matrix format '" + std::string(name) + "'");
}

std::string_view to_string(MatrixFormat f)
{
    switch (f) {
    case MatrixFormat::Csv:
        return "csv";
    case MatrixFormat::MatrixMarket:
        return "matrix-market";
    case MatrixFormat::RawBinary:
        return "raw-binary";
    }
    return "?";
}

MatrixFormat format_from_extension(const std::filesystem::path& path)
{
    const auto ext = lower(path.extension().string());
    if (ext == ".csv")
        return MatrixFormat::Csv;
    if (ext == ".mtx")
        return MatrixFormat::MatrixMarket;
    if (ext == ".bin")
        return MatrixFormat::RawBinary;
    throw ConfigError("cannot infer matrix format from '" + path.string() + "'");
}

DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                       const CsvOptions& csv)
{
    DataMatrix X;
    switch (format) {
    case MatrixFormat::Csv:
        X = load_csv(path, csv);
        break;
    case MatrixFormat::MatrixMarket:
        X = load_mtx(path);
        break;
    case MatrixFormat::RawBinary:
        X = load_raw(path);
        break;
    }
    X.validate();
    return X;
}

void save_matrix(const DataMatrix& X, const std::filesystem::path& path, MatrixFormat format,
                 const CsvOptions& csv)
{
    switch (format) {
    case MatrixFormat::Csv:
        save_csv(X, path, csv);
        break;
    case MatrixFormat::MatrixMarket:
        save_mtx(X, path);
        break;
    case MatrixFormat::RawBinary:
        save_raw(X, path);
        break;
    }
}

} // namespace sksc
