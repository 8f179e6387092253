#include "ccaprobe/feature_file.hpp"

#include "ccaprobe/error.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ccaprobe::io {
namespace {

constexpr std::uint8_t kDtypeF64 = 1;

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    bool done() const { return pos_ == bytes_.size(); }

    std::string_view take(std::size_t n) {
        if (bytes_.size() - pos_ < n) throw DataError("feature file: truncated record");
        const std::string_view out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint64_t u64() { return little_endian(take(8)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(take(4))); }
    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

private:
    static std::uint64_t little_endian(std::string_view b) {
        std::uint64_t v = 0;
        for (std::size_t i = b.size(); i-- > 0;) v = (v << 8) | static_cast<std::uint8_t>(b[i]);
        return v;
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

const FeatureRecord& find(const std::vector<FeatureRecord>& records, std::string_view name) {
    for (const FeatureRecord& r : records)
        if (r.name == name) return r;
    throw DataError("basis file: missing record '" + std::string(name) + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

Vector row_vector(const Matrix& m) {
    if (m.rows() != 1) throw DataError("basis file: expected a single-row record");
    return m.row(0).transpose();
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("cannot parse number '" + std::string(text) + "'");
    return v;
}

std::string encode(std::span<const FeatureRecord> records) {
    std::string out;
    for (const FeatureRecord& r : records) {
        if (r.labels && static_cast<Index>(r.labels->size()) != r.values.rows())
            throw DataError("feature file: label count does not match row count");
        out.append(kMagic);
        out.push_back(static_cast<char>(kDtypeF64));
        out.push_back(static_cast<char>(r.labels ? 1 : 0));
        put_u64(out, static_cast<std::uint64_t>(r.values.rows()));
        put_u64(out, static_cast<std::uint64_t>(r.values.cols()));
        put_u64(out, r.seed);
        put_u32(out, static_cast<std::uint32_t>(r.name.size()));
        out.append(r.name);
        for (Index i = 0; i < r.values.rows(); ++i)
            for (Index j = 0; j < r.values.cols(); ++j) put_u64(out, std::bit_cast<std::uint64_t>(r.values(i, j)));
        if (r.labels)
            for (int y : *r.labels) put_u32(out, static_cast<std::uint32_t>(y));
    }
    return out;
}

std::vector<FeatureRecord> decode(std::string_view bytes) {
    if (bytes.empty()) throw DataError("feature file: empty");
    Reader in(bytes);
    std::vector<FeatureRecord> records;
    while (!in.done()) {
        if (in.take(kMagic.size()) != kMagic)
            throw DataError("feature file: bad magic (expected CCAPROBE1)");
        if (in.u8() != kDtypeF64) throw DataError("feature file: unsupported dtype");
        const std::uint8_t has_labels = in.u8();
        if (has_labels > 1) throw DataError("feature file: corrupt label flag");
        const std::uint64_t rows = in.u64(), cols = in.u64();
        FeatureRecord r;
        r.seed = in.u64();
        r.name = std::string(in.take(in.u32()));
        if (rows == 0 || cols == 0) throw DataError("feature file: empty record");
        // Guard the allocation against absurd headers before reading the payload.
        if (rows > (bytes.size() / 8) / cols) throw DataError("feature file: truncated record");
        r.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
        const std::string_view payload = in.take(rows * cols * 8);
        for (std::size_t i = 0; i < rows * cols; ++i) {
            std::uint64_t v = 0;
            for (std::size_t b = 8; b-- > 0;) v = (v << 8) | static_cast<std::uint8_t>(payload[i * 8 + b]);
            r.values.data()[i] = std::bit_cast<double>(v);
        }
        if (has_labels) {
            std::vector<int> labels(rows);
            for (int& y : labels) y = static_cast<int>(in.u32());
            r.labels = std::move(labels);
        }
        records.push_back(std::move(r));
    }
    return records;
}

void write_records(const std::filesystem::path& path, std::span<const FeatureRecord> records) {
    write_file(path, encode(records));
}

std::vector<FeatureRecord> read_records(const std::filesystem::path& path) {
    try {
        return decode(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

FeatureRecord load_record(const std::filesystem::path& path) {
    std::vector<FeatureRecord> records = read_records(path);
    if (records.size() != 1) throw DataError(path.string() + ": expected exactly one record");
    return std::move(records.front());
}

void save_features(const std::filesystem::path& path, const LabeledFeatures& data, const std::string& name,
                   std::uint64_t seed) {
    const FeatureRecord r{name, seed, data.features, data.labels};
    write_records(path, std::span(&r, 1));
}

void save_matrix(const std::filesystem::path& path, const Matrix& values, const std::string& name,
                 std::uint64_t seed) {
    const FeatureRecord r{name, seed, values, std::nullopt};
    write_records(path, std::span(&r, 1));
}

LabeledFeatures load_features(const std::filesystem::path& path) {
    FeatureRecord r = read_any(path);
    return {std::move(r.values), r.labels.value_or(std::vector<int>{})};
}

std::string to_csv(const FeatureRecord& record) {
    std::string out;
    for (Index j = 0; j < record.values.cols(); ++j) {
        if (j) out.push_back(',');
        out += "f" + std::to_string(j);
    }
    if (record.labels) out += ",label";
    out.push_back('\n');
    for (Index i = 0; i < record.values.rows(); ++i) {
        for (Index j = 0; j < record.values.cols(); ++j) {
            if (j) out.push_back(',');
            out += format_double(record.values(i, j));
        }
        if (record.labels) out += "," + std::to_string((*record.labels)[static_cast<std::size_t>(i)]);
        out.push_back('\n');
    }
    return out;
}

FeatureRecord from_csv(std::string_view text) {
    std::vector<std::string_view> lines = split(text, '\n');
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw DataError("csv: missing header");
    std::vector<std::string_view> header = split(lines.front(), ',');
    for (auto& h : header)
        if (!h.empty() && h.back() == '\r') h.remove_suffix(1);
    const bool labeled = header.back() == "label";
    const auto cols = static_cast<Index>(header.size()) - (labeled ? 1 : 0);
    if (cols < 1) throw DataError("csv: no feature columns");

    FeatureRecord r;
    r.values.resize(static_cast<Index>(lines.size()) - 1, cols);
    if (labeled) r.labels.emplace();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string_view> fields = split(lines[i], ',');
        if (fields.size() != header.size())
            throw DataError("csv: line " + std::to_string(i + 1) + " has the wrong field count");
        for (Index j = 0; j < cols; ++j)
            r.values(static_cast<Index>(i) - 1, j) = parse_double(fields[static_cast<std::size_t>(j)]);
        if (labeled) {
            const double y = parse_double(fields.back());
            if (y != static_cast<int>(y)) throw DataError("csv: non-integer label");
            r.labels->push_back(static_cast<int>(y));
        }
    }
    return r;
}

void write_csv(const std::filesystem::path& path, const FeatureRecord& record) { write_file(path, to_csv(record)); }

FeatureRecord read_csv(const std::filesystem::path& path) {
    try {
        return from_csv(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

FeatureRecord read_any(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? read_csv(path) : load_record(path);
}

FeatureRecord head_record(const LinearHead& head, const std::string& name) {
    validate(head);
    FeatureRecord r;
    r.name = name;
    r.values.resize(head.classes(), head.features() + 1);
    r.values.leftCols(head.features()) = head.weights;
    r.values.col(head.features()) = head.bias;
    return r;
}

LinearHead head_from_record(const FeatureRecord& record) {
    if (record.values.cols() < 2) throw DataError("head record: needs weights and a bias column");
    const Index n = record.values.cols() - 1;
    LinearHead head{record.values.leftCols(n), record.values.col(n)};
    validate(head);
    return head;
}

void save_head(const std::filesystem::path& path, const LinearHead& head, const std::string& name) {
    const FeatureRecord r = head_record(head, name);
    write_records(path, std::span(&r, 1));
}

LinearHead load_head(const std::filesystem::path& path) { return head_from_record(read_any(path)); }

void save_model(const std::filesystem::path& path, const MlpModel& model, std::uint64_t seed) {
    validate(model);
    std::vector<FeatureRecord> records;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        FeatureRecord r;
        r.name = "layer" + std::to_string(l);
        r.seed = seed;
        const DenseLayer& layer = model.layers[l];
        r.values.resize(layer.weights.rows(), layer.weights.cols() + 1);
        r.values.leftCols(layer.weights.cols()) = layer.weights;
        r.values.col(layer.weights.cols()) = layer.bias;
        records.push_back(std::move(r));
    }
    write_records(path, records);
}

MlpModel load_model(const std::filesystem::path& path) {
    MlpModel model;
    for (const FeatureRecord& r : read_records(path)) {
        if (r.values.cols() < 2) throw DataError(path.string() + ": layer record too narrow");
        const Index n = r.values.cols() - 1;
        model.layers.push_back({r.values.leftCols(n), r.values.col(n)});
    }
    validate(model);
    return model;
}

void save_basis(const std::filesystem::path& path, const CcaBasis& basis) {
    std::vector<FeatureRecord> records;
    auto add = [&](std::string name, Matrix m) { records.push_back({std::move(name), 0, std::move(m), std::nullopt}); };
    auto add_pca = [&](const std::string& prefix, const PcaModel& p) {
        add(prefix + ".mean", p.mean.transpose());
        add(prefix + ".components", p.components);
        add(prefix + ".explained_variance", p.explained_variance.transpose());
        Matrix meta(1, 2);
        meta << p.variance_kept, p.total_variance;
        add(prefix + ".meta", meta);
    };
    add_pca("pca1", basis.pca1);
    add_pca("pca2", basis.pca2);
    add("b1", basis.b1);
    add("b2", basis.b2);
    add("rho", basis.rho.transpose());
    write_records(path, records);
}

CcaBasis load_basis(const std::filesystem::path& path) {
    const std::vector<FeatureRecord> records = read_records(path);
    auto load_pca = [&](const std::string& prefix) {
        PcaModel p;
        p.mean = row_vector(find(records, prefix + ".mean").values);
        p.components = find(records, prefix + ".components").values;
        p.explained_variance = row_vector(find(records, prefix + ".explained_variance").values);
        const Vector meta = row_vector(find(records, prefix + ".meta").values);
        if (meta.size() != 2) throw DataError("basis file: bad PCA metadata");
        p.variance_kept = meta[0];
        p.total_variance = meta[1];
        if (p.mean.size() != p.components.rows() || p.explained_variance.size() != p.components.cols())
            throw DataError("basis file: inconsistent PCA shapes");
        return p;
    };
    CcaBasis basis;
    basis.pca1 = load_pca("pca1");
    basis.pca2 = load_pca("pca2");
    basis.b1 = find(records, "b1").values;
    basis.b2 = find(records, "b2").values;
    basis.rho = row_vector(find(records, "rho").values);
    if (basis.b1.rows() != basis.pca1.rank() || basis.b2.rows() != basis.pca2.rank() ||
        basis.b1.cols() != basis.rho.size() || basis.b2.cols() != basis.rho.size())
        throw DataError("basis file: inconsistent basis shapes");
    return basis;
}

}  // namespace ccaprobe::io
