#pragma once

// On-disk carrier for feature matrices, heads, models and CCA bases.
//
// A file is a sequence of records. Each record is, all integers little-endian:
//
//   offset  size  field
//   0       9     magic "CCAPROBE1"
//   9       1     dtype (1 = f64)
//   10      1     has_labels (0 or 1)
//   11      8     rows (u64)
//   19      8     cols (u64)
//   27      8     seed provenance (u64)
//   35      4     name length L (u32)
//   39      L     name (UTF-8, e.g. the sensor name)
//   39+L    8*rows*cols   payload, f64 row-major
//   ...     4*rows        labels (i32), only when has_labels = 1
//
// The CSV form is a header line "f0,f1,...[,label]" followed by one line per
// row; values use the shortest representation that round-trips exactly.

#include "ccaprobe/cca.hpp"
#include "ccaprobe/heads.hpp"
#include "ccaprobe/nets.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ccaprobe::io {

inline constexpr std::string_view kMagic = "CCAPROBE1";

struct FeatureRecord {
    std::string name;
    std::uint64_t seed = 0;
    Matrix values;
    std::optional<std::vector<int>> labels;
};

std::string encode(std::span<const FeatureRecord> records);
// Throws DataError on a bad magic, truncation or trailing garbage.
std::vector<FeatureRecord> decode(std::string_view bytes);

void write_records(const std::filesystem::path& path, std::span<const FeatureRecord> records);
std::vector<FeatureRecord> read_records(const std::filesystem::path& path);

void save_features(const std::filesystem::path& path, const LabeledFeatures& data, const std::string& name,
                   std::uint64_t seed);
void save_matrix(const std::filesystem::path& path, const Matrix& values, const std::string& name,
                 std::uint64_t seed);
// Loads a single-record file; labels are empty when the record has none.
LabeledFeatures load_features(const std::filesystem::path& path);
FeatureRecord load_record(const std::filesystem::path& path);

std::string to_csv(const FeatureRecord& record);
FeatureRecord from_csv(std::string_view text);
void write_csv(const std::filesystem::path& path, const FeatureRecord& record);
FeatureRecord read_csv(const std::filesystem::path& path);

// Loads either format, picked by the ".csv" extension.
FeatureRecord read_any(const std::filesystem::path& path);

// Head: one record of shape n_c x (n + 1), last column the bias.
FeatureRecord head_record(const LinearHead& head, const std::string& name);
LinearHead head_from_record(const FeatureRecord& record);
void save_head(const std::filesystem::path& path, const LinearHead& head, const std::string& name);
LinearHead load_head(const std::filesystem::path& path);

// Model: one head-shaped record per layer, in order.
void save_model(const std::filesystem::path& path, const MlpModel& model, std::uint64_t seed);
MlpModel load_model(const std::filesystem::path& path);

// Basis: named records for both PCA models, both basis changes and rho.
void save_basis(const std::filesystem::path& path, const CcaBasis& basis);
CcaBasis load_basis(const std::filesystem::path& path);

std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace ccaprobe::io
