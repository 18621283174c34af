#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "anc/features.hpp"
#include "anc/fft.hpp"

namespace anc {

/// One pre-trained sub-filter: frequency-domain weights plus the binary PSD
/// signature of the training noise in that subband.
struct SubFilterRecord {
  int noise_index_i = 0;
  int subband_m = 0;
  std::vector<cdouble> weights_freq;  // length L_s
  BitVector signature;                // length V
};

struct DbMeta {
  int fullband_length_L = 0;
  int num_bands_M = 0;
  int decimation_D = 0;
  int subband_length_Ls = 0;
  int psd_bins_V = 0;
  double sample_rate_hz = 0.0;
  FeatureConfig features;
  std::uint64_t prototype_hash = 0;
  int num_noises_I = 0;

  void validate() const;
};

/// Complete I x (M/2+1) grid of sub-filter records, persisted as a
/// little-endian binary file with a trailing CRC32.
class SubbandDatabase {
public:
  SubbandDatabase() = default;
  explicit SubbandDatabase(DbMeta meta);

  const DbMeta& meta() const { return meta_; }
  std::size_t record_count() const;
  bool complete() const;

  /// Stores a record; replacing an existing (i, m) cell is an error.
  void insert(SubFilterRecord record);

  const SubFilterRecord& at(int noise_index, int subband) const;

  /// The I candidates for one subband in noise-index order.
  std::vector<const SubFilterRecord*> query(int subband) const;

  /// Bytes of complex weight payload in the persisted layout.
  std::size_t weight_payload_bytes() const;

  void save(const std::filesystem::path& path) const;
  static SubbandDatabase load(const std::filesystem::path& path);

private:
  std::size_t cell(int noise_index, int subband) const;

  DbMeta meta_;
  std::vector<std::optional<SubFilterRecord>> grid_;
};

/// SFANC baseline record: one fullband time-domain filter plus its fullband
/// PSD signature.
struct FullbandRecord {
  int filter_index = 0;
  std::vector<double> weights_time;  // length L
  BitVector signature;               // length V
};

struct FullbandDbMeta {
  int fullband_length_L = 0;
  int psd_bins_V = 0;
  double sample_rate_hz = 0.0;
  FeatureConfig features;
};

class FullbandDatabase {
public:
  FullbandDatabase() = default;
  explicit FullbandDatabase(FullbandDbMeta meta) : meta_(std::move(meta)) {}

  const FullbandDbMeta& meta() const { return meta_; }
  std::size_t size() const { return records_.size(); }
  const FullbandRecord& at(std::size_t index) const;
  const std::vector<FullbandRecord>& records() const { return records_; }

  void append(FullbandRecord record);

  std::size_t weight_payload_bytes() const;

  void save(const std::filesystem::path& path) const;
  static FullbandDatabase load(const std::filesystem::path& path);

private:
  FullbandDbMeta meta_;
  std::vector<FullbandRecord> records_;
};

/// CRC32 (IEEE) used by the database container format.
std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

}  // namespace anc
