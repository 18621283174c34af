#include "anc/database.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "anc/errors.hpp"

namespace anc {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'A', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kKindSubband = 0;
constexpr std::uint8_t kKindFullband = 1;

class Writer {
public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + len);
  }
  std::vector<std::uint8_t>& bytes() { return buf_; }

private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
public:
  Reader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > len_) throw DbTruncationError("database file truncated");
    T v;
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void get_bytes(void* out, std::size_t len) {
    if (pos_ + len > len_) throw DbTruncationError("database file truncated");
    std::memcpy(out, data_ + pos_, len);
    pos_ += len;
  }
  std::size_t remaining() const { return len_ - pos_; }

private:
  const std::uint8_t* data_;
  std::size_t len_;
  std::size_t pos_ = 0;
};

void put_bits(Writer& w, const BitVector& sig) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sig.bits.size()));
  std::uint8_t acc = 0;
  int filled = 0;
  for (std::size_t i = 0; i < sig.bits.size(); ++i) {
    acc |= static_cast<std::uint8_t>((sig.bits[i] ? 1 : 0) << filled);
    if (++filled == 8) {
      w.put<std::uint8_t>(acc);
      acc = 0;
      filled = 0;
    }
  }
  if (filled > 0) w.put<std::uint8_t>(acc);
}

BitVector get_bits(Reader& r) {
  const std::uint32_t n = r.get<std::uint32_t>();
  BitVector sig;
  sig.bits.resize(n);
  const std::size_t n_bytes = (n + 7) / 8;
  std::vector<std::uint8_t> packed(n_bytes);
  r.get_bytes(packed.data(), n_bytes);
  for (std::uint32_t i = 0; i < n; ++i)
    sig.bits[i] = (packed[i / 8] >> (i % 8)) & 1;
  return sig;
}

void put_features(Writer& w, const FeatureConfig& f) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.segment_len));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.fft_len_V));
  w.put<double>(f.overlap_fraction);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(f.window));
}

FeatureConfig get_features(Reader& r) {
  FeatureConfig f;
  f.segment_len = static_cast<int>(r.get<std::uint32_t>());
  f.fft_len_V = static_cast<int>(r.get<std::uint32_t>());
  f.overlap_fraction = r.get<double>();
  f.window = static_cast<Window>(r.get<std::uint8_t>());
  return f;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw DbError("cannot open database file: " + path.string());
  const std::streamsize size = f.tellg();
  f.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  f.read(reinterpret_cast<char*>(bytes.data()), size);
  if (f.gcount() != size) throw DbError("short read: " + path.string());
  return bytes;
}

void write_with_crc(const std::filesystem::path& path, Writer& w) {
  const std::uint32_t crc = crc32(w.bytes().data(), w.bytes().size());
  w.put<std::uint32_t>(crc);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DbError("cannot create database file: " + path.string());
  f.write(reinterpret_cast<const char*>(w.bytes().data()),
          static_cast<std::streamsize>(w.bytes().size()));
  if (!f) throw DbError("write failed: " + path.string());
}

Reader open_checked(const std::vector<std::uint8_t>& bytes, std::uint8_t expected_kind) {
  if (bytes.size() < kMagic.size() + sizeof(std::uint32_t) + 1 + sizeof(std::uint32_t))
    throw DbTruncationError("database file too short");
  Reader r(bytes.data(), bytes.size());
  std::array<char, 4> magic{};
  r.get_bytes(magic.data(), magic.size());
  if (magic != kMagic) throw DbFormatError("bad magic, not a SASF database");
  const std::uint32_t version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw DbVersionError("unsupported database version " + std::to_string(version));
  const std::uint8_t kind = r.get<std::uint8_t>();
  if (kind != expected_kind) throw DbFormatError("database kind mismatch");
  return r;
}

void check_crc_and_tail(const std::vector<std::uint8_t>& bytes, Reader& r) {
  if (r.remaining() < sizeof(std::uint32_t))
    throw DbTruncationError("database file truncated before checksum");
  if (r.remaining() > sizeof(std::uint32_t))
    throw DbFormatError("trailing bytes after records");
  const std::uint32_t stored = r.get<std::uint32_t>();
  const std::uint32_t computed =
      crc32(bytes.data(), bytes.size() - sizeof(std::uint32_t));
  if (stored != computed) throw DbChecksumError("database checksum mismatch");
}

}  // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void DbMeta::validate() const {
  if (num_bands_M < 4 || num_bands_M % 2 != 0)
    throw ConfigError("database meta: M must be even and >= 4");
  if (decimation_D != num_bands_M / 2)
    throw ConfigError("database meta: D must equal M/2");
  if (fullband_length_L <= 0 || fullband_length_L % decimation_D != 0)
    throw ConfigError("database meta: L must be divisible by D");
  if (subband_length_Ls != fullband_length_L / decimation_D)
    throw ConfigError("database meta: L_s must equal L/D");
  if (psd_bins_V != features.fft_len_V)
    throw ConfigError("database meta: V must match the feature config");
  if (num_noises_I < 1) throw ConfigError("database meta: I must be >= 1");
  if (!(sample_rate_hz > 0.0)) throw ConfigError("database meta: bad sample rate");
}

SubbandDatabase::SubbandDatabase(DbMeta meta) : meta_(std::move(meta)) {
  meta_.validate();
  grid_.assign(static_cast<std::size_t>(meta_.num_noises_I) *
                   static_cast<std::size_t>(meta_.num_bands_M / 2 + 1),
               std::nullopt);
}

std::size_t SubbandDatabase::cell(int noise_index, int subband) const {
  return static_cast<std::size_t>(noise_index) *
             static_cast<std::size_t>(meta_.num_bands_M / 2 + 1) +
         static_cast<std::size_t>(subband);
}

std::size_t SubbandDatabase::record_count() const {
  std::size_t n = 0;
  for (const auto& c : grid_)
    if (c.has_value()) ++n;
  return n;
}

bool SubbandDatabase::complete() const { return record_count() == grid_.size(); }

void SubbandDatabase::insert(SubFilterRecord record) {
  if (record.noise_index_i < 0 || record.noise_index_i >= meta_.num_noises_I)
    throw DbRangeError("noise index out of range");
  if (record.subband_m < 0 || record.subband_m > meta_.num_bands_M / 2)
    throw DbRangeError("subband index out of range");
  if (record.weights_freq.size() != static_cast<std::size_t>(meta_.subband_length_Ls))
    throw DimensionError("record weight vector must have length L_s");
  if (record.signature.bits.size() != static_cast<std::size_t>(meta_.psd_bins_V))
    throw DimensionError("record signature must have length V");
  auto& slot = grid_[cell(record.noise_index_i, record.subband_m)];
  if (slot.has_value()) throw DbDuplicateError("record cell already populated");
  slot = std::move(record);
}

const SubFilterRecord& SubbandDatabase::at(int noise_index, int subband) const {
  if (noise_index < 0 || noise_index >= meta_.num_noises_I)
    throw DbRangeError("noise index out of range");
  if (subband < 0 || subband > meta_.num_bands_M / 2)
    throw DbRangeError("subband index out of range");
  const auto& slot = grid_[cell(noise_index, subband)];
  if (!slot.has_value()) throw DbError("record cell is empty");
  return *slot;
}

std::vector<const SubFilterRecord*> SubbandDatabase::query(int subband) const {
  if (subband < 0 || subband > meta_.num_bands_M / 2)
    throw DbRangeError("subband index out of range");
  if (!complete()) throw DbError("query requires a complete database");
  std::vector<const SubFilterRecord*> out;
  out.reserve(static_cast<std::size_t>(meta_.num_noises_I));
  for (int i = 0; i < meta_.num_noises_I; ++i) out.push_back(&at(i, subband));
  return out;
}

std::size_t SubbandDatabase::weight_payload_bytes() const {
  return record_count() * static_cast<std::size_t>(meta_.subband_length_Ls) * 2 *
         sizeof(double);
}

void SubbandDatabase::save(const std::filesystem::path& path) const {
  if (!complete()) throw DbError("cannot save an incomplete database");
  Writer w;
  w.put_bytes(kMagic.data(), kMagic.size());
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint8_t>(kKindSubband);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_.fullband_length_L));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_.num_bands_M));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_.decimation_D));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_.subband_length_Ls));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_.psd_bins_V));
  w.put<double>(meta_.sample_rate_hz);
  put_features(w, meta_.features);
  w.put<std::uint64_t>(meta_.prototype_hash);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_.num_noises_I));
  for (int i = 0; i < meta_.num_noises_I; ++i) {
    for (int m = 0; m <= meta_.num_bands_M / 2; ++m) {
      const SubFilterRecord& rec = at(i, m);
      w.put<std::uint16_t>(static_cast<std::uint16_t>(rec.noise_index_i));
      w.put<std::uint16_t>(static_cast<std::uint16_t>(rec.subband_m));
      for (const cdouble& v : rec.weights_freq) {
        w.put<double>(v.real());
        w.put<double>(v.imag());
      }
      put_bits(w, rec.signature);
    }
  }
  write_with_crc(path, w);
}

SubbandDatabase SubbandDatabase::load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  Reader r = open_checked(bytes, kKindSubband);

  DbMeta meta;
  meta.fullband_length_L = static_cast<int>(r.get<std::uint32_t>());
  meta.num_bands_M = static_cast<int>(r.get<std::uint32_t>());
  meta.decimation_D = static_cast<int>(r.get<std::uint32_t>());
  meta.subband_length_Ls = static_cast<int>(r.get<std::uint32_t>());
  meta.psd_bins_V = static_cast<int>(r.get<std::uint32_t>());
  meta.sample_rate_hz = r.get<double>();
  meta.features = get_features(r);
  meta.prototype_hash = r.get<std::uint64_t>();
  meta.num_noises_I = static_cast<int>(r.get<std::uint32_t>());

  SubbandDatabase db(meta);
  const std::size_t n_records = static_cast<std::size_t>(meta.num_noises_I) *
                                static_cast<std::size_t>(meta.num_bands_M / 2 + 1);
  for (std::size_t k = 0; k < n_records; ++k) {
    SubFilterRecord rec;
    rec.noise_index_i = r.get<std::uint16_t>();
    rec.subband_m = r.get<std::uint16_t>();
    rec.weights_freq.resize(static_cast<std::size_t>(meta.subband_length_Ls));
    for (auto& v : rec.weights_freq) {
      const double re = r.get<double>();
      const double im = r.get<double>();
      v = {re, im};
    }
    rec.signature = get_bits(r);
    db.insert(std::move(rec));
  }
  check_crc_and_tail(bytes, r);
  return db;
}

const FullbandRecord& FullbandDatabase::at(std::size_t index) const {
  if (index >= records_.size()) throw DbRangeError("filter index out of range");
  return records_[index];
}

void FullbandDatabase::append(FullbandRecord record) {
  if (record.filter_index != static_cast<int>(records_.size()))
    throw DbRangeError("fullband records must be appended in index order");
  if (record.weights_time.size() !=
      static_cast<std::size_t>(meta_.fullband_length_L))
    throw DimensionError("fullband record weights must have length L");
  if (record.signature.bits.size() != static_cast<std::size_t>(meta_.psd_bins_V))
    throw DimensionError("fullband record signature must have length V");
  records_.push_back(std::move(record));
}

std::size_t FullbandDatabase::weight_payload_bytes() const {
  return records_.size() * static_cast<std::size_t>(meta_.fullband_length_L) *
         sizeof(double);
}

void FullbandDatabase::save(const std::filesystem::path& path) const {
  Writer w;
  w.put_bytes(kMagic.data(), kMagic.size());
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint8_t>(kKindFullband);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_.fullband_length_L));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_.psd_bins_V));
  w.put<double>(meta_.sample_rate_hz);
  put_features(w, meta_.features);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(records_.size()));
  for (const FullbandRecord& rec : records_) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(rec.filter_index));
    for (double v : rec.weights_time) w.put<double>(v);
    put_bits(w, rec.signature);
  }
  write_with_crc(path, w);
}

FullbandDatabase FullbandDatabase::load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  Reader r = open_checked(bytes, kKindFullband);

  FullbandDbMeta meta;
  meta.fullband_length_L = static_cast<int>(r.get<std::uint32_t>());
  meta.psd_bins_V = static_cast<int>(r.get<std::uint32_t>());
  meta.sample_rate_hz = r.get<double>();
  meta.features = get_features(r);
  const std::uint32_t count = r.get<std::uint32_t>();

  FullbandDatabase db(meta);
  for (std::uint32_t k = 0; k < count; ++k) {
    FullbandRecord rec;
    rec.filter_index = r.get<std::uint16_t>();
    rec.weights_time.resize(static_cast<std::size_t>(meta.fullband_length_L));
    for (auto& v : rec.weights_time) v = r.get<double>();
    rec.signature = get_bits(r);
    db.append(std::move(rec));
  }
  check_crc_and_tail(bytes, r);
  return db;
}

}  // namespace anc
