#pragma once

#include <stdexcept>
#include <string>

namespace anc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input validation
class BandSpecError : public Error { public: using Error::Error; };
class SizeError : public Error { public: using Error::Error; };
class DimensionError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class DegenerateInputError : public Error { public: using Error::Error; };
class NumericError : public Error { public: using Error::Error; };

/// Raised when an off-line training run fails to converge.
class TrainingError : public Error {
public:
  TrainingError(int noise_index, const std::string& what)
      : Error(what), noise_index(noise_index) {}
  int noise_index;
};

// WAV ingestion
class WavError : public Error { public: using Error::Error; };
class WavMissingFileError : public WavError { public: using WavError::WavError; };
class WavChannelError : public WavError { public: using WavError::WavError; };
class WavEncodingError : public WavError { public: using WavError::WavError; };
class WavRateError : public WavError { public: using WavError::WavError; };

// Database persistence
class DbError : public Error { public: using Error::Error; };
class DbFormatError : public DbError { public: using DbError::DbError; };
class DbVersionError : public DbError { public: using DbError::DbError; };
class DbTruncationError : public DbError { public: using DbError::DbError; };
class DbChecksumError : public DbError { public: using DbError::DbError; };
class DbDuplicateError : public DbError { public: using DbError::DbError; };
class DbRangeError : public DbError { public: using DbError::DbError; };
class DbIncompatibleError : public DbError { public: using DbError::DbError; };

}  // namespace anc
