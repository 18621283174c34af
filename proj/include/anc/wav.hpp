#pragma once

#include <filesystem>

#include "anc/signal.hpp"

namespace anc {

/// Reads a mono RIFF WAV file (PCM16 or float32). Samples are normalized to
/// [-1, 1]; the sample rate comes from the header, no resampling happens.
SignalBuffer load_wav(const std::filesystem::path& path);

/// Writers used for fixtures and exports.
void save_wav_pcm16(const std::filesystem::path& path, const SignalBuffer& x);
void save_wav_float32(const std::filesystem::path& path, const SignalBuffer& x);

}  // namespace anc
