#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "artinv/error.hpp"

namespace artinv {

/* Uncompressed RIFF/WAVE reader and writer. PCM 16-bit and IEEE float 32-bit
   only; multichannel input is averaged down to mono. */

struct WavData {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  double sample_rate_hz = 0.0;
};

namespace wav_detail {

inline std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void wr_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void wr_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace wav_detail

inline WavData read_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Errc::kIoFailure, "cannot open wav file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  using namespace wav_detail;
  auto need = [&](std::size_t off, std::size_t n) {
    if (off + n > bytes.size())
      fail(Errc::kMalformedFile, "truncated wav file: " + path.string());
  };
  need(0, 12);
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    fail(Errc::kMalformedFile, "not a RIFF/WAVE file: " + path.string());

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_off = 0, data_len = 0;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + off;
    std::uint32_t chunk_len = rd_u32(hdr + 4);
    std::size_t body = off + 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      need(body, 16);
      format = rd_u16(bytes.data() + body);
      channels = rd_u16(bytes.data() + body + 2);
      rate = rd_u32(bytes.data() + body + 4);
      bits = rd_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      need(body, chunk_len);
      data_off = body;
      data_len = chunk_len;
    }
    off = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data_off == 0)
    fail(Errc::kMalformedFile, "wav file missing fmt or data chunk: " + path.string());
  if (channels == 0 || rate == 0)
    fail(Errc::kMalformedFile, "wav file has zero channels or rate: " + path.string());

  WavData out;
  out.sample_rate_hz = static_cast<double>(rate);
  if (format == 1 && bits == 16) {
    std::size_t n_frames = data_len / (2 * channels);
    out.samples.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
      double acc = 0.0;
      for (std::uint16_t ch = 0; ch < channels; ++ch) {
        const unsigned char* p = bytes.data() + data_off + (i * channels + ch) * 2;
        std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        acc += static_cast<double>(s) / 32768.0;
      }
      out.samples[i] = acc / channels;
    }
  } else if (format == 3 && bits == 32) {
    std::size_t n_frames = data_len / (4 * channels);
    out.samples.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
      double acc = 0.0;
      for (std::uint16_t ch = 0; ch < channels; ++ch) {
        float f;
        std::memcpy(&f, bytes.data() + data_off + (i * channels + ch) * 4, 4);
        acc += static_cast<double>(f);
      }
      out.samples[i] = acc / channels;
    }
  } else {
    fail(Errc::kMalformedFile, "unsupported wav encoding (format " + std::to_string(format) +
                                   ", " + std::to_string(bits) +
                                   " bit); only PCM16 and float32 are supported");
  }
  return out;
}

namespace wav_detail {

inline void write_wav(const std::filesystem::path& path, std::span<const double> samples,
                      std::uint32_t rate, bool as_float) {
  std::string out;
  const std::uint16_t bytes_per = as_float ? 4 : 2;
  const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * bytes_per);
  out += "RIFF";
  wr_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  wr_u32(out, 16);
  wr_u16(out, as_float ? 3 : 1);
  wr_u16(out, 1);  // mono
  wr_u32(out, rate);
  wr_u32(out, rate * bytes_per);
  wr_u16(out, bytes_per);
  wr_u16(out, as_float ? 32 : 16);
  out += "data";
  wr_u32(out, data_len);
  for (double v : samples) {
    if (as_float) {
      float f = static_cast<float>(v);
      char buf[4];
      std::memcpy(buf, &f, 4);
      out.append(buf, 4);
    } else {
      long s = std::lround(v * 32768.0);
      s = s < -32768 ? -32768 : (s > 32767 ? 32767 : s);
      wr_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)));
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(Errc::kIoFailure, "cannot write wav file: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace wav_detail

inline void write_wav_pcm16(const std::filesystem::path& path, std::span<const double> samples,
                            std::uint32_t rate) {
  wav_detail::write_wav(path, samples, rate, false);
}

inline void write_wav_float32(const std::filesystem::path& path, std::span<const double> samples,
                              std::uint32_t rate) {
  wav_detail::write_wav(path, samples, rate, true);
}

}  // namespace artinv
