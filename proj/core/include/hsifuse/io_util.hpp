#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsifuse::io {

// All binary payloads are little-endian. On-disk float payloads are float32;
// byte-level reproducibility of every artifact depends on these helpers being
// the single write path.

static_assert(sizeof(float) == 4, "float32 payloads require 4-byte float");

inline void write_f32(const std::filesystem::path& path, const std::vector<float>& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write: " + path.string());
}

inline std::vector<float> read_f32(const std::filesystem::path& path,
                                   std::size_t expected_count) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("missing file: " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expected_count * sizeof(float)) {
    throw std::runtime_error("dimension mismatch: " + path.string() + " holds " +
                             std::to_string(bytes) + " bytes, expected " +
                             std::to_string(expected_count * sizeof(float)));
  }
  std::vector<float> v(expected_count);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw std::runtime_error("short read: " + path.string());
  return v;
}

inline void write_u8(const std::filesystem::path& path, const std::vector<std::uint8_t>& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size()));
  if (!out) throw std::runtime_error("short write: " + path.string());
}

inline std::vector<std::uint8_t> read_u8(const std::filesystem::path& path,
                                         std::size_t expected_count) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("missing file: " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expected_count) {
    throw std::runtime_error("dimension mismatch: " + path.string() + " holds " +
                             std::to_string(bytes) + " bytes, expected " +
                             std::to_string(expected_count));
  }
  std::vector<std::uint8_t> v(expected_count);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw std::runtime_error("short read: " + path.string());
  return v;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing file: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace hsifuse::io
