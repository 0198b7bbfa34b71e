#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lps/lsnet.hpp"
#include "lps/tensor.hpp"

namespace lps {

/// Thrown on malformed/corrupt files (maps to CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint32_t crc32(const std::uint8_t *data, std::size_t len);

// CXT container: "CXT1", u32le ndim, ndim x u64le extents, then interleaved
// (real, imag) f64le pairs, row-major.
void write_cxt(const std::string &path, const ComplexTensor &t);
ComplexTensor read_cxt(const std::string &path);

// Checkpoint: "LSN1", u32le version, u32le n_iter, u32le hidden channels,
// f64le leaky slope, per block (beta f64, gamma f64, conv weights/biases in
// declaration order, f64le), then u32le CRC32 of everything after the magic.
void write_checkpoint(const std::string &path, const LsNetParams &params);
LsNetParams read_checkpoint(const std::string &path);

// Plain key=value manifest, one entry per line, '#' comments allowed.
using Manifest = std::map<std::string, std::string>;
void write_manifest(const std::string &path, const Manifest &entries);
Manifest read_manifest(const std::string &path);

double manifest_get_double(const Manifest &m, const std::string &key);
long manifest_get_long(const Manifest &m, const std::string &key);
std::string manifest_get(const Manifest &m, const std::string &key);

} // namespace lps
