#include "lps/io.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace lps {

namespace {

const std::array<std::uint32_t, 256> &crc_table() {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k)
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  return table;
}

class ByteWriter {
public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      bytes_.push_back(std::uint8_t(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
      bytes_.push_back(std::uint8_t(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void raw(const char *s, std::size_t n) {
    bytes_.insert(bytes_.end(), s, s + n);
  }
  const std::vector<std::uint8_t> &bytes() const { return bytes_; }

private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
  ByteReader(std::vector<std::uint8_t> bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= std::uint32_t(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= std::uint64_t(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  void magic(const char *expect) {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, expect, 4) != 0)
      throw DataError(path_ + ": bad magic, expected " + expect);
    pos_ += 4;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::uint8_t *data() const { return bytes_.data(); }

private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size())
      throw DataError(path_ + ": truncated file");
  }
  std::vector<std::uint8_t> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::string &path, const std::vector<std::uint8_t> &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw DataError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out)
    throw DataError("write failed for " + path);
}

} // namespace

std::uint32_t crc32(const std::uint8_t *data, std::size_t len) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i)
    c = crc_table()[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void write_cxt(const std::string &path, const ComplexTensor &t) {
  ByteWriter w;
  w.raw("CXT1", 4);
  w.u32(std::uint32_t(t.ndim()));
  for (std::size_t i = 0; i < t.ndim(); ++i)
    w.u64(t.dim(i));
  for (std::size_t i = 0; i < t.size(); ++i) {
    w.f64(t[i].real());
    w.f64(t[i].imag());
  }
  dump(path, w.bytes());
}

ComplexTensor read_cxt(const std::string &path) {
  ByteReader r(slurp(path), path);
  r.magic("CXT1");
  const std::uint32_t ndim = r.u32();
  if (ndim == 0 || ndim > 8)
    throw DataError(path + ": implausible rank");
  std::vector<std::size_t> dims(ndim);
  std::size_t total = 1;
  for (auto &d : dims) {
    d = std::size_t(r.u64());
    if (d == 0)
      throw DataError(path + ": zero extent");
    total *= d;
  }
  if (r.remaining() != total * 16)
    throw DataError(path + ": payload length does not match header");
  std::vector<cplx> data(total);
  for (auto &v : data) {
    const double re = r.f64();
    const double im = r.f64();
    v = cplx(re, im);
  }
  return ComplexTensor(std::move(dims), std::move(data));
}

namespace {
constexpr std::uint32_t kCheckpointVersion = 1;
}

void write_checkpoint(const std::string &path, const LsNetParams &params) {
  ByteWriter w;
  w.raw("LSN1", 4);
  w.u32(kCheckpointVersion);
  w.u32(std::uint32_t(params.n_iter));
  w.u32(std::uint32_t(params.hidden));
  w.f64(params.alpha);
  for (double v : params.to_flat())
    w.f64(v);
  const std::uint32_t crc =
      crc32(w.bytes().data() + 4, w.bytes().size() - 4);
  w.u32(crc);
  dump(path, w.bytes());
}

LsNetParams read_checkpoint(const std::string &path) {
  std::vector<std::uint8_t> all = slurp(path);
  if (all.size() < 8)
    throw DataError(path + ": truncated checkpoint");
  const std::uint32_t computed = crc32(all.data() + 4, all.size() - 8);
  std::uint32_t trailer = 0;
  for (int i = 0; i < 4; ++i)
    trailer |= std::uint32_t(all[all.size() - 4 + std::size_t(i)]) << (8 * i);
  if (trailer != computed)
    throw DataError(path + ": checkpoint CRC mismatch");
  all.resize(all.size() - 4);
  ByteReader r(std::move(all), path);
  r.magic("LSN1");

  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw DataError(path + ": unsupported checkpoint version");
  const std::uint32_t n_iter = r.u32();
  const std::uint32_t hidden = r.u32();
  if (n_iter == 0 || n_iter > 1000 || hidden == 0 || hidden > 4096)
    throw DataError(path + ": implausible model plan");
  const double alpha = r.f64();

  LsNetParams params = LsNetParams::zeros(int(n_iter), hidden);
  params.alpha = alpha;
  const std::size_t n = params.n_scalars();
  if (r.remaining() != n * 8)
    throw DataError(path + ": payload length does not match model plan");
  std::vector<double> flat(n);
  for (auto &v : flat)
    v = r.f64();
  params.from_flat(flat);
  return params;
}

void write_manifest(const std::string &path, const Manifest &entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw DataError("cannot open " + path + " for writing");
  for (const auto &[k, v] : entries)
    out << k << "=" << v << "\n";
  if (!out)
    throw DataError("write failed for " + path);
}

Manifest read_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path);
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ": malformed manifest line: " + line);
    m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

std::string manifest_get(const Manifest &m, const std::string &key) {
  const auto it = m.find(key);
  if (it == m.end())
    throw DataError("manifest is missing key '" + key + "'");
  return it->second;
}

double manifest_get_double(const Manifest &m, const std::string &key) {
  return std::stod(manifest_get(m, key));
}

long manifest_get_long(const Manifest &m, const std::string &key) {
  return std::stol(manifest_get(m, key));
}

} // namespace lps
