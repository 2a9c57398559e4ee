// SPDX-License-Identifier: Apache-2.0
#include "msr/io.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace msr {
namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_csv(const std::string& path, const GridSignal& s) {
  std::ofstream out(path);
  if (!out) fail("cannot open for writing", path);
  if (s.dims() == 1) {
    for (std::int64_t i = 0; i < s.size(); ++i) out << format_double(s[i]) << "\n";
  } else {
    for (int i = 0; i < s.extent(0); ++i) {
      for (int j = 0; j < s.extent(1); ++j) {
        if (j) out << ",";
        out << format_double(s.at(i, j));
      }
      out << "\n";
    }
  }
  if (!out) fail("write failed", path);
}

GridSignal read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open", path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      fail("ragged csv", path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail("empty csv", path);
  const int n0 = static_cast<int>(rows.size());
  const int n1 = static_cast<int>(rows.front().size());
  if (n1 == 1) {
    GridSignal s(n0);
    for (int i = 0; i < n0; ++i) s[i] = rows[i][0];
    if (!s.all_finite()) fail("non-finite values", path);
    return s;
  }
  GridSignal s(n0, n1);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) s.at(i, j) = rows[i][j];
  if (!s.all_finite()) fail("non-finite values", path);
  return s;
}

void write_pgm(const std::string& path, const GridSignal& s, bool binary) {
  if (s.dims() != 2) throw std::invalid_argument("pgm output requires a 2-D signal");
  double vmin = s[0], vmax = s[0];
  for (std::int64_t i = 0; i < s.size(); ++i) {
    vmin = std::min(vmin, s[i]);
    vmax = std::max(vmax, s[i]);
  }
  const double scale = (vmax > vmin) ? 65535.0 / (vmax - vmin) : 0.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open for writing", path);
  out << (binary ? "P5" : "P2") << "\n"
      << s.extent(1) << " " << s.extent(0) << "\n65535\n";
  for (int i = 0; i < s.extent(0); ++i) {
    for (int j = 0; j < s.extent(1); ++j) {
      const int q = static_cast<int>(std::lround((s.at(i, j) - vmin) * scale));
      const int p = std::clamp(q, 0, 65535);
      if (binary) {
        const unsigned char hi = static_cast<unsigned char>(p >> 8);
        const unsigned char lo = static_cast<unsigned char>(p & 0xff);
        out.put(static_cast<char>(hi)).put(static_cast<char>(lo));
      } else {
        out << p << (j + 1 < s.extent(1) ? " " : "");
      }
    }
    if (!binary) out << "\n";
  }
  if (!out) fail("write failed", path);

  nlohmann::json side;
  side["vmin"] = vmin;
  side["vmax"] = vmax;
  side["maxval"] = 65535;
  std::ofstream sj(path + ".json");
  sj << side.dump(2) << "\n";
}

GridSignal read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open", path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") fail("not a P2/P5 pgm", path);
  auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    fail("truncated pgm header", path);
    return std::string();
  };
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) fail("bad pgm header", path);

  std::vector<int> raw(static_cast<std::size_t>(w) * h);
  if (magic == "P2") {
    for (auto& v : raw) in >> v;
    if (!in) fail("truncated pgm data", path);
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(raw.size() * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      fail("truncated pgm data", path);
    for (std::size_t i = 0; i < raw.size(); ++i)
      raw[i] = (bytes == 2) ? (buf[2 * i] << 8) | buf[2 * i + 1] : buf[i];
  }

  double vmin = 0.0, vmax = static_cast<double>(maxval);
  std::ifstream sj(path + ".json");
  if (sj) {
    nlohmann::json side = nlohmann::json::parse(sj);
    vmin = side.at("vmin").get<double>();
    vmax = side.at("vmax").get<double>();
  }
  const double scale = (vmax > vmin) ? (vmax - vmin) / maxval : 0.0;
  GridSignal s(h, w);
  for (std::int64_t i = 0; i < s.size(); ++i) s[i] = vmin + raw[i] * scale;
  return s;
}

GridSignal read_signal(const std::string& path) {
  const auto ext = fs::path(path).extension().string();
  if (ext == ".csv") return read_csv(path);
  if (ext == ".pgm") return read_pgm(path);
  fail("unsupported signal format (want .csv or .pgm)", path);
  return GridSignal();
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), self-contained.

namespace {

constexpr std::array<std::uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

struct Sha256 {
  std::array<std::uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::array<unsigned char, 64> block{};
  std::size_t fill = 0;
  std::uint64_t total = 0;

  void compress(const unsigned char* p) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto a = h;
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t s1 = rotr(a[4], 6) ^ rotr(a[4], 11) ^ rotr(a[4], 25);
      const std::uint32_t ch = (a[4] & a[5]) ^ (~a[4] & a[6]);
      const std::uint32_t t1 = a[7] + s1 + ch + kSha256K[i] + w[i];
      const std::uint32_t s0 = rotr(a[0], 2) ^ rotr(a[0], 13) ^ rotr(a[0], 22);
      const std::uint32_t maj = (a[0] & a[1]) ^ (a[0] & a[2]) ^ (a[1] & a[2]);
      const std::uint32_t t2 = s0 + maj;
      a[7] = a[6]; a[6] = a[5]; a[5] = a[4]; a[4] = a[3] + t1;
      a[3] = a[2]; a[2] = a[1]; a[1] = a[0]; a[0] = t1 + t2;
    }
    for (int i = 0; i < 8; ++i) h[i] += a[i];
  }

  void update(const unsigned char* p, std::size_t len) {
    total += len;
    while (len > 0) {
      const std::size_t take = std::min(len, block.size() - fill);
      std::memcpy(block.data() + fill, p, take);
      fill += take;
      p += take;
      len -= take;
      if (fill == block.size()) {
        compress(block.data());
        fill = 0;
      }
    }
  }

  std::string hex_digest() {
    const std::uint64_t bits = total * 8;
    unsigned char pad = 0x80;
    update(&pad, 1);
    const unsigned char zero = 0;
    while (fill != 56) update(&zero, 1);
    unsigned char lenb[8];
    for (int i = 0; i < 8; ++i) lenb[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(lenb, 8);
    char out[65];
    for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 64);
  }
};

}  // namespace

std::string sha256_hex(const void* data, std::size_t len) {
  Sha256 s;
  s.update(static_cast<const unsigned char*>(data), len);
  return s.hex_digest();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open", path);
  Sha256 s;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    s.update(reinterpret_cast<unsigned char*>(buf.data()),
             static_cast<std::size_t>(in.gcount()));
  }
  return s.hex_digest();
}

// ---------------------------------------------------------------------------
// Manifests

nlohmann::json Manifest::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["kind"] = kind;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : payloads) arr.push_back({{"path", p.path}, {"sha256", p.sha256}});
  j["payloads"] = arr;
  j["provenance"] = {{"command_line", command_line},
                     {"seed", seed},
                     {"timestamp", timestamp}};
  if (!extra.is_null()) j["extra"] = extra;
  return j;
}

Manifest Manifest::from_json(const nlohmann::json& j) {
  Manifest m;
  m.version = j.at("version").get<std::string>();
  m.kind = j.at("kind").get<std::string>();
  for (const auto& p : j.at("payloads")) {
    ManifestPayload mp;
    mp.path = p.at("path").get<std::string>();
    mp.sha256 = p.at("sha256").get<std::string>();
    m.payloads.push_back(std::move(mp));
  }
  const auto& prov = j.at("provenance");
  m.command_line = prov.at("command_line").get<std::string>();
  m.seed = prov.at("seed").get<std::uint64_t>();
  m.timestamp = prov.at("timestamp").get<std::string>();
  if (j.contains("extra")) m.extra = j.at("extra");
  return m;
}

void write_manifest(const std::string& path, const Manifest& m) {
  Manifest copy = m;
  if (copy.timestamp.empty()) copy.timestamp = iso_timestamp();
  std::ofstream out(path);
  if (!out) fail("cannot open for writing", path);
  out << copy.to_json().dump(2) << "\n";
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open", path);
  Manifest m = Manifest::from_json(nlohmann::json::parse(in));
  if (m.version.rfind("1.", 0) != 0)
    fail("unsupported manifest version " + m.version, path);
  const fs::path dir = fs::path(path).parent_path();
  for (const auto& p : m.payloads) {
    const std::string full = (dir / p.path).string();
    const std::string got = sha256_file(full);
    if (got != p.sha256)
      fail("checksum mismatch for " + p.path + " (got " + got + ")", path);
  }
  return m;
}

void write_measurement_set(const std::string& prefix, const MeasurementSet& ms,
                           const std::string& command_line, std::uint64_t seed,
                           bool binary_pgm) {
  ms.validate();
  Manifest m;
  m.kind = "measurement-set";
  m.command_line = command_line;
  m.seed = seed;
  m.extra["scales"] = ms.scales;
  m.extra["mode"] = to_string(ms.mode);
  m.extra["normalization"] = to_string(ms.norm);
  m.extra["sigma"] = ms.sigma;
  m.extra["dims"] = ms.dims;
  m.extra["source_shape"] = {ms.source_shape[0], ms.source_shape[1]};

  const fs::path dir = fs::path(prefix).parent_path();
  const std::string stem = fs::path(prefix).filename().string();
  std::vector<std::string> files;
  for (std::size_t j = 0; j < ms.scales.size(); ++j) {
    const std::string name = stem + "_z" + std::to_string(ms.scales[j]) + ".csv";
    const std::string full = dir.empty() ? name : (dir / name).string();
    write_csv(full, ms.data[j]);
    files.push_back(name);
    if (binary_pgm && ms.dims == 2) {
      const std::string p = stem + "_z" + std::to_string(ms.scales[j]) + ".pgm";
      write_pgm(dir.empty() ? p : (dir / p).string(), ms.data[j], true);
    }
  }
  m.extra["data"] = files;
  for (const auto& name : files) {
    const std::string full = dir.empty() ? name : (dir / name).string();
    m.payloads.push_back({name, sha256_file(full)});
  }
  write_manifest(prefix + ".manifest.json", m);
}

MeasurementSet read_measurement_set(const std::string& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  if (m.kind != "measurement-set")
    fail("manifest kind is '" + m.kind + "', expected measurement-set", manifest_path);
  MeasurementSet ms;
  ms.scales = m.extra.at("scales").get<std::vector<int>>();
  ms.mode = conv_mode_from_string(m.extra.at("mode").get<std::string>());
  ms.norm = normalization_from_string(m.extra.at("normalization").get<std::string>());
  ms.sigma = m.extra.at("sigma").get<double>();
  ms.dims = m.extra.at("dims").get<int>();
  const auto shape = m.extra.at("source_shape").get<std::vector<int>>();
  ms.source_shape = {shape.at(0), shape.at(1)};
  const fs::path dir = fs::path(manifest_path).parent_path();
  for (const auto& name : m.extra.at("data").get<std::vector<std::string>>())
    ms.data.push_back(read_csv(dir.empty() ? name : (dir / name).string()));
  ms.validate();
  return ms;
}

}  // namespace msr
