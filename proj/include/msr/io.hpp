// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "msr/signal.hpp"

namespace msr {

// File formats:
//   1-D signals: CSV, one value per line.
//   2-D signals: CSV matrix (comma-separated rows), or PGM (P2 ascii / P5
//     binary, maxval 65535) with a "<file>.json" sidecar recording the
//     linear scaling {vmin, vmax} so real-valued data round-trips.
//   Measurement sets and targets: JSON manifests with SHA-256 checksums.

void write_csv(const std::string& path, const GridSignal& s);
GridSignal read_csv(const std::string& path);

void write_pgm(const std::string& path, const GridSignal& s, bool binary);
GridSignal read_pgm(const std::string& path);

/// Dispatches on extension: .csv or .pgm.
GridSignal read_signal(const std::string& path);

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_file(const std::string& path);

struct ManifestPayload {
  std::string path;    // relative to the manifest's directory
  std::string sha256;  // hex digest of the payload file
};

/// Self-describing envelope written next to every CLI output.
struct Manifest {
  std::string version = "1.0.0";
  std::string kind;  // "target" | "measurement-set" | "report"
  std::vector<ManifestPayload> payloads;
  std::string command_line;
  std::uint64_t seed = 0;
  std::string timestamp;
  nlohmann::json extra;  // kind-specific fields

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
};

void write_manifest(const std::string& path, const Manifest& m);
/// Loads and verifies every payload checksum; throws on mismatch or on a
/// major-version difference.
Manifest read_manifest(const std::string& path);

/// Writes per-scale signals as "<prefix>_z<k>.csv" (or .pgm for 2-D when
/// binary snapshots are requested) plus "<prefix>.manifest.json".
void write_measurement_set(const std::string& prefix, const MeasurementSet& ms,
                           const std::string& command_line, std::uint64_t seed,
                           bool binary_pgm = false);
MeasurementSet read_measurement_set(const std::string& manifest_path);

}  // namespace msr
