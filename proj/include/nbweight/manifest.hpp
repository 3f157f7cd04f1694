#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nbweight {

inline constexpr const char* kToolName = "nbweight";
inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit digest of a file's bytes, as 16 lowercase hex characters.
std::string file_digest(const std::filesystem::path& path);

struct ManifestEntry {
    std::string key;
    std::string value;
};

/**
 * Serialized run manifest: tool identity, subcommand, resolved configuration
 * in the order given, input file digests, and the output files produced.
 * Deliberately free of timestamps and environment capture so that reruns
 * with identical inputs yield byte-identical manifests.
 */
std::string make_manifest(const std::string& subcommand,
                          const std::vector<ManifestEntry>& config,
                          const std::vector<std::filesystem::path>& inputs,
                          const std::vector<std::string>& outputs);

void write_manifest(const std::filesystem::path& path, const std::string& json_text);

}  // namespace nbweight
