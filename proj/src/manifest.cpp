#include "nbweight/manifest.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "nbweight/errors.hpp"

namespace nbweight {

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for digest: " + path.string());

    std::uint64_t hash = 14695981039346656037ULL;
    char buffer[65536];
    for (;;) {
        in.read(buffer, sizeof buffer);
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 1099511628211ULL;
        }
        if (got == 0) break;
    }

    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

std::string make_manifest(const std::string& subcommand,
                          const std::vector<ManifestEntry>& config,
                          const std::vector<std::filesystem::path>& inputs,
                          const std::vector<std::string>& outputs) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;

    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& entry : config) cfg[entry.key] = entry.value;
    j["config"] = std::move(cfg);

    nlohmann::ordered_json ins = nlohmann::ordered_json::array();
    for (const auto& path : inputs) {
        ins.push_back({{"path", path.string()}, {"fnv1a64", file_digest(path)}});
    }
    j["inputs"] = std::move(ins);
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& path, const std::string& json_text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest: " + path.string());
    out << json_text;
}

}  // namespace nbweight
