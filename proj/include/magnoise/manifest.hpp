#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace magnoise {

inline constexpr const char* version_string = "0.1.0";

/// Reproducibility record emitted with every CLI run: the subcommand, the
/// physics-relevant resolved parameters, digests of the input files, and the
/// seed. Identical manifests imply identical outputs; execution-only knobs
/// (worker count, output paths, pretty-printing) are deliberately excluded.
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> parameters;
    std::map<std::string, std::string> input_digests; // path -> fnv1a64 hex
    std::optional<std::uint64_t> seed;
    std::string version = version_string;

    void add_input(const std::string& path);
};

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string fnv1a64_file_hex(const std::string& path);

} // namespace magnoise
