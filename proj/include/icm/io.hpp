#pragma once

// Strict JSON readers for the family, dataset, cover and grid files. Unknown
// keys and wrongly typed values are rejected with ErrorKind::Parse.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icm/complexity.hpp"
#include "icm/core.hpp"

namespace icm::io {

struct FamilyFile {
  ModelFamily family;
  std::optional<Density> truth;
};

FamilyFile parse_family(const std::string& json_text);
FamilyFile read_family(const std::filesystem::path& path);

/// {"samples": [indices]} checked against the family's space size.
Dataset parse_dataset(const std::string& json_text, std::size_t space_size);
Dataset read_dataset(const std::filesystem::path& path, std::size_t space_size);

/// {"blocks": [[member, ...], ...]} where members are model ids (strings) or
/// zero-based indices. The cover is flagged as a partition when its blocks are
/// pairwise disjoint.
FamilyCover parse_cover(const std::string& json_text, const ModelFamily& family);
FamilyCover read_cover(const std::filesystem::path& path, const ModelFamily& family);

/// Parameter grid: object mapping parameter names (lambda, rho, gamma, alpha,
/// beta, n, t, delta) to arrays of numbers.
using ParameterGrid = std::map<std::string, std::vector<double>>;
ParameterGrid parse_grid(const std::string& json_text);
ParameterGrid read_grid(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& contents);

}  // namespace icm::io
