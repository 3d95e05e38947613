#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "netspec/graph.hpp"

namespace netspec {

/// Graph/W fixture document:
///
///   {
///     "description": "...",            (optional)
///     "n": 6,
///     "edges": [[1, 2], [1, 4], ...],  1-based, each undirected edge once
///     "w": [ ... N*N numbers, row-major ... ] | "adjacency" | "laplacian",
///     "y0": [ ... N numbers ... ]      (optional)
///   }
struct Fixture {
  std::string description;
  WAssignment assignment;
  std::optional<std::vector<double>> y0;
};

Fixture fixture_from_json(const nlohmann::json& doc);
nlohmann::json fixture_to_json(const Fixture& f);

Fixture load_fixture(const std::filesystem::path& path);
void save_fixture(const Fixture& f, const std::filesystem::path& path);

}  // namespace netspec
