#include "netspec/fixture.hpp"

#include <fstream>

#include "netspec/errors.hpp"

namespace netspec {

using nlohmann::json;

Fixture fixture_from_json(const json& doc) {
  try {
    const auto n = doc.at("n").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("edge entries must be [i, j] pairs");
      edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
    Graph g(n, std::move(edges));

    const json& wdoc = doc.at("w");
    std::optional<WAssignment> wa;
    if (wdoc.is_string()) {
      const WKind kind = parse_w_kind(wdoc.get<std::string>());
      if (kind == WKind::RandomWeights) {
        throw ConfigError("fixture w tag must be 'adjacency', 'laplacian' or an explicit matrix");
      }
      wa.emplace(build_w(g, kind));
    } else {
      auto entries = wdoc.get<std::vector<double>>();
      wa.emplace(g, DenseMatrix(n, n, std::move(entries)));
    }

    Fixture f{doc.value("description", std::string{}), std::move(*wa), std::nullopt};
    if (doc.contains("y0")) {
      auto y0 = doc.at("y0").get<std::vector<double>>();
      if (y0.size() != n) throw ConfigError("fixture y0 must have n entries");
      f.y0 = std::move(y0);
    }
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed fixture: ") + e.what());
  } catch (const GraphError& e) {
    throw ConfigError(std::string("invalid fixture graph: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("invalid fixture matrix: ") + e.what());
  }
}

json fixture_to_json(const Fixture& f) {
  json doc;
  if (!f.description.empty()) doc["description"] = f.description;
  const Graph& g = f.assignment.graph;
  doc["n"] = g.node_count();
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.i, e.j});
  doc["edges"] = std::move(edges);
  doc["w"] = f.assignment.w.entries();
  if (f.y0) doc["y0"] = *f.y0;
  return doc;
}

Fixture load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse fixture " + path.string() + ": " + e.what());
  }
  return fixture_from_json(doc);
}

void save_fixture(const Fixture& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write fixture " + path.string());
  out << fixture_to_json(f).dump(2) << '\n';
}

}  // namespace netspec
