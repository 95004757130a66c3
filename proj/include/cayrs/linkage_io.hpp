#pragma once

#include <filesystem>
#include <string>

#include "cayrs/linkage.hpp"
#include "json.hpp"

namespace cayrs {

/// Reads the linkage document: `vertices`, `bars` ({u, v, length}),
/// optional `clusters` ({coords: {vertex: [x, y]}, anchors: [u, v]}) and
/// optional `baseNonedge` ([u, v]). Throws InvalidLinkage on schema errors.
LinkageSpec parseLinkage(const nlohmann::json& doc);
LinkageSpec parseLinkage(const std::string& text);
LinkageSpec loadLinkage(const std::filesystem::path& path);

nlohmann::json toJson(const LinkageSpec& spec);

}  // namespace cayrs
