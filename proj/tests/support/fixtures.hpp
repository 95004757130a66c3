#pragma once

#include <memory>
#include <string>

#include "cayrs/linkage.hpp"
#include "cayrs/linkage_io.hpp"

inline std::string dataPath(const std::string& name) { return std::string(CAYRS_TEST_DATA) + "/" + name; }

inline std::shared_ptr<const cayrs::TDLinkage> loadFixture(const std::string& name) {
  return cayrs::TDLinkage::create(cayrs::loadLinkage(dataPath(name)));
}
