#pragma once

#include <cstddef>
#include <exception>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cayrs/cayley_space.hpp"
#include "cayrs/motion.hpp"
#include "cayrs/tolerances.hpp"

namespace httplib {
class Server;
}

namespace cayrs {

/// Everything derived from one uploaded linkage. Immutable once published.
struct Analysis {
  std::string id;
  std::shared_ptr<const TDLinkage> linkage;
  /// Null when the configuration space cannot be built; `ccsError` says why.
  std::shared_ptr<const CayleyConfigSpace> ccs;
  std::exception_ptr ccsError;
  std::vector<ContinuousMotion> components;
  std::vector<std::string> warnings;
};

struct Response {
  int status = 200;
  std::string body;
  std::string contentType = "application/json";
};

/// Request router over an in-memory LRU of analyzed linkages. Thread-safe;
/// each distinct upload is analyzed once.
class Service {
 public:
  explicit Service(std::size_t capacity = 64, Tolerances tol = {});

  Response handle(const std::string& method, const std::string& path,
                  const std::multimap<std::string, std::string>& query, const std::string& body);

  /// Parses and analyzes `linkageText` (optionally with a base override
  /// "u,v"), reusing the cached entry for identical content.
  std::shared_ptr<const Analysis> analyze(const std::string& linkageText, const std::string& base = "");
  std::shared_ptr<const Analysis> lookup(const std::string& id);

  std::size_t cachedCount() const;
  /// Number of analyses actually computed (cache misses).
  std::size_t analysisCount() const;

  /// Blocks serving HTTP on host:port.
  bool listen(const std::string& host, int port);
  /// Binds without serving yet; port 0 picks a free port. Returns the bound
  /// port or -1.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop().
  bool serve();
  void stop();

 private:
  using Entry = std::shared_future<std::shared_ptr<const Analysis>>;

  /// Existing entry, or a new one whose promise the caller must fulfil.
  Entry entryFor(const std::string& id, std::promise<std::shared_ptr<const Analysis>>*& promise);
  void touch(const std::string& id);

  std::size_t capacity_;
  Tolerances tol_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
  std::map<std::string, std::promise<std::shared_ptr<const Analysis>>> pending_;
  std::list<std::string> recency_;
  std::size_t analyses_ = 0;
  std::shared_ptr<httplib::Server> server_;
};

}  // namespace cayrs
