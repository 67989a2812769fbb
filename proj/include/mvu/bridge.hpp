#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"
#include "mvu/harness.hpp"

namespace mvu {

// Page nodes as JSON for a browser. Elements carry their node id, plain
// attributes are rendered as strings, and handler attributes become
// {eventName, payloadType} entries; handler bodies are never sent.
nlohmann::json page_to_json(const PagePtr& d);
// {"revision": r, "children": [...]}
nlohmann::json page_snapshot(const PagePtr& d, std::uint64_t revision);

// A running program shared between HTTP handlers. The revision starts at 0
// for the empty page and goes up exactly when the erased page changes,
// including intermediate renders while the program settles, so a client
// following the stream sees every page the program showed.
class Bridge {
 public:
  Bridge(const LinkedProgram& p, RunOptions options);
  ~Bridge();

  nlohmann::json snapshot();
  // Model, quiescence classification and step count.
  nlohmann::json status();
  // Body as in a trace record. Every event is validated before any is
  // injected, so a rejected body leaves the configuration unchanged.
  // Throws InjectionError.
  nlohmann::json post_event(const nlohmann::json& body);
  std::uint64_t revision();
  // Waits until the revision exceeds `seen`; false on timeout.
  bool wait_for_change(std::uint64_t seen, std::chrono::milliseconds timeout);
  // Snapshot with the smallest revision above `seen`, or the oldest kept.
  nlohmann::json snapshot_after(std::uint64_t seen);

  // GET /snapshot, GET /status, POST /event, GET /events (server-sent
  // snapshots).
  // Port 0 picks a free port. Blocks until stop().
  void serve(const std::string& host, int port);
  // Port actually bound once serving; 0 before.
  int port() const { return bound_port_; }
  void wait_until_serving();
  void stop();

 private:
  void bump_locked();
  RunOptions hooked(RunOptions options);

  std::mutex mu_;
  std::condition_variable changed_;
  Runner runner_;
  std::uint64_t revision_ = 0;
  std::string last_page_;
  std::map<std::uint64_t, nlohmann::json> history_;  // recent snapshots by revision
  std::atomic<bool> stopping_ = false;
  std::atomic<int> bound_port_ = 0;
  struct Server;
  std::unique_ptr<Server> server_;
};

}  // namespace mvu
