/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#ifndef SAL_CLUSTER_TRANSPORT_HPP
#define SAL_CLUSTER_TRANSPORT_HPP

#include <sal/cluster/bounded_queue.hpp>
#include <sal/cluster/partition.hpp>
#include <sal/cluster/socket.hpp>
#include <sal/engine/netflow.hpp>

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace sal::cluster {

/// Default inbox capacity in envelopes.
inline constexpr std::size_t kDefaultQueueCapacity = 10000;

/// One envelope as seen by the receiving node.
struct Delivery {
  std::size_t from = 0;
  bool terminate = false;
  std::string payload;                          // CSV line of a remote tuple
  std::optional<engine::NetflowTuple> local;    // tuple kept by its ingest node
};

using Inbox = BoundedQueue<Delivery>;

/**
 * Moves envelopes between logical nodes.  Delivery is reliable and in order
 * for each (sender, receiver) pair.  Each sender must call send from a
 * single thread.
 */
class Transport {
public:
  virtual ~Transport() = default;

  virtual std::size_t nodeCount() const noexcept = 0;

  /// Inbox of a node hosted by this process.
  virtual Inbox& inbox(std::size_t node) = 0;

  /// Sends one tuple payload.
  virtual void send(std::size_t from, std::size_t to, std::string_view payload) = 0;

  /// Sends TERMINATE after flushing everything queued for `to`.
  virtual void terminate(std::size_t from, std::size_t to) = 0;

  /// Direct enqueue of a tuple the ingest node keeps for itself.
  void keepLocal(std::size_t node, engine::NetflowTuple tuple);
  void terminateLocal(std::size_t node);
};

/// Bounded queues between nodes of one process, with the wire framing.
class InProcessTransport final : public Transport {
public:
  explicit InProcessTransport(std::size_t nodes, std::size_t capacity = kDefaultQueueCapacity);

  std::size_t nodeCount() const noexcept override { return inboxes_.size(); }
  Inbox& inbox(std::size_t node) override { return *inboxes_.at(node); }
  void send(std::size_t from, std::size_t to, std::string_view payload) override;
  void terminate(std::size_t from, std::size_t to) override;

private:
  std::vector<std::unique_ptr<Inbox>> inboxes_;
};

/**
 * Push/pull over TCP.  Every hosted node listens on its pull port; a sender
 * opens one push connection per peer on first use, announces itself with
 * a "SAL-HELLO <id>" frame and then streams frames.  TERMINATE closes the
 * push side.  A reader thread per accepted connection decodes frames into
 * the receiver's inbox.
 */
class TcpTransport final : public Transport {
public:
  TcpTransport(NodeTopology topology, std::vector<std::size_t> hosted,
               std::size_t capacity = kDefaultQueueCapacity, RetryPolicy retry = {});
  ~TcpTransport() override;

  std::size_t nodeCount() const noexcept override { return topology_.size(); }
  Inbox& inbox(std::size_t node) override;
  void send(std::size_t from, std::size_t to, std::string_view payload) override;
  void terminate(std::size_t from, std::size_t to) override;

  /// Pull port of a node; the bound port for hosted nodes.
  std::uint16_t port(std::size_t node) const;

  /// CPU seconds spent by the reader threads of a hosted node.
  double readerCpuSeconds(std::size_t node) const;

  /// First error seen by a reader thread, if any.
  std::optional<std::string> readerError() const;

private:
  struct Hosted;
  struct Push {
    Socket socket;
    std::string buffer;
    bool closed = false;
  };

  Hosted* hostedNode(std::size_t node) const;
  Push& pushFor(std::size_t from, std::size_t to);
  void flush(Push& push);
  void acceptLoop(Hosted& node);
  void readLoop(Hosted& node, Socket socket);

  NodeTopology topology_;
  RetryPolicy retry_;
  std::vector<std::unique_ptr<Hosted>> hosted_;
  std::vector<std::vector<std::unique_ptr<Push>>> pushes_;  // [from][to]
  mutable std::mutex errorMutex_;
  std::optional<std::string> readerError_;
};

/// Per-thread CPU time of the calling thread, in seconds.
double threadCpuSeconds();

} // namespace sal::cluster

#endif
