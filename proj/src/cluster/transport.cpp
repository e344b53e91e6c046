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

#include <sal/cluster/transport.hpp>

#include <sal/cluster/envelope.hpp>

#include <charconv>
#include <ctime>

namespace sal::cluster {

namespace {

constexpr std::string_view kHello = "SAL-HELLO ";
constexpr std::size_t kFlushBytes = 32 * 1024;

} // namespace

double threadCpuSeconds()
{
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

void Transport::keepLocal(std::size_t node, engine::NetflowTuple tuple)
{
  Delivery d;
  d.from = node;
  d.local = std::move(tuple);
  inbox(node).push(std::move(d));
}

void Transport::terminateLocal(std::size_t node)
{
  Delivery d;
  d.from = node;
  d.terminate = true;
  inbox(node).push(std::move(d));
}

// ---------------------------------------------------------------------------

InProcessTransport::InProcessTransport(std::size_t nodes, std::size_t capacity)
{
  if (nodes == 0) throw TopologyError("a cluster needs at least one node");
  for (std::size_t i = 0; i < nodes; ++i) inboxes_.push_back(std::make_unique<Inbox>(capacity));
}

void InProcessTransport::send(std::size_t from, std::size_t to, std::string_view payload)
{
  // Frame and decode so oversized or empty payloads fail exactly as on the wire.
  std::string wire;
  appendFrame(wire, payload);
  FrameDecoder decoder;
  decoder.feed(wire);
  Delivery d;
  d.from = from;
  d.payload = std::move(decoder.next()->payload);
  inbox(to).push(std::move(d));
}

void InProcessTransport::terminate(std::size_t from, std::size_t to)
{
  Delivery d;
  d.from = from;
  d.terminate = true;
  inbox(to).push(std::move(d));
}

// ---------------------------------------------------------------------------

struct TcpTransport::Hosted {
  std::size_t id = 0;
  Socket listener;
  std::uint16_t port = 0;
  Inbox inbox;
  std::thread acceptThread;
  std::mutex readersMutex;
  std::vector<std::thread> readers;
  std::vector<int> readerFds;
  std::atomic<bool> stopping{false};
  std::atomic<std::int64_t> readerCpuNanos{0};

  explicit Hosted(std::size_t capacity) : inbox(capacity) {}
};

TcpTransport::TcpTransport(NodeTopology topology, std::vector<std::size_t> hosted, std::size_t capacity,
                           RetryPolicy retry)
    : topology_(std::move(topology)), retry_(retry)
{
  std::size_t n = topology_.size();
  hosted_.resize(n);
  pushes_.resize(n);
  for (auto& row : pushes_) row.resize(n);
  for (std::size_t id : hosted) {
    if (id >= n) throw TopologyError("hosted node " + std::to_string(id) + " is not in the topology");
    if (hosted_[id]) continue;
    auto h = std::make_unique<Hosted>(capacity);
    h->id = id;
    NodeAddress const& addr = topology_[id];
    h->listener = listenTcp(addr.host, addr.listenPort());
    h->port = localPort(h->listener);
    hosted_[id] = std::move(h);
  }
  for (auto& h : hosted_) {
    if (h) h->acceptThread = std::thread([this, node = h.get()] { acceptLoop(*node); });
  }
}

TcpTransport::~TcpTransport()
{
  for (auto& row : pushes_) {
    for (auto& push : row) {
      if (push && push->socket.valid()) push->socket.shutdownBoth();
    }
  }
  for (auto& h : hosted_) {
    if (!h) continue;
    h->stopping = true;
    h->listener.shutdownBoth();
    h->inbox.close();
  }
  for (auto& h : hosted_) {
    if (!h) continue;
    if (h->acceptThread.joinable()) h->acceptThread.join();
    std::vector<std::thread> readers;
    {
      std::lock_guard lock(h->readersMutex);
      for (int fd : h->readerFds) shutdownSocket(fd);
      readers = std::move(h->readers);
    }
    for (auto& t : readers) t.join();
  }
}

TcpTransport::Hosted* TcpTransport::hostedNode(std::size_t node) const
{
  if (node >= hosted_.size() || !hosted_[node]) {
    throw TopologyError("node " + std::to_string(node) + " is not hosted by this process");
  }
  return hosted_[node].get();
}

Inbox& TcpTransport::inbox(std::size_t node)
{
  return hostedNode(node)->inbox;
}

std::uint16_t TcpTransport::port(std::size_t node) const
{
  if (node < hosted_.size() && hosted_[node]) return hosted_[node]->port;
  return topology_[node].listenPort();
}

double TcpTransport::readerCpuSeconds(std::size_t node) const
{
  return static_cast<double>(hostedNode(node)->readerCpuNanos.load()) * 1e-9;
}

std::optional<std::string> TcpTransport::readerError() const
{
  std::lock_guard lock(errorMutex_);
  return readerError_;
}

TcpTransport::Push& TcpTransport::pushFor(std::size_t from, std::size_t to)
{
  auto& slot = pushes_.at(from).at(to);
  if (!slot) {
    auto push = std::make_unique<Push>();
    push->socket = connectTcp(topology_[to].host, port(to), retry_);
    std::string hello;
    appendFrame(hello, std::string(kHello) + std::to_string(from));
    push->socket.writeAll(hello);
    slot = std::move(push);
  }
  if (slot->closed) {
    throw TransportError("send from node " + std::to_string(from) + " to " + std::to_string(to) +
                         " after TERMINATE");
  }
  return *slot;
}

void TcpTransport::flush(Push& push)
{
  if (push.buffer.empty()) return;
  push.socket.writeAll(push.buffer);
  push.buffer.clear();
}

void TcpTransport::send(std::size_t from, std::size_t to, std::string_view payload)
{
  Push& push = pushFor(from, to);
  appendFrame(push.buffer, payload);
  if (push.buffer.size() >= kFlushBytes) flush(push);
}

void TcpTransport::terminate(std::size_t from, std::size_t to)
{
  Push& push = pushFor(from, to);
  appendTerminate(push.buffer);
  flush(push);
  push.socket.shutdownWrite();
  push.closed = true;
}

void TcpTransport::acceptLoop(Hosted& node)
{
  while (!node.stopping) {
    Socket conn = acceptTcp(node.listener);
    if (!conn.valid()) break;
    std::lock_guard lock(node.readersMutex);
    if (node.stopping) break;
    node.readerFds.push_back(conn.fd());
    node.readers.emplace_back([this, &node, s = std::move(conn)]() mutable { readLoop(node, std::move(s)); });
  }
}

void TcpTransport::readLoop(Hosted& node, Socket socket)
{
  FrameDecoder decoder;
  std::optional<std::size_t> from;
  bool terminated = false;
  std::string error;
  char buffer[64 * 1024];
  try {
    while (!terminated) {
      std::optional<Frame> frame = decoder.next();
      if (!frame) {
        std::size_t n = socket.readSome(buffer, sizeof buffer);
        if (n == 0) break;
        decoder.feed(buffer, n);
        continue;
      }
      if (!from) {
        std::string_view p = frame->payload;
        std::size_t id = 0;
        if (p.substr(0, kHello.size()) != kHello ||
            std::from_chars(p.data() + kHello.size(), p.data() + p.size(), id).ec != std::errc{} ||
            id >= topology_.size()) {
          throw FrameError("bad handshake on node " + std::to_string(node.id));
        }
        from = id;
        continue;
      }
      Delivery d;
      d.from = *from;
      d.terminate = frame->terminate();
      d.payload = std::move(frame->payload);
      terminated = d.terminate;
      if (terminated) {
        // Account CPU before the receiver can observe the end of the stream.
        node.readerCpuNanos += static_cast<std::int64_t>(threadCpuSeconds() * 1e9);
      }
      if (!node.inbox.push(std::move(d))) break;
    }
    if (!terminated && from && !node.stopping) {
      error = "connection from node " + std::to_string(*from) + " to node " + std::to_string(node.id) +
              " closed before TERMINATE";
    }
  } catch (std::exception const& e) {
    if (!node.stopping) error = e.what();
  }
  if (!error.empty()) {
    {
      std::lock_guard lock(errorMutex_);
      if (!readerError_) readerError_ = error;
    }
    // Unblock the receiver; the run reports the error afterwards.
    if (from) {
      Delivery d;
      d.from = *from;
      d.terminate = true;
      node.inbox.push(std::move(d));
    }
  }
  {
    std::lock_guard lock(node.readersMutex);
    std::erase(node.readerFds, socket.fd());
  }
  if (!terminated) node.readerCpuNanos += static_cast<std::int64_t>(threadCpuSeconds() * 1e9);
}

} // namespace sal::cluster
