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

#ifndef SAL_CLUSTER_SOCKET_HPP
#define SAL_CLUSTER_SOCKET_HPP

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sal::cluster {

class TransportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RetryPolicy {
  std::size_t attempts = 40;
  std::chrono::milliseconds initialDelay{10};
  std::chrono::milliseconds maxDelay{500};
};

/// Owning file descriptor of a TCP socket.
class Socket {
public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(Socket const&) = delete;
  Socket& operator=(Socket const&) = delete;

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  int release() noexcept
  {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close();
  /// Half-close: no more writes.
  void shutdownWrite();
  /// Wakes a thread blocked in accept or recv on this socket.
  void shutdownBoth();

  void writeAll(std::string_view bytes);
  /// 0 on orderly shutdown by the peer.
  std::size_t readSome(char* buffer, std::size_t size);

private:
  int fd_ = -1;
};

/// shutdown(SHUT_RDWR) on a descriptor owned elsewhere.
void shutdownSocket(int fd) noexcept;

/// Listening socket bound to host:port (port 0 picks a free port).
Socket listenTcp(std::string const& host, std::uint16_t port, int backlog = 64);
std::uint16_t localPort(Socket const& socket);
/// Blocks until a peer connects; an invalid socket once the listener is shut down.
Socket acceptTcp(Socket const& listener);
/// Connects with exponential backoff; throws TransportError after the last attempt.
Socket connectTcp(std::string const& host, std::uint16_t port, RetryPolicy const& retry = {});

} // namespace sal::cluster

#endif
