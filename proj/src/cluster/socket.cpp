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

#include <sal/cluster/socket.hpp>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <thread>

namespace sal::cluster {

namespace {

std::string errorText(std::string_view what)
{
  return std::string(what) + ": " + std::strerror(errno);
}

sockaddr_in resolve(std::string const& host, std::uint16_t port)
{
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (host.empty() || host == "*" || host == "0.0.0.0") {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    return addr;
  }
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &result) != 0 || !result) {
    throw TransportError("cannot resolve host '" + host + "'");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(result->ai_addr)->sin_addr;
  freeaddrinfo(result);
  return addr;
}

} // namespace

Socket::~Socket()
{
  close();
}

Socket& Socket::operator=(Socket&& other) noexcept
{
  if (this != &other) {
    close();
    fd_ = other.release();
  }
  return *this;
}

void Socket::close()
{
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void Socket::shutdownWrite()
{
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

void Socket::shutdownBoth()
{
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::writeAll(std::string_view bytes)
{
  while (!bytes.empty()) {
    ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errorText("send failed"));
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::size_t Socket::readSome(char* buffer, std::size_t size)
{
  while (true) {
    ssize_t n = ::recv(fd_, buffer, size, 0);
    if (n >= 0) return static_cast<std::size_t>(n);
    if (errno == EINTR) continue;
    throw TransportError(errorText("recv failed"));
  }
}

void shutdownSocket(int fd) noexcept
{
  if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
}

Socket listenTcp(std::string const& host, std::uint16_t port, int backlog)
{
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw TransportError(errorText("socket"));
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = resolve(host, port);
  if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw TransportError(errorText("cannot listen on " + host + ":" + std::to_string(port)));
  }
  if (::listen(s.fd(), backlog) != 0) throw TransportError(errorText("listen"));
  return s;
}

std::uint16_t localPort(Socket const& socket)
{
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  if (::getsockname(socket.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw TransportError(errorText("getsockname"));
  }
  return ntohs(addr.sin_port);
}

Socket acceptTcp(Socket const& listener)
{
  while (true) {
    int fd = ::accept(listener.fd(), nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Socket(fd);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return Socket();
  }
}

Socket connectTcp(std::string const& host, std::uint16_t port, RetryPolicy const& retry)
{
  sockaddr_in addr = resolve(host, port);
  auto delay = retry.initialDelay;
  std::string lastError;
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, retry.attempts); ++attempt) {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) throw TransportError(errorText("socket"));
    if (::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return s;
    }
    lastError = std::strerror(errno);
    std::this_thread::sleep_for(delay);
    delay = std::min(retry.maxDelay, delay * 2);
  }
  throw TransportError("cannot connect to " + host + ":" + std::to_string(port) + " after " +
                       std::to_string(retry.attempts) + " attempts: " + lastError);
}

} // namespace sal::cluster
