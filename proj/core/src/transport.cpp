#include "cvzk/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

namespace cvzk::proto {

namespace {

struct Channel {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::vector<uint8_t>> frames;
  bool closed = false;

  void push(std::vector<uint8_t> frame) {
    {
      std::lock_guard<std::mutex> lock(mu);
      frames.push_back(std::move(frame));
    }
    cv.notify_one();
  }
  std::optional<std::vector<uint8_t>> pop() {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return !frames.empty() || closed; });
    if (frames.empty()) return std::nullopt;
    auto frame = std::move(frames.front());
    frames.pop_front();
    return frame;
  }
  void close() {
    {
      std::lock_guard<std::mutex> lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class QueueEndpoint : public Transport {
 public:
  QueueEndpoint(std::shared_ptr<Channel> tx, std::shared_ptr<Channel> rx)
      : tx_(std::move(tx)), rx_(std::move(rx)) {}
  ~QueueEndpoint() override { close(); }

  void send(const ProtocolMessage& msg) override { tx_->push(frame_encode(msg)); }
  std::optional<ProtocolMessage> receive() override {
    auto frame = rx_->pop();
    if (!frame) return std::nullopt;
    return frame_decode(*frame);
  }
  void close() override {
    tx_->close();
    rx_->close();
  }

 private:
  std::shared_ptr<Channel> tx_, rx_;
};

class TcpEndpoint : public Transport {
 public:
  explicit TcpEndpoint(int fd) : fd_(fd) {}
  ~TcpEndpoint() override { close(); }

  void send(const ProtocolMessage& msg) override {
    auto frame = frame_encode(msg);
    uint8_t header[4];
    for (int i = 0; i < 4; ++i) header[i] = uint8_t(frame.size() >> (8 * i));
    write_all(header, 4);
    write_all(frame.data(), frame.size());
  }

  std::optional<ProtocolMessage> receive() override {
    uint8_t header[4];
    if (!read_all(header, 4)) return std::nullopt;
    uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= uint32_t(header[i]) << (8 * i);
    if (len > (64u << 20)) throw MalformedFrame("oversized record");
    std::vector<uint8_t> frame(len);
    if (!read_all(frame.data(), len)) return std::nullopt;
    return frame_decode(frame);
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  void write_all(const uint8_t* data, size_t len) {
    size_t off = 0;
    while (off < len) {
      ssize_t n = ::send(fd_, data + off, len - off, MSG_NOSIGNAL);
      if (n <= 0) throw WireError("tcp send failed");
      off += size_t(n);
    }
  }
  bool read_all(uint8_t* data, size_t len) {
    size_t off = 0;
    while (off < len) {
      ssize_t n = ::recv(fd_, data + off, len - off, 0);
      if (n == 0) return false;
      if (n < 0) throw WireError("tcp recv failed");
      off += size_t(n);
    }
    return true;
  }

  int fd_;
};

}  // namespace

QueuePair make_queue_pair() {
  auto ab = std::make_shared<Channel>();
  auto ba = std::make_shared<Channel>();
  QueuePair pair;
  pair.a = std::make_unique<QueueEndpoint>(ab, ba);
  pair.b = std::make_unique<QueueEndpoint>(ba, ab);
  return pair;
}

TcpListener::TcpListener(uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw WireError("socket failed");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    throw WireError("bind failed");
  if (::listen(fd_, 4) != 0) throw WireError("listen failed");
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept() {
  int client = ::accept(fd_, nullptr, nullptr);
  if (client < 0) throw WireError("accept failed");
  return std::make_unique<TcpEndpoint>(client);
}

std::unique_ptr<Transport> tcp_connect(const std::string& host, uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw WireError("socket failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw WireError("bad address " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw WireError("connect failed");
  }
  return std::make_unique<TcpEndpoint>(fd);
}

}  // namespace cvzk::proto
