#pragma once

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>

#include "cvzk/protocol.hpp"

namespace cvzk::proto {

/// Ordered, per-session message delivery. Adapters carry canonical wire
/// frames; decoding errors surface as exceptions on receive.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const ProtocolMessage& msg) = 0;
  /// Blocks until a message arrives; nullopt when the peer closed.
  virtual std::optional<ProtocolMessage> receive() = 0;
  virtual void close() = 0;
};

/// In-process bidirectional queue pair.
struct QueuePair {
  std::unique_ptr<Transport> a;  // endpoint held by one party
  std::unique_ptr<Transport> b;  // endpoint held by the other
};
QueuePair make_queue_pair();

/// TCP transport: one frame per length-prefixed (u32 LE) record.
class TcpListener {
 public:
  explicit TcpListener(uint16_t port);  // port 0 picks a free port
  ~TcpListener();
  uint16_t port() const { return port_; }
  std::unique_ptr<Transport> accept();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

std::unique_ptr<Transport> tcp_connect(const std::string& host, uint16_t port);

}  // namespace cvzk::proto
