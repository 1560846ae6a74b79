#pragma once

#include <string>
#include <vector>

#include "cvzk/protocol.hpp"

namespace cvzk::transcript {

std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(const std::string& text);

const char* tag_name(proto::MsgTag tag);

/// One JSONL line per message: session, seq, direction, tag, and the
/// base64 payload of the canonical wire frame.
std::string to_jsonl(const std::vector<std::pair<bool, proto::ProtocolMessage>>& msgs);

struct Entry {
  bool prover_sent = false;
  proto::ProtocolMessage msg;
};

std::vector<Entry> from_jsonl(const std::string& text);

/// Structural diff for the transcript-diff tool: returns human-readable
/// mismatch lines (empty when identical).
std::vector<std::string> diff(const std::string& jsonl_a, const std::string& jsonl_b);

}  // namespace cvzk::transcript
