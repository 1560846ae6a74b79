#include "cvzk/transcript.hpp"

#include <json.hpp>

#include <sstream>

namespace cvzk::transcript {

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back(kB64[v & 63]);
  }
  size_t rem = bytes.size() - i;
  if (rem == 1) {
    uint32_t v = bytes[i] << 16;
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    if (c == '=') return -1;
    throw std::invalid_argument("bad base64 character");
  };
  std::vector<uint8_t> out;
  uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    int v = val(c);
    if (v < 0) break;
    acc = (acc << 6) | uint32_t(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(uint8_t((acc >> bits) & 0xff));
    }
  }
  return out;
}

const char* tag_name(proto::MsgTag tag) {
  switch (tag) {
    case proto::MsgTag::ProverKeyCommit: return "prover_key_commit";
    case proto::MsgTag::CoinCommit: return "coin_commit";
    case proto::MsgTag::ProverCoins: return "prover_coins";
    case proto::MsgTag::EtcffKeys: return "etcff_keys";
    case proto::MsgTag::CommitStrings: return "commit_strings";
    case proto::MsgTag::RoundChoice: return "round_choice";
    case proto::MsgTag::TestReveal: return "test_reveal";
    case proto::MsgTag::HadamardReveal: return "hadamard_reveal";
    case proto::MsgTag::VerifierOpen: return "verifier_open";
    case proto::MsgTag::NpzkMsg: return "npzk";
    case proto::MsgTag::Abort: return "abort";
    case proto::MsgTag::Verdict: return "verdict";
  }
  return "unknown";
}

std::string to_jsonl(const std::vector<std::pair<bool, proto::ProtocolMessage>>& msgs) {
  std::ostringstream os;
  for (const auto& [prover_sent, msg] : msgs) {
    nlohmann::json line;
    line["dir"] = prover_sent ? "p2v" : "v2p";
    line["frame"] = base64_encode(proto::frame_encode(msg));
    line["seq"] = msg.seq;
    line["session"] = msg.session_id;
    line["tag"] = tag_name(msg.tag());
    os << line.dump() << "\n";
  }
  return os.str();
}

std::vector<Entry> from_jsonl(const std::string& text) {
  std::vector<Entry> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    Entry e;
    e.prover_sent = j.at("dir").get<std::string>() == "p2v";
    e.msg = proto::frame_decode(base64_decode(j.at("frame").get<std::string>()));
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> diff(const std::string& jsonl_a, const std::string& jsonl_b) {
  std::vector<std::string> report;
  std::istringstream ia(jsonl_a), ib(jsonl_b);
  std::string la, lb;
  size_t line = 0;
  while (true) {
    bool ga = bool(std::getline(ia, la));
    bool gb = bool(std::getline(ib, lb));
    ++line;
    if (!ga && !gb) break;
    if (ga != gb) {
      report.push_back("line " + std::to_string(line) + ": length mismatch (" +
                       (ga ? "b" : "a") + " ended first)");
      break;
    }
    if (la != lb) {
      std::string detail;
      try {
        auto ja = nlohmann::json::parse(la);
        auto jb = nlohmann::json::parse(lb);
        for (const char* key : {"dir", "tag", "seq", "session"})
          if (ja.at(key) != jb.at(key))
            detail += std::string(" ") + key + ": " + ja.at(key).dump() + " vs " +
                      jb.at(key).dump();
        if (detail.empty()) detail = " payload bytes differ";
      } catch (const std::exception&) {
        detail = " unparseable line";
      }
      report.push_back("line " + std::to_string(line) + ":" + detail);
    }
  }
  return report;
}

}  // namespace cvzk::transcript
