#include "cvzk/protocol.hpp"

namespace cvzk::proto {

namespace {

constexpr char kMagic[4] = {'C', 'V', 'Z', 'K'};

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t(v >> 8));
}
void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}
void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));
}
void put_bytes(std::vector<uint8_t>& out, const std::vector<uint8_t>& b) {
  put_u32(out, uint32_t(b.size()));
  out.insert(out.end(), b.begin(), b.end());
}
void put_bits(std::vector<uint8_t>& out, const BitVec& v) {
  put_u32(out, uint32_t(v.size()));
  out.insert(out.end(), v.bytes().begin(), v.bytes().end());
}
void put_bytes_list(std::vector<uint8_t>& out,
                    const std::vector<std::vector<uint8_t>>& list) {
  put_u32(out, uint32_t(list.size()));
  for (const auto& b : list) put_bytes(out, b);
}
void put_reveals(std::vector<uint8_t>& out, const std::vector<RevealItem>& items) {
  put_u32(out, uint32_t(items.size()));
  for (const auto& it : items) {
    out.push_back(it.beta ? 1 : 0);
    put_bits(out, it.x);
  }
}

struct Reader {
  const std::vector<uint8_t>& buf;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > buf.size()) throw MalformedFrame("truncated frame");
  }
  uint8_t u8() {
    need(1);
    return buf[pos++];
  }
  uint16_t u16() { return uint16_t(u8()) | (uint16_t(u8()) << 8); }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(u8()) << (8 * i);
    return v;
  }
  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(u8()) << (8 * i);
    return v;
  }
  std::vector<uint8_t> bytes() {
    uint32_t n = u32();
    need(n);
    std::vector<uint8_t> out(buf.begin() + pos, buf.begin() + pos + n);
    pos += n;
    return out;
  }
  BitVec bits() {
    uint32_t n = u32();
    size_t nb = (n + 7) / 8;
    need(nb);
    std::vector<uint8_t> data(buf.begin() + pos, buf.begin() + pos + nb);
    pos += nb;
    return BitVec(std::move(data), n);
  }
  std::vector<std::vector<uint8_t>> bytes_list() {
    std::vector<std::vector<uint8_t>> out(u32());
    for (auto& b : out) b = bytes();
    return out;
  }
  std::vector<RevealItem> reveals() {
    std::vector<RevealItem> out(u32());
    for (auto& it : out) {
      it.beta = u8() != 0;
      it.x = bits();
    }
    return out;
  }
};

}  // namespace

std::vector<uint8_t> serialize_modvec(const etcff::ModVec& v) {
  std::vector<uint8_t> out;
  out.push_back(1);  // version
  put_u32(out, uint32_t(v.size()));
  for (auto x : v) put_u32(out, uint32_t(x));
  return out;
}

etcff::ModVec deserialize_modvec(const std::vector<uint8_t>& bytes) {
  Reader r{bytes};
  if (r.u8() != 1) throw MalformedFrame("bad modvec version");
  etcff::ModVec v(r.u32());
  for (auto& x : v) x = r.u32();
  return v;
}

std::vector<uint8_t> frame_encode(const ProtocolMessage& msg) {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kWireVersion);
  put_u64(out, msg.session_id);
  put_u32(out, msg.seq);
  out.push_back(uint8_t(msg.tag()));
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, ProverKeyCommit>) {
          put_bytes(out, body.z);
        } else if constexpr (std::is_same_v<T, CoinCommit>) {
          put_bytes(out, body.c);
        } else if constexpr (std::is_same_v<T, ProverCoins>) {
          put_bits(out, body.r_p);
        } else if constexpr (std::is_same_v<T, EtcffKeys>) {
          put_bytes_list(out, body.keys);
        } else if constexpr (std::is_same_v<T, CommitStrings>) {
          put_bytes_list(out, body.ys);
        } else if constexpr (std::is_same_v<T, RoundChoice>) {
          out.push_back(body.hadamard ? 1 : 0);
        } else if constexpr (std::is_same_v<T, TestReveal>) {
          put_reveals(out, body.items);
        } else if constexpr (std::is_same_v<T, HadamardReveal>) {
          put_reveals(out, body.items);
        } else if constexpr (std::is_same_v<T, VerifierOpen>) {
          put_bits(out, body.r_v);
          put_bits(out, body.s_v);
          put_bits(out, body.outcomes);
          put_bytes_list(out, body.trapdoors);
        } else if constexpr (std::is_same_v<T, NpzkMsg>) {
          out.push_back(uint8_t(body.sub));
          put_bytes_list(out, body.payload);
        } else if constexpr (std::is_same_v<T, Abort>) {
          put_u16(out, uint16_t(body.reason));
          put_u32(out, uint32_t(body.text.size()));
          out.insert(out.end(), body.text.begin(), body.text.end());
        } else if constexpr (std::is_same_v<T, Verdict>) {
          out.push_back(body.accept ? 1 : 0);
        }
      },
      msg.body);
  return out;
}

ProtocolMessage frame_decode(const std::vector<uint8_t>& bytes) {
  Reader r{bytes};
  r.need(4);
  for (int i = 0; i < 4; ++i)
    if (r.u8() != uint8_t(kMagic[i])) throw MalformedFrame("bad magic");
  uint8_t version = r.u8();
  if (version != kWireVersion)
    throw VersionMismatch("wire version " + std::to_string(version));
  ProtocolMessage msg;
  msg.session_id = r.u64();
  msg.seq = r.u32();
  uint8_t tag = r.u8();
  switch (MsgTag(tag)) {
    case MsgTag::ProverKeyCommit: msg.body = ProverKeyCommit{r.bytes()}; break;
    case MsgTag::CoinCommit: msg.body = CoinCommit{r.bytes()}; break;
    case MsgTag::ProverCoins: msg.body = ProverCoins{r.bits()}; break;
    case MsgTag::EtcffKeys: msg.body = EtcffKeys{r.bytes_list()}; break;
    case MsgTag::CommitStrings: msg.body = CommitStrings{r.bytes_list()}; break;
    case MsgTag::RoundChoice: msg.body = RoundChoice{r.u8() != 0}; break;
    case MsgTag::TestReveal: msg.body = TestReveal{r.reveals()}; break;
    case MsgTag::HadamardReveal: msg.body = HadamardReveal{r.reveals()}; break;
    case MsgTag::VerifierOpen: {
      VerifierOpen body;
      body.r_v = r.bits();
      body.s_v = r.bits();
      body.outcomes = r.bits();
      body.trapdoors = r.bytes_list();
      msg.body = std::move(body);
      break;
    }
    case MsgTag::NpzkMsg: {
      NpzkMsg body;
      body.sub = NpzkSub(r.u8());
      body.payload = r.bytes_list();
      msg.body = std::move(body);
      break;
    }
    case MsgTag::Abort: {
      Abort body;
      body.reason = AbortReason(r.u16());
      uint32_t len = r.u32();
      r.need(len);
      body.text.assign(r.buf.begin() + r.pos, r.buf.begin() + r.pos + len);
      r.pos += len;
      msg.body = std::move(body);
      break;
    }
    case MsgTag::Verdict: msg.body = Verdict{r.u8() != 0}; break;
    default: throw MalformedFrame("unknown tag " + std::to_string(tag));
  }
  if (r.pos != bytes.size()) throw MalformedFrame("trailing bytes");
  return msg;
}

}  // namespace cvzk::proto
