#include "eaia/protocol/wire.hpp"

#include <array>
#include <string>
#include <vector>

#include "eaia/error.hpp"

namespace eaia::protocol {

namespace {

enum class Width { Id, Point, N, Scalar, Tag, Time };

struct FieldDef {
  std::string_view name;
  Width width;
};

const std::vector<FieldDef>& layout(MessageType type) {
  static const std::vector<FieldDef> kAuth{{"id", Width::Id}, {"pub_sum", Width::Point}};
  static const std::vector<FieldDef> kChallenge{
      {"B", Width::Point}, {"N", Width::N}, {"sigma", Width::Scalar}, {"T_a", Width::Time}};
  static const std::vector<FieldDef> kResponse{
      {"D", Width::Point}, {"eta", Width::Tag}, {"T_b", Width::Time}};
  static const std::vector<FieldDef> kUpdateReq{{"sigma", Width::Scalar}, {"B", Width::Point},
                                                {"A", Width::Point},      {"id", Width::Id},
                                                {"R", Width::Point},      {"T", Width::Time}};
  static const std::vector<FieldDef> kUpdateReply{{"Q", Width::Id}, {"T_c", Width::Time}};
  switch (type) {
    case MessageType::AuthRequest: return kAuth;
    case MessageType::Challenge: return kChallenge;
    case MessageType::Response: return kResponse;
    case MessageType::PseudonymUpdateRequest: return kUpdateReq;
    case MessageType::PseudonymUpdateReply: return kUpdateReply;
  }
  throw std::logic_error("unhandled message type");
}

std::size_t width_of(Width w, const WireProfile& p) {
  switch (w) {
    case Width::Id: return p.id_bytes;
    case Width::Point: return p.point_bytes;
    case Width::N: return p.n_bytes();
    case Width::Scalar: return p.scalar_bytes;
    case Width::Tag: return p.tag_bytes;
    case Width::Time: return kTimestampBytes;
  }
  return 0;
}

class Writer {
 public:
  explicit Writer(MessageType type) { out_.push_back(static_cast<std::uint8_t>(type)); }

  void field(ByteView value) {
    if (value.size() > 0xffff) throw std::length_error("wire field exceeds 65535 bytes");
    out_.push_back(++tag_);
    out_.push_back(static_cast<std::uint8_t>(value.size() >> 8));
    out_.push_back(static_cast<std::uint8_t>(value.size() & 0xff));
    append(out_, value);
  }
  void field(Timestamp t) { field(be64(t.ms)); }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
  std::uint8_t tag_ = 0;
};

class Reader {
 public:
  Reader(ByteView data, MessageType type, const WireProfile& profile)
      : data_(data), fields_(layout(type)), profile_(profile) {}

  Bytes next() {
    if (index_ >= fields_.size()) fail(ErrorKind::MalformedMessage, "too many fields");
    const FieldDef& def = fields_[index_];
    if (pos_ + kFieldHeaderBytes > data_.size()) {
      fail(ErrorKind::MalformedMessage, "truncated header of field " + std::string(def.name));
    }
    const std::uint8_t tag = data_[pos_];
    if (tag != index_ + 1) {
      fail(ErrorKind::MalformedMessage, "unexpected field tag " + std::to_string(tag));
    }
    const std::size_t len = (std::size_t{data_[pos_ + 1]} << 8) | data_[pos_ + 2];
    pos_ += kFieldHeaderBytes;
    const std::size_t expected = width_of(def.width, profile_);
    if (len != expected) {
      fail(ErrorKind::MalformedMessage, "field " + std::string(def.name) + " has width " +
                                            std::to_string(len) + ", expected " +
                                            std::to_string(expected));
    }
    if (pos_ + len > data_.size()) {
      fail(ErrorKind::MalformedMessage, "truncated field " + std::string(def.name));
    }
    Bytes value(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                data_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
    pos_ += len;
    ++index_;
    return value;
  }

  Timestamp next_time() { return Timestamp{read_be64(next())}; }
  Pseudonym next_id() { return Pseudonym::from_bytes(next()); }

  void finish() const {
    if (index_ != fields_.size()) fail(ErrorKind::MalformedMessage, "missing fields");
    if (pos_ != data_.size()) fail(ErrorKind::MalformedMessage, "trailing bytes");
  }

 private:
  ByteView data_;
  const std::vector<FieldDef>& fields_;
  const WireProfile& profile_;
  std::size_t pos_ = 1;
  std::size_t index_ = 0;
};

}  // namespace

std::string_view to_string(MessageType type) {
  switch (type) {
    case MessageType::AuthRequest: return "AuthRequest";
    case MessageType::Challenge: return "ChallengeMsg";
    case MessageType::Response: return "ResponseMsg";
    case MessageType::PseudonymUpdateRequest: return "PseudonymUpdateRequest";
    case MessageType::PseudonymUpdateReply: return "PseudonymUpdateReply";
  }
  return "Unknown";
}

MessageType type_of(const Message& msg) {
  struct Visitor {
    MessageType operator()(const AuthRequest&) const { return MessageType::AuthRequest; }
    MessageType operator()(const ChallengeMsg&) const { return MessageType::Challenge; }
    MessageType operator()(const ResponseMsg&) const { return MessageType::Response; }
    MessageType operator()(const PseudonymUpdateRequest&) const {
      return MessageType::PseudonymUpdateRequest;
    }
    MessageType operator()(const PseudonymUpdateReply&) const {
      return MessageType::PseudonymUpdateReply;
    }
  };
  return std::visit(Visitor{}, msg);
}

WireProfile WireProfile::from(const group::SystemParams& params) {
  WireProfile p;
  p.point_bytes = params.g().point_bytes();
  p.scalar_bytes = params.g().scalar_bytes();
  p.tag_bytes = params.tag_bits / 8;
  p.id_bytes = params.mask_bits / 8;
  return p;
}

Bytes encode_message(const Message& msg) {
  Writer w(type_of(msg));
  if (const auto* m = std::get_if<AuthRequest>(&msg)) {
    w.field(m->requester_id.view());
    w.field(m->requester_pub_sum);
  } else if (const auto* m = std::get_if<ChallengeMsg>(&msg)) {
    w.field(m->B);
    w.field(m->N);
    w.field(m->sigma);
    w.field(m->t_a);
  } else if (const auto* m = std::get_if<ResponseMsg>(&msg)) {
    w.field(m->D);
    w.field(m->eta);
    w.field(m->t_b);
  } else if (const auto* m = std::get_if<PseudonymUpdateRequest>(&msg)) {
    w.field(m->sigma);
    w.field(m->B);
    w.field(m->A);
    w.field(m->id.view());
    w.field(m->R);
    w.field(m->t);
  } else if (const auto* m = std::get_if<PseudonymUpdateReply>(&msg)) {
    w.field(m->Q);
    w.field(m->t_c);
  }
  return w.take();
}

std::optional<MessageType> peek_type(ByteView frame) {
  if (frame.empty()) return std::nullopt;
  const std::uint8_t t = frame[0];
  if (t < 0x10 || t > 0x14) return std::nullopt;
  return static_cast<MessageType>(t);
}

Message decode_message(ByteView data, const WireProfile& profile) {
  const auto type = peek_type(data);
  if (!type) {
    fail(ErrorKind::MalformedMessage,
         data.empty() ? "empty frame" : "unknown message type " + std::to_string(data[0]));
  }
  Reader r(data, *type, profile);
  Message out;
  switch (*type) {
    case MessageType::AuthRequest: {
      AuthRequest m;
      m.requester_id = r.next_id();
      m.requester_pub_sum = r.next();
      out = std::move(m);
      break;
    }
    case MessageType::Challenge: {
      ChallengeMsg m;
      m.B = r.next();
      m.N = r.next();
      m.sigma = r.next();
      m.t_a = r.next_time();
      out = std::move(m);
      break;
    }
    case MessageType::Response: {
      ResponseMsg m;
      m.D = r.next();
      m.eta = r.next();
      m.t_b = r.next_time();
      out = std::move(m);
      break;
    }
    case MessageType::PseudonymUpdateRequest: {
      PseudonymUpdateRequest m;
      m.sigma = r.next();
      m.B = r.next();
      m.A = r.next();
      m.id = r.next_id();
      m.R = r.next();
      m.t = r.next_time();
      out = std::move(m);
      break;
    }
    case MessageType::PseudonymUpdateReply: {
      PseudonymUpdateReply m;
      m.Q = r.next();
      m.t_c = r.next_time();
      out = std::move(m);
      break;
    }
  }
  r.finish();
  return out;
}

std::size_t encoded_size(MessageType type, const WireProfile& profile) {
  std::size_t total = 1;
  for (const FieldDef& f : layout(type)) total += kFieldHeaderBytes + width_of(f.width, profile);
  return total;
}

std::optional<FieldSpan> locate_field(ByteView frame, std::uint8_t tag) {
  std::size_t pos = 1;
  while (pos + kFieldHeaderBytes <= frame.size()) {
    const std::size_t len = (std::size_t{frame[pos + 1]} << 8) | frame[pos + 2];
    if (pos + kFieldHeaderBytes + len > frame.size()) return std::nullopt;
    if (frame[pos] == tag) return FieldSpan{pos + kFieldHeaderBytes, len};
    pos += kFieldHeaderBytes + len;
  }
  return std::nullopt;
}

std::optional<std::uint8_t> field_tag(MessageType type, std::string_view field) {
  const auto& fields = layout(type);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == field) return static_cast<std::uint8_t>(i + 1);
  }
  return std::nullopt;
}

}  // namespace eaia::protocol
