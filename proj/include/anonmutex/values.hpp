#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "anonmutex/error.hpp"

namespace anonmutex {

/// Opaque process identifier. Programs can only test two identifiers for
/// equality; there is no ordering or arithmetic on the public surface.
/// `token()` exists for serialization and hashing by the harness.
class ProcessId {
 public:
  ProcessId() = default;
  explicit ProcessId(std::uint32_t token) : token_(token) {
    if (token == 0) throw Error(ErrorKind::InvalidArgument, "process identifiers are positive");
  }

  friend bool operator==(ProcessId a, ProcessId b) noexcept { return a.token_ == b.token_; }

  bool valid() const noexcept { return token_ != 0; }
  std::uint32_t token() const noexcept { return token_; }

 private:
  std::uint32_t token_ = 0;
};

/// Contents of one anonymous register: free (0), the waiting literal, or an
/// identifier.
class RegisterValue {
 public:
  enum class Kind : std::uint8_t { Free, Waiting, Owned };

  constexpr RegisterValue() = default;

  static constexpr RegisterValue free() { return RegisterValue(); }
  static constexpr RegisterValue waiting() {
    RegisterValue v;
    v.kind_ = Kind::Waiting;
    return v;
  }
  static RegisterValue owned(ProcessId id) {
    RegisterValue v;
    v.kind_ = Kind::Owned;
    v.owner_ = id;
    return v;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_free() const noexcept { return kind_ == Kind::Free; }
  bool is_waiting() const noexcept { return kind_ == Kind::Waiting; }
  bool is_id() const noexcept { return kind_ == Kind::Owned; }
  bool is(ProcessId id) const noexcept { return kind_ == Kind::Owned && owner_ == id; }
  ProcessId owner() const noexcept { return owner_; }

  friend bool operator==(const RegisterValue& a, const RegisterValue& b) noexcept {
    return a.kind_ == b.kind_ && a.owner_ == b.owner_;
  }

 private:
  Kind kind_ = Kind::Free;
  ProcessId owner_;
};

/// Wire token: `0`, `W`, or `id:<n>`.
inline std::string to_token(const RegisterValue& v) {
  switch (v.kind()) {
    case RegisterValue::Kind::Free: return "0";
    case RegisterValue::Kind::Waiting: return "W";
    case RegisterValue::Kind::Owned: return "id:" + std::to_string(v.owner().token());
  }
  return "?";
}

inline RegisterValue value_from_token(const std::string& token) {
  if (token == "0") return RegisterValue::free();
  if (token == "W") return RegisterValue::waiting();
  if (token.rfind("id:", 0) == 0 && token.size() > 3) {
    try {
      unsigned long n = std::stoul(token.substr(3));
      return RegisterValue::owned(ProcessId(static_cast<std::uint32_t>(n)));
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorKind::Parse, "bad register value token '" + token + "'");
}

}  // namespace anonmutex

template <>
struct std::hash<anonmutex::ProcessId> {
  std::size_t operator()(anonmutex::ProcessId id) const noexcept { return id.token(); }
};
