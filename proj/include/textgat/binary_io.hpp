#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "textgat/error.hpp"

// Fixed little-endian encoding shared by the graph and checkpoint formats.
namespace textgat::binary {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(std::string_view b) { out_.write(b.data(), static_cast<std::streamsize>(b.size())); }
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u64(s.size());
    bytes(s);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  std::string bytes(std::size_t n) {
    std::string b(n, '\0');
    in_.read(b.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("unexpected end of data");
    return b;
  }
  std::uint8_t u8() {
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) fail("unexpected end of data");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t max_len = 1u << 24) {
    std::uint64_t n = u64();
    if (n > max_len) fail("string length out of range");
    return bytes(static_cast<std::size_t>(n));
  }
  // Reads a count and rejects values above `max`.
  std::uint64_t count(std::uint64_t max, const char* field) {
    std::uint64_t n = u64();
    if (n > max) fail(std::string(field) + " out of range");
    return n;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  [[noreturn]] void fail(const std::string& msg) const { throw Error(what_ + ": " + msg); }

 private:
  std::istream& in_;
  std::string what_;
};

}  // namespace textgat::binary
