#pragma once

// Byte-buffer aliases, error types, big-endian codec and small time/hex
// helpers shared by every stage of the pipeline.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sift {

// Byte buffers are std::string throughout: cheap substring search, usable as
// map keys, and unsigned-byte ordering via char_traits.
using Bytes = std::string;
using ByteView = std::string_view;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed on-disk or on-wire bytes. The message names the offending field.
class FormatError : public Error {
public:
    using Error::Error;
};

// Invalid argument or configuration value.
class ArgError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// --- big-endian scalar codec -------------------------------------------------

void put_u16(Bytes& out, std::uint16_t v);
void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);

// Each getter advances `off` past the value and throws FormatError
// ("truncated <field>") when fewer bytes remain than needed.
std::uint16_t get_u16(ByteView in, std::size_t& off, const char* field);
std::uint32_t get_u32(ByteView in, std::size_t& off, const char* field);
std::uint64_t get_u64(ByteView in, std::size_t& off, const char* field);
Bytes get_bytes(ByteView in, std::size_t& off, std::size_t n, const char* field);

// --- hex ---------------------------------------------------------------------

std::string to_hex(ByteView bytes);          // lowercase, two digits per byte
Bytes from_hex(std::string_view hex);        // throws FormatError on odd length / bad digit

// --- time --------------------------------------------------------------------

std::uint64_t now_unix_seconds();
// "2026-08-23T17:04:05Z"
std::string iso8601_utc(std::uint64_t unix_seconds);

// --- logging -----------------------------------------------------------------

// Plain stderr lines; the services must keep running through input errors, so
// they report through these instead of throwing past the loop.
void log_info(const std::string& msg);
void log_warn(const std::string& msg);
void log_error(const std::string& msg);

} // namespace sift
