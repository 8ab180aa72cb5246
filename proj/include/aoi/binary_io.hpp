#pragma once

// Little-endian fixed-width record helpers for the versioned binary files.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "aoi/errors.hpp"

namespace aoi::binary {

static_assert(std::endian::native == std::endian::little, "binary formats assume little-endian hosts");

template <typename T>
  requires std::is_arithmetic_v<T>
void put(std::ostream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
  requires std::is_arithmetic_v<T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw ConfigError("binary file truncated");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

inline void put_string(std::ostream& out, std::string_view s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  if (n > (1u << 24)) throw ConfigError("binary file has an implausible string length");
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) throw ConfigError("binary file truncated");
  return s;
}

inline void expect_magic(std::istream& in, std::string_view magic) {
  std::string got(magic.size(), '\0');
  if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic) {
    throw ConfigError("not a " + std::string(magic) + " file");
  }
}

}  // namespace aoi::binary
