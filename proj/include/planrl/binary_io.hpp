// Copyright 2026 The planrl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "planrl/common.hpp"

// Little-endian scalar encoding, independent of host byte order.
namespace planrl::io {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes.data(), 8);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes{};
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes.data(), 4);
}

inline void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw UsageError("truncated binary stream");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

inline std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 4);
  if (!in) throw UsageError("truncated binary stream");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

inline std::uint8_t get_u8(std::istream& in) {
  const int c = in.get();
  if (c == std::char_traits<char>::eof()) throw UsageError("truncated binary stream");
  return static_cast<std::uint8_t>(c);
}

inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

inline std::string get_string(std::istream& in) {
  const std::uint32_t n = get_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw UsageError("truncated binary stream");
  return s;
}

}  // namespace planrl::io
