#include "dbfuzz/common/hash.hpp"

#include <array>

namespace dbfuzz {

std::string to_hex(std::uint64_t value) {
  static constexpr std::array<char, 16> kDigits = {'0', '1', '2', '3', '4', '5', '6', '7',
                                                   '8', '9', 'a', 'b', 'c', 'd', 'e', 'f'};
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string stable_uuid(std::string_view data) {
  const std::string hi = to_hex(fnv1a64(data));
  const std::string lo = to_hex(fnv1a64(data, fnv1a64(hi)));
  const std::string hex = hi + lo;
  return hex.substr(0, 8) + "-" + hex.substr(8, 4) + "-" + hex.substr(12, 4) + "-" + hex.substr(16, 4) + "-" +
         hex.substr(20, 12);
}

}  // namespace dbfuzz
