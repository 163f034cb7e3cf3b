#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace patrol {

// FNV-1a, used for scenario fingerprints and stream checksums.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ull;
    }
  }

  void update_u32(std::uint32_t v) { update(&v, sizeof v); }
  void update_u64(std::uint64_t v) { update(&v, sizeof v); }
  void update_i32(std::int32_t v) { update(&v, sizeof v); }

  void update_f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    update_u64(bits);
  }

  void update_str(std::string_view s) {
    update_u64(s.size());
    update(s.data(), s.size());
  }

  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ull;
};

}  // namespace patrol
