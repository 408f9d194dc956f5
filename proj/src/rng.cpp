#include "itmc/rng.hpp"

#include <array>

namespace itmc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Engine RngStream::engine() const {
  const std::uint64_t a = splitmix64(seed_);
  const std::uint64_t b = splitmix64(stream_id_ ^ 0x5851f42d4c957f2dULL);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Engine(seq);
}

RngStream RngStream::substream(std::uint64_t child_id) const {
  return {splitmix64(splitmix64(seed_) ^ (stream_id_ + 0x632be59bd9b4e019ULL)), child_id};
}

}  // namespace itmc
