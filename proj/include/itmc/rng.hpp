#pragma once

#include <cstdint>
#include <random>

namespace itmc {

using Engine = std::mt19937_64;

/// Immutable descriptor of a reproducible random stream.
///
/// A stream is identified by (seed, stream id). Generators are instantiated
/// locally via engine(), so a single RngStream can be shared freely between
/// threads. Child streams are derived with substream(); the derivation hashes
/// the parent identity, so sibling streams with distinct ids are independent
/// for practical purposes and the tree of streams does not depend on the
/// order in which children are requested.
class RngStream {
 public:
  constexpr RngStream() = default;
  constexpr RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {}

  constexpr std::uint64_t seed() const { return seed_; }
  constexpr std::uint64_t stream_id() const { return stream_id_; }

  Engine engine() const;

  RngStream substream(std::uint64_t child_id) const;

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace itmc
