#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace incwcet {

using BlockId = int64_t;

class DimensionMismatchError : public std::invalid_argument {
 public:
  explicit DimensionMismatchError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Direct-mapped instruction cache: one block per set, block -> block mod sets.
struct CacheConfig {
  int num_sets = 128;
  uint64_t hit_cost = 0;
  uint64_t miss_penalty = 128;

  int set_of(BlockId b) const { return static_cast<int>(b % num_sets); }
};

// Exact cache contents along one concrete path. -1 marks an empty line.
class ConcreteCacheState {
 public:
  ConcreteCacheState() = default;
  explicit ConcreteCacheState(int num_sets)
      : line_(static_cast<size_t>(num_sets), kEmpty) {}

  int num_sets() const { return static_cast<int>(line_.size()); }
  BlockId line(int set) const { return line_[static_cast<size_t>(set)]; }
  bool resident(BlockId b, const CacheConfig& cfg) const {
    return line_[static_cast<size_t>(cfg.set_of(b))] == b;
  }
  // Returns the access cost and installs the block on a miss.
  uint64_t access(BlockId b, const CacheConfig& cfg);

  static constexpr BlockId kEmpty = -1;

  friend bool operator==(const ConcreteCacheState&, const ConcreteCacheState&) =
      default;

 private:
  std::vector<BlockId> line_;
};

// Must-cache: per set, either a block known resident on every path or
// unknown (-1). More knowledge is lower in the order.
class AbstractCacheState {
 public:
  AbstractCacheState() = default;
  explicit AbstractCacheState(int num_sets)
      : line_(static_cast<size_t>(num_sets), kUnknown) {}

  // A fully known concrete state abstracts to itself: every resident block
  // is known resident, empty lines carry no guarantee.
  static AbstractCacheState from_concrete(const ConcreteCacheState& c);

  int num_sets() const { return static_cast<int>(line_.size()); }
  BlockId line(int set) const { return line_[static_cast<size_t>(set)]; }
  bool known(BlockId b, const CacheConfig& cfg) const {
    return line_[static_cast<size_t>(cfg.set_of(b))] == b;
  }
  void set_known(int set, BlockId b) { line_[static_cast<size_t>(set)] = b; }
  // Worst-case access cost; afterwards the block is known resident.
  uint64_t access(BlockId b, const CacheConfig& cfg);

  static constexpr BlockId kUnknown = -1;

  friend bool operator==(const AbstractCacheState&, const AbstractCacheState&) =
      default;

 private:
  std::vector<BlockId> line_;
};

// Per-set intersection: the most precise state both inputs guarantee.
AbstractCacheState abstract_join(const AbstractCacheState& a,
                                 const AbstractCacheState& b);

// a <= b iff a knows everything b knows.
bool leq(const AbstractCacheState& a, const AbstractCacheState& b);

}  // namespace incwcet
