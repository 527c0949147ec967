#include "incwcet/cache.hpp"

namespace incwcet {

uint64_t ConcreteCacheState::access(BlockId b, const CacheConfig& cfg) {
  auto& slot = line_[static_cast<size_t>(cfg.set_of(b))];
  if (slot == b) return cfg.hit_cost;
  slot = b;
  return cfg.miss_penalty;
}

AbstractCacheState AbstractCacheState::from_concrete(const ConcreteCacheState& c) {
  AbstractCacheState a(c.num_sets());
  for (int s = 0; s < c.num_sets(); ++s)
    if (c.line(s) != ConcreteCacheState::kEmpty) a.set_known(s, c.line(s));
  return a;
}

uint64_t AbstractCacheState::access(BlockId b, const CacheConfig& cfg) {
  auto& slot = line_[static_cast<size_t>(cfg.set_of(b))];
  uint64_t cost = slot == b ? cfg.hit_cost : cfg.miss_penalty;
  slot = b;
  return cost;
}

AbstractCacheState abstract_join(const AbstractCacheState& a,
                                 const AbstractCacheState& b) {
  if (a.num_sets() != b.num_sets())
    throw DimensionMismatchError("abstract_join: differing set counts");
  AbstractCacheState out(a.num_sets());
  for (int i = 0; i < a.num_sets(); ++i)
    if (a.line(i) == b.line(i)) out.set_known(i, a.line(i));
  return out;
}

bool leq(const AbstractCacheState& a, const AbstractCacheState& b) {
  if (a.num_sets() != b.num_sets())
    throw DimensionMismatchError("leq: differing set counts");
  for (int i = 0; i < a.num_sets(); ++i)
    if (b.line(i) != AbstractCacheState::kUnknown && a.line(i) != b.line(i))
      return false;
  return true;
}

}  // namespace incwcet
