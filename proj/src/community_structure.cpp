#include "mlcd/ensemble.hpp"

#include <algorithm>

namespace mlcd {

CommunityStructure::CommunityStructure(std::span<const CommunityId> labels)
    : labels_(labels.size(), kUncovered) {
  std::vector<CommunityId> remap;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const CommunityId c = labels[v];
    if (c == kUncovered) continue;
    if (c >= remap.size()) remap.resize(static_cast<std::size_t>(c) + 1, kUncovered);
    if (remap[c] == kUncovered) remap[c] = static_cast<CommunityId>(num_communities_++);
    labels_[v] = remap[c];
  }
}

std::size_t CommunityStructure::num_covered() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](CommunityId c) { return c != kUncovered; }));
}

std::vector<std::vector<NodeId>> CommunityStructure::communities() const {
  std::vector<std::vector<NodeId>> out(num_communities_);
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    if (labels_[v] != kUncovered) out[labels_[v]].push_back(static_cast<NodeId>(v));
  }
  return out;
}

}  // namespace mlcd
