#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

/// Ordered set of action labels. Index i always maps to the same action.
class ActionSet {
 public:
  explicit ActionSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw Error("action set needs at least 2 actions");
    std::unordered_set<std::string_view> seen;
    for (const auto& l : labels_) {
      if (l.empty()) throw Error("action labels must be non-empty");
      if (!seen.insert(l).second) throw Error("duplicate action label: " + l);
    }
  }

  static ActionSet binary() { return ActionSet({"buy", "sell"}); }
  static ActionSet ternary() { return ActionSet({"buy", "hold", "sell"}); }

  Index size() const { return static_cast<Index>(labels_.size()); }

  const std::string& label(Index i) const {
    if (i < 0 || i >= size()) throw UnknownAction("action index out of range");
    return labels_[static_cast<size_t>(i)];
  }

  Index index_of(std::string_view label) const {
    for (size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return static_cast<Index>(i);
    }
    throw UnknownAction("unknown action: " + std::string(label));
  }

  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const ActionSet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
};

}  // namespace qrse
