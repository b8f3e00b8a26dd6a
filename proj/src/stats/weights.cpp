#include <string>

#include "coco/errors.hpp"
#include "coco/stats.hpp"

namespace coco {

ClassWeights class_weights(std::span<const std::size_t> counts) {
  if (counts.empty()) throw InputDomainError("class weights need at least one class");
  ClassWeights w;
  w.counts.assign(counts.begin(), counts.end());
  double total = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw InputDomainError("class " + std::to_string(k) +
                             " has zero count; inverse frequency undefined");
    }
    total += 1.0 / static_cast<double>(counts[k]);
  }
  for (auto c : counts) w.weights.push_back((1.0 / static_cast<double>(c)) / total);
  return w;
}

}  // namespace coco
