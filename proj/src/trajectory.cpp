#include "gsa/trajectory.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace gsa {

RecordSpec RecordSpec::thinned(std::uint64_t k) {
  if (k == 0) throw InvalidArgument("thinning interval must be >= 1");
  return {Policy::Thinned, k, {}};
}

RecordSpec RecordSpec::at(std::vector<std::uint64_t> checkpoints) {
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  return {Policy::Checkpoints, 1, std::move(checkpoints)};
}

bool RecordSpec::records(std::uint64_t n, std::uint64_t horizon) const {
  switch (policy) {
    case Policy::Full:
    case Policy::ErrorsOnly:
      return true;
    case Policy::Thinned:
      return n % every == 0 || n == horizon;
    case Policy::Checkpoints:
      return std::binary_search(checkpoints.begin(), checkpoints.end(), n);
  }
  return false;
}

std::uint64_t RecordSpec::expected_count(std::uint64_t horizon) const {
  switch (policy) {
    case Policy::Full:
    case Policy::ErrorsOnly:
      return horizon + 1;
    case Policy::Thinned:
      return horizon / every + 1 + (horizon % every != 0 ? 1 : 0);
    case Policy::Checkpoints:
      return static_cast<std::uint64_t>(
          std::count_if(checkpoints.begin(), checkpoints.end(),
                        [&](std::uint64_t c) { return c <= horizon; }));
  }
  return 0;
}

void RecordSpec::validate(std::uint64_t horizon) const {
  if (policy == Policy::Thinned && every == 0) {
    throw InvalidArgument("thinning interval must be >= 1");
  }
  if (policy == Policy::Checkpoints) {
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
      throw InvalidArgument("checkpoints must be sorted");
    }
    if (!checkpoints.empty() && checkpoints.back() > horizon) {
      throw InvalidArgument(
          fmt::format("checkpoint {} exceeds horizon {}", checkpoints.back(), horizon));
    }
  }
}

const StepRecord* Trajectory::at(std::uint64_t n) const {
  auto it = std::lower_bound(records.begin(), records.end(), n,
                             [](const StepRecord& r, std::uint64_t v) { return r.n < v; });
  if (it == records.end() || it->n != n) return nullptr;
  return &*it;
}

}  // namespace gsa
