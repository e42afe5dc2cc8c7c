#pragma once

// Area covers: sorted, disjoint, merged trixel id ranges at one depth whose
// union contains the area. Classification is conservative: Partial may be
// reported where Full or Disjoint holds, never the reverse.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "skyserver/area.hpp"
#include "skyserver/htm.hpp"

namespace sky {

enum class Coverage { Full, Partial, Disjoint };

class CoverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxCoverRanges = 100000;
inline constexpr int kMinDefaultCoverDepth = 6;
inline constexpr int kMaxDefaultCoverDepth = 14;

Coverage classify(const Trixel& t, const Area& a);
Coverage classify(HtmId t, const Area& a);

/// Depth used when neither the area nor the caller picks one: the shallowest
/// depth whose trixel scale is at most a quarter of the area's radius,
/// clamped to [6, 14]. Convexes use their smallest bounding cap.
int default_cover_depth(const Area& a);

/// Depth resolution: declared depth, then `depth`, then default_cover_depth.
/// Throws std::out_of_range for a depth outside [0, 20] and CoverError when
/// more than kMaxCoverRanges ranges would be emitted.
std::vector<TrixelRange> cover(const Area& a, std::optional<int> depth = std::nullopt);

/// The same ranges expressed at a deeper depth.
std::vector<TrixelRange> lift_ranges(std::span<const TrixelRange> ranges, int target_depth);

/// True when ranges are sorted, disjoint and non-adjacent.
bool is_canonical(std::span<const TrixelRange> ranges);

/// Single-pass merge of canonical ranges with an ascending id stream,
/// returning the ids that fall inside some range. Throws std::invalid_argument
/// when either input is out of order.
std::vector<std::uint64_t> join_ranges(std::span<const TrixelRange> ranges,
                                       std::span<const std::uint64_t> sorted_ids);

}  // namespace sky
