#pragma once

// Named constants for photo flags, photo object types, spectral classes and
// spectral line names. The shipped data/dictionary.csv mirrors builtin().

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sky {

enum class DictKind { PhotoFlag, PhotoType, SpecClass, SpecLineName };

std::string_view to_string(DictKind k);
DictKind dict_kind_from_string(std::string_view s);

class UnknownName : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DictEntry {
  DictKind kind;
  std::string name;
  std::uint64_t value;
  std::string description;
};

class Dictionary {
 public:
  static const Dictionary& builtin();

  /// Reads `kind,name,value,description` rows after a header; lines starting
  /// with '#' are comments. Throws std::runtime_error on malformed input,
  /// duplicate (kind, name) pairs, or photo flags that are not distinct single bits.
  static Dictionary read_csv(std::istream& in);
  void write_csv(std::ostream& out) const;

  explicit Dictionary(std::vector<DictEntry> entries);

  /// Case-insensitive; '-' and '_' are interchangeable. Throws UnknownName.
  std::uint64_t value(DictKind kind, std::string_view name) const;
  std::optional<std::string> name_of(DictKind kind, std::uint64_t value) const;

  const std::vector<DictEntry>& entries() const { return entries_; }
  bool operator==(const Dictionary& o) const;

 private:
  std::vector<DictEntry> entries_;
};

inline std::uint64_t flag_value(std::string_view name) {
  return Dictionary::builtin().value(DictKind::PhotoFlag, name);
}
inline int type_value(std::string_view name) {
  return static_cast<int>(Dictionary::builtin().value(DictKind::PhotoType, name));
}
inline int spec_class_value(std::string_view name) {
  return static_cast<int>(Dictionary::builtin().value(DictKind::SpecClass, name));
}
inline int line_name_value(std::string_view name) {
  return static_cast<int>(Dictionary::builtin().value(DictKind::SpecLineName, name));
}

namespace photo_type {
inline constexpr int kUnknown = 0;
inline constexpr int kCosmicRay = 1;
inline constexpr int kDefect = 2;
inline constexpr int kGalaxy = 3;
inline constexpr int kGhost = 4;
inline constexpr int kKnownObj = 5;
inline constexpr int kStar = 6;
inline constexpr int kTrail = 7;
inline constexpr int kSky = 8;
}  // namespace photo_type

namespace spec_class {
inline constexpr int kUnknown = 0;
inline constexpr int kStar = 1;
inline constexpr int kGalaxy = 2;
inline constexpr int kQso = 3;
inline constexpr int kHizQso = 4;
inline constexpr int kSky = 5;
inline constexpr int kStarLate = 6;
inline constexpr int kGalEm = 7;
}  // namespace spec_class

namespace line_id {
inline constexpr int kUnknown = 0;
inline constexpr int kLya = 1216;
inline constexpr int kCIV = 1549;
inline constexpr int kMgII = 2799;
inline constexpr int kOII = 3727;
inline constexpr int kHb = 4863;
inline constexpr int kOIII = 5008;
inline constexpr int kHa = 6565;
}  // namespace line_id

namespace flag {
inline constexpr std::uint64_t kEdge = 0x4;
inline constexpr std::uint64_t kBlended = 0x8;
inline constexpr std::uint64_t kChild = 0x10;
inline constexpr std::uint64_t kNoDeblend = 0x40;
inline constexpr std::uint64_t kSaturated = 0x40000;
inline constexpr std::uint64_t kBinned1 = 0x10000000;
inline constexpr std::uint64_t kBinned2 = 0x20000000;
inline constexpr std::uint64_t kBinned4 = 0x40000000;
inline constexpr std::uint64_t kPrimary = 1ull << 32;
inline constexpr std::uint64_t kSecondary = 1ull << 33;
}  // namespace flag

}  // namespace sky
