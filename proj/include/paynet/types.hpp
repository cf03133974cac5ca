#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace paynet {

// Ordered risk class. L < M < H; NA sorts last and is never part of the order.
enum class Rating : std::uint8_t { L = 0, M = 1, H = 2, NA = 3 };

inline constexpr std::array<Rating, 3> kKnownRatings{Rating::L, Rating::M, Rating::H};
inline constexpr std::array<Rating, 4> kAllRatings{Rating::L, Rating::M, Rating::H, Rating::NA};

constexpr std::size_t index_of(Rating r) { return static_cast<std::size_t>(r); }
constexpr bool is_known(Rating r) { return r != Rating::NA; }

std::string_view to_string(Rating r);
Rating parse_rating(std::string_view text);

enum class Status : std::uint8_t { customer, former, non_customer, unknown };

std::string_view to_string(Status s);
Status parse_status(std::string_view text);

struct FirmMeta {
  std::string id;
  Status status = Status::unknown;
  Rating rating = Rating::NA;
  std::optional<std::string> sector;

  bool operator==(const FirmMeta&) const = default;
};

// Error taxonomy. The CLI maps each kind onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Bad configuration or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage ran without the artifacts of the stage it depends on.
class DependencyError : public Error {
 public:
  using Error::Error;
};

// Inputs for which a quantity is mathematically undefined.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace paynet
