#include "paynet/types.hpp"

namespace paynet {

std::string_view to_string(Rating r) {
  switch (r) {
    case Rating::L: return "L";
    case Rating::M: return "M";
    case Rating::H: return "H";
    case Rating::NA: return "NA";
  }
  return "NA";
}

Rating parse_rating(std::string_view text) {
  if (text == "L") return Rating::L;
  if (text == "M") return Rating::M;
  if (text == "H") return Rating::H;
  if (text == "NA" || text.empty()) return Rating::NA;
  throw DataError("unknown rating '" + std::string(text) + "'");
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::customer: return "customer";
    case Status::former: return "former";
    case Status::non_customer: return "non";
    case Status::unknown: return "NA";
  }
  return "NA";
}

Status parse_status(std::string_view text) {
  if (text == "customer") return Status::customer;
  if (text == "former") return Status::former;
  if (text == "non" || text == "non-customer") return Status::non_customer;
  if (text == "NA" || text == "unknown" || text.empty()) return Status::unknown;
  throw DataError("unknown customer status '" + std::string(text) + "'");
}

}  // namespace paynet
