#include "evsg/core/triplet.hpp"

#include <cctype>

#include "evsg/core/errors.hpp"

namespace evsg {

std::string normalize_label(const std::string& raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
  std::string out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
  }
  return out;
}

Triplet Triplet::make(std::string subject, std::string relation, std::string object) {
  Triplet t{normalize_label(subject), normalize_label(relation), normalize_label(object)};
  if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
    throw DataError("triplet fields must be non-empty after trimming: <" + t.subject +
                    ", " + t.relation + ", " + t.object + ">");
  }
  return t;
}

std::string Triplet::text() const {
  return "<" + subject + ", " + relation + ", " + object + ">";
}

}  // namespace evsg
