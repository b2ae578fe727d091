#pragma once

#include <compare>
#include <string>

namespace evsg {

// <subject, relation, object> relation inside one event. Labels are trimmed
// and lowercase-normalized (ASCII) at construction; all three must be
// non-empty after trimming.
struct Triplet {
  std::string subject;
  std::string relation;
  std::string object;

  // Throws DataError when any field is empty after trimming.
  static Triplet make(std::string subject, std::string relation, std::string object);

  bool operator==(const Triplet&) const = default;
  auto operator<=>(const Triplet&) const = default;

  std::string text() const;  // "<subject, relation, object>"
};

// ASCII trim + lowercase used for label normalization.
std::string normalize_label(const std::string& raw);

}  // namespace evsg
