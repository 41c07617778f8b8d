#pragma once

#include <cstddef>
#include <memory>

#include "eaia/group/group.hpp"

namespace eaia::group {

// Public system parameters published by the authority.
struct SystemParams {
  std::shared_ptr<const Group> group;
  GroupPoint p_pub;
  std::size_t session_key_bits = 256;  // l
  std::size_t tag_bits = 256;          // lambda
  std::size_t mask_bits = 256;         // w, pseudonym width

  const Group& g() const { return *group; }

  // Throws InvalidArgument on widths that are not positive multiples of 8 or
  // a mask width other than 256, and MalformedPoint if p_pub is not a
  // subgroup point.
  void validate() const;
};

}  // namespace eaia::group
