#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "synthhome/backend.hpp"
#include "synthhome/domain.hpp"

namespace synthhome {

inline constexpr std::string_view kFacadePrompt =
    "You are a certified home inspector. Describe the status roof. Is it in good condition? "
    "Why or why not?";
inline constexpr std::string_view kFloorplanPrompt =
    "You are a certified home inspector. Describe the layout, rooms, and approximate geometry "
    "shown in this floor plan.";

struct DescribePrompts {
  std::string facade{kFacadePrompt};
  std::string floorplan{kFloorplanPrompt};
};

// True if the bytes decode to a raster image.
bool is_decodable_image(std::span<const std::uint8_t> image);

// Sends one image to the backend, retrying transport failures per the
// backend's policy. Throws InputError for an empty prompt or undecodable
// image, BackendError once retries are exhausted.
std::string describe_image(VisionBackend& backend, std::span<const std::uint8_t> image,
                           std::string_view prompt);

// Describes the photo (facade prompt) and floor plan (geometry prompt).
// A missing image yields an empty text. Throws InputError if the record has
// neither image.
ImageDescription describe_home(VisionBackend& backend, const HomeRecord& record,
                               const DescribePrompts& prompts = {});

}  // namespace synthhome
