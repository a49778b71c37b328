#include "synthhome/vision.hpp"

#include <opencv2/imgcodecs.hpp>

#include "synthhome/error.hpp"
#include "synthhome/util.hpp"

namespace synthhome {

bool is_decodable_image(std::span<const std::uint8_t> image) {
  if (image.empty()) return false;
  const cv::Mat buf(1, static_cast<int>(image.size()), CV_8UC1, const_cast<std::uint8_t*>(image.data()));
  return !cv::imdecode(buf, cv::IMREAD_UNCHANGED).empty();
}

std::string describe_image(VisionBackend& backend, std::span<const std::uint8_t> image,
                           std::string_view prompt) {
  if (trim(prompt).empty()) throw InputError("describe_image: prompt is empty");
  if (!is_decodable_image(image)) throw InputError("describe_image: image does not decode");
  return with_retries(backend.retry_policy(), "describe_image via " + backend.id(), [&] {
    std::string text = backend.describe(image, prompt);
    if (trim(text).empty()) throw TransportError("backend returned an empty description");
    return text;
  });
}

ImageDescription describe_home(VisionBackend& backend, const HomeRecord& record,
                               const DescribePrompts& prompts) {
  if (!record.has_any_image()) {
    throw InputError("home " + record.id + " has neither a photo nor a floor plan");
  }
  ImageDescription out;
  out.backend_id = backend.id();
  if (record.photo_path) {
    out.facade_text = describe_image(backend, read_binary(*record.photo_path), prompts.facade);
  }
  if (record.floorplan_path) {
    out.floorplan_text = describe_image(backend, read_binary(*record.floorplan_path), prompts.floorplan);
  }
  return out;
}

}  // namespace synthhome
