#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "uavgen/error.hpp"
#include "uavgen/geometry.hpp"

namespace uavgen {

struct ImageRecord {
  std::uint64_t id = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::string file_path;
};

struct Annotation {
  std::uint64_t image_id = 0;
  BBox bbox;
  std::uint32_t category_id = 0;
};

struct Detection {
  std::uint64_t image_id = 0;
  BBox bbox;
  std::uint32_t category_id = 0;
  double score = 0.0;
};

// COCO-style dataset: every annotation.image_id resolves to exactly one image.
struct Dataset {
  std::vector<ImageRecord> images;
  std::vector<Annotation> annotations;
  std::map<std::uint32_t, std::string> categories;

  const ImageRecord& image_by_id(std::uint64_t id) const {
    auto it = image_index_.find(id);
    if (it == image_index_.end()) {
      fail(ErrorKind::dangling_image_ref,
           "image id " + std::to_string(id) + " not in dataset");
    }
    return images[it->second];
  }

  bool has_image(std::uint64_t id) const {
    return image_index_.count(id) != 0;
  }

  // Rebuilds the id lookup; call after mutating `images`.
  void reindex() {
    image_index_.clear();
    for (std::size_t i = 0; i < images.size(); ++i) {
      auto [it, fresh] = image_index_.emplace(images[i].id, i);
      if (!fresh) {
        fail(ErrorKind::malformed_file,
             "duplicate image id " + std::to_string(images[i].id));
      }
    }
  }

  std::vector<const Annotation*> annotations_of(std::uint64_t image_id) const {
    std::vector<const Annotation*> out;
    for (const auto& a : annotations) {
      if (a.image_id == image_id) out.push_back(&a);
    }
    return out;
  }

 private:
  std::unordered_map<std::uint64_t, std::size_t> image_index_;
};

}  // namespace uavgen
