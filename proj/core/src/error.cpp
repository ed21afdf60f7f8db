#include "uavgen/error.hpp"

namespace uavgen {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_file: return "malformed_file";
    case ErrorKind::unknown_category: return "unknown_category";
    case ErrorKind::dangling_image_ref: return "dangling_image_ref";
    case ErrorKind::class_not_fitted: return "class_not_fitted";
    case ErrorKind::alpha_out_of_range: return "alpha_out_of_range";
    case ErrorKind::embedding_missing: return "embedding_missing";
    case ErrorKind::missing_prototype_class: return "missing_prototype_class";
    case ErrorKind::box_outside_canvas: return "box_outside_canvas";
    case ErrorKind::empty_layout: return "empty_layout";
    case ErrorKind::window_larger_than_image: return "window_larger_than_image";
    case ErrorKind::window_out_of_bounds: return "window_out_of_bounds";
    case ErrorKind::command_not_found: return "command_not_found";
    case ErrorKind::malformed_results: return "malformed_results";
    case ErrorKind::background_size_mismatch: return "background_size_mismatch";
    case ErrorKind::patch_larger_than_canvas: return "patch_larger_than_canvas";
    case ErrorKind::missing_patch: return "missing_patch";
    case ErrorKind::size_mismatch: return "size_mismatch";
    case ErrorKind::overlap_in_mosaic_plan: return "overlap_in_mosaic_plan";
    case ErrorKind::config_error: return "config_error";
    case ErrorKind::io_error: return "io_error";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

bool is_user_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_file:
    case ErrorKind::unknown_category:
    case ErrorKind::dangling_image_ref:
    case ErrorKind::alpha_out_of_range:
    case ErrorKind::embedding_missing:
    case ErrorKind::command_not_found:
    case ErrorKind::config_error:
    case ErrorKind::io_error:
      return true;
    default:
      return false;
  }
}

}  // namespace uavgen
