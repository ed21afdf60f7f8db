#pragma once

#include <stdexcept>
#include <string>

namespace uavgen {

// Stable error categories surfaced by the CLI as machine-readable codes.
enum class ErrorKind {
  malformed_file,
  unknown_category,
  dangling_image_ref,
  class_not_fitted,
  alpha_out_of_range,
  embedding_missing,
  missing_prototype_class,
  box_outside_canvas,
  empty_layout,
  window_larger_than_image,
  window_out_of_bounds,
  command_not_found,
  malformed_results,
  background_size_mismatch,
  patch_larger_than_canvas,
  missing_patch,
  size_mismatch,
  overlap_in_mosaic_plan,
  config_error,
  io_error,
  internal,
};

const char* to_string(ErrorKind kind);

// True for errors caused by user input (bad files, bad config); the CLI
// maps these to exit code 2 and everything else to 1.
bool is_user_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace uavgen
