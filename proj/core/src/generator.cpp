#include "uavgen/generator.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "uavgen/coco_io.hpp"
#include "uavgen/error.hpp"
#include "uavgen/png_io.hpp"

namespace uavgen {

using nlohmann::json;

namespace {

std::vector<std::string> tokenize_command(const std::string& command) {
  std::vector<std::string> tokens;
  std::istringstream in(command);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  if (tokens.empty()) {
    fail(ErrorKind::command_not_found, "empty generator command");
  }
  return tokens;
}

bool is_executable(const std::string& path) {
  return ::access(path.c_str(), X_OK) == 0;
}

void check_command_exists(const std::string& exe) {
  if (exe.find('/') != std::string::npos) {
    if (!is_executable(exe)) {
      fail(ErrorKind::command_not_found, exe + " is not executable");
    }
    return;
  }
  const char* path_env = std::getenv("PATH");
  if (!path_env) fail(ErrorKind::command_not_found, exe + " not found (no PATH)");
  std::istringstream paths(path_env);
  std::string dir;
  while (std::getline(paths, dir, ':')) {
    if (!dir.empty() && is_executable(dir + "/" + exe)) return;
  }
  fail(ErrorKind::command_not_found, exe + " not found in PATH");
}

void write_request_manifest(const std::vector<GenerationRequest>& requests,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path);
  for (const auto& r : requests) {
    out << json{{"patch_id", r.patch_id},
                {"bundle_manifest", r.bundle_manifest},
                {"output_path", r.output_path}}
               .dump()
        << "\n";
  }
}

pid_t spawn(const std::vector<std::string>& argv_tokens,
            const std::string& manifest, const std::string& results) {
  std::vector<std::string> argv_store = argv_tokens;
  argv_store.push_back(manifest);
  argv_store.push_back(results);
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) fail(ErrorKind::internal, "fork failed");
  if (pid == 0) {
    ::execvp(argv[0], argv.data());
    _exit(127);
  }
  return pid;
}

struct BatchState {
  std::size_t first = 0;  // request range [first, last)
  std::size_t last = 0;
  std::string manifest_path;
  std::string results_path;
  pid_t pid = -1;
  std::chrono::steady_clock::time_point deadline;
  bool done = false;
  int exit_code = 0;
  bool timed_out = false;
};

// Parses one results manifest into patch_id -> (ok, reason, image_path).
std::map<std::string, GenerationResult> parse_results(const std::string& path) {
  std::map<std::string, GenerationResult> out;
  std::ifstream in(path);
  if (!in) return out;  // absent file: every request stays pending
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
      GenerationResult r;
      r.patch_id = rec.at("patch_id").get<std::string>();
      const std::string status = rec.at("status").get<std::string>();
      if (status == "ok") {
        r.ok = true;
        r.image_path = rec.at("image_path").get<std::string>();
      } else if (status == "failed") {
        r.ok = false;
        r.reason = rec.value("reason", "unspecified");
      } else {
        fail(ErrorKind::malformed_results, "bad status '" + status + "'");
      }
      out[r.patch_id] = std::move(r);
    } catch (const json::exception& e) {
      fail(ErrorKind::malformed_results,
           path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// Canvas size recorded in the bundle manifest, for output validation.
std::pair<std::uint32_t, std::uint32_t> bundle_canvas(
    const std::string& manifest_path) {
  const json manifest = load_json(manifest_path);
  return {manifest.at("canvas").at(0).get<std::uint32_t>(),
          manifest.at("canvas").at(1).get<std::uint32_t>()};
}

}  // namespace

std::vector<GenerationResult> run_external(
    const std::vector<GenerationRequest>& requests, const std::string& command,
    std::uint32_t parallelism, std::uint32_t timeout_s,
    const std::string& work_dir) {
  if (parallelism < 1) parallelism = 1;
  const std::vector<std::string> tokens = tokenize_command(command);
  check_command_exists(tokens[0]);

  std::filesystem::create_directories(work_dir);
  write_request_manifest(requests, work_dir + "/requests.jsonl");
  if (requests.empty()) {
    std::ofstream(work_dir + "/results.jsonl");
    return {};
  }

  // Contiguous batches, one child each, all concurrent (batch count is
  // capped by parallelism).
  const std::size_t n_batches =
      std::min<std::size_t>(parallelism, requests.size());
  std::vector<BatchState> batches(n_batches);
  const std::size_t base = requests.size() / n_batches;
  const std::size_t extra = requests.size() % n_batches;
  std::size_t cursor = 0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    BatchState& st = batches[b];
    st.first = cursor;
    st.last = cursor + base + (b < extra ? 1 : 0);
    cursor = st.last;
    st.manifest_path = work_dir + "/batch_" + std::to_string(b) + ".requests.jsonl";
    st.results_path = work_dir + "/batch_" + std::to_string(b) + ".results.jsonl";
    write_request_manifest(
        {requests.begin() + st.first, requests.begin() + st.last},
        st.manifest_path);
  }

  const auto now = std::chrono::steady_clock::now();
  for (auto& st : batches) {
    st.pid = spawn(tokens, st.manifest_path, st.results_path);
    // The per-request budget accumulates over the batch.
    st.deadline = now + std::chrono::seconds(static_cast<long>(timeout_s) *
                                             static_cast<long>(st.last - st.first));
  }

  std::size_t remaining = batches.size();
  while (remaining > 0) {
    for (auto& st : batches) {
      if (st.done) continue;
      int status = 0;
      const pid_t r = ::waitpid(st.pid, &status, WNOHANG);
      if (r == st.pid) {
        st.done = true;
        st.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
        --remaining;
      } else if (std::chrono::steady_clock::now() >= st.deadline) {
        ::kill(st.pid, SIGKILL);
        ::waitpid(st.pid, &status, 0);
        st.done = true;
        st.timed_out = true;
        --remaining;
      }
    }
    if (remaining > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }

  std::vector<GenerationResult> results(requests.size());
  for (const auto& st : batches) {
    const auto reported = parse_results(st.results_path);
    for (std::size_t i = st.first; i < st.last; ++i) {
      const GenerationRequest& req = requests[i];
      GenerationResult res;
      res.patch_id = req.patch_id;
      auto it = reported.find(req.patch_id);
      if (it != reported.end()) {
        res = it->second;
      } else if (st.timed_out) {
        res.reason = "timeout";
      } else if (st.exit_code != 0) {
        res.reason = "exit " + std::to_string(st.exit_code);
      } else {
        res.reason = "missing result";
      }
      if (res.ok) {
        // Validate the claimed output: it must exist and, when the bundle is
        // readable, match the canvas size.
        if (!std::filesystem::exists(res.image_path)) {
          res.ok = false;
          res.reason = "missing output";
          res.image_path.clear();
        } else {
          try {
            const RasterImage img = read_png(res.image_path);
            const auto [cw, ch] = bundle_canvas(req.bundle_manifest);
            if (img.width != cw || img.height != ch) {
              res.ok = false;
              res.reason = "output size mismatch";
              res.image_path.clear();
            }
          } catch (const Error&) {
            res.ok = false;
            res.reason = "unreadable output";
            res.image_path.clear();
          }
        }
      }
      results[i] = std::move(res);
    }
  }

  std::ofstream out(work_dir + "/results.jsonl");
  for (const auto& r : results) {
    json rec{{"patch_id", r.patch_id}, {"status", r.ok ? "ok" : "failed"}};
    if (r.ok) {
      rec["image_path"] = r.image_path;
    } else {
      rec["reason"] = r.reason;
    }
    out << rec.dump() << "\n";
  }
  return results;
}

Background Background::parse(const std::string& text) {
  Background bg;
  if (text.empty() || text == "zero") {
    bg.kind = Kind::zero;
    return bg;
  }
  if (text.rfind("solid:", 0) == 0) {
    bg.kind = Kind::solid;
    int r = 0, g = 0, b = 0;
    if (std::sscanf(text.c_str() + 6, "%d,%d,%d", &r, &g, &b) != 3 ||
        r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
      fail(ErrorKind::config_error, "background solid wants 'solid:R,G,B'");
    }
    bg.rgb[0] = static_cast<std::uint8_t>(r);
    bg.rgb[1] = static_cast<std::uint8_t>(g);
    bg.rgb[2] = static_cast<std::uint8_t>(b);
    return bg;
  }
  if (text.rfind("image:", 0) == 0) {
    bg.kind = Kind::image;
    bg.image_path = text.substr(6);
    return bg;
  }
  fail(ErrorKind::config_error, "unknown background '" + text + "'");
}

RasterImage run_builtin_compositor(const ConditionBundle& bundle,
                                   const Background& background,
                                   std::uint64_t /*seed*/) {
  RasterImage canvas;
  switch (background.kind) {
    case Background::Kind::zero:
      canvas = RasterImage(bundle.canvas_w, bundle.canvas_h, 0);
      break;
    case Background::Kind::solid: {
      canvas = RasterImage(bundle.canvas_w, bundle.canvas_h, 0);
      for (std::size_t i = 0; i < canvas.pixels.size(); i += 3) {
        canvas.pixels[i] = background.rgb[0];
        canvas.pixels[i + 1] = background.rgb[1];
        canvas.pixels[i + 2] = background.rgb[2];
      }
      break;
    }
    case Background::Kind::image: {
      canvas = read_png(background.image_path);
      if (canvas.width != bundle.canvas_w || canvas.height != bundle.canvas_h) {
        fail(ErrorKind::background_size_mismatch,
             "background image does not match canvas size");
      }
      break;
    }
  }

  // Same order rule as the flattened canvas: larger boxes first.
  std::vector<std::size_t> order(bundle.objects.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return bundle.objects[a].bbox.area() > bundle.objects[b].bbox.area();
  });
  for (std::size_t j : order) {
    const PixelRect rect =
        snap_rect(bundle.objects[j].bbox, bundle.canvas_w, bundle.canvas_h);
    const RasterImage obj_pixels = crop(bundle.per_object_canvases[j], rect);
    paste(canvas, obj_pixels, rect.x, rect.y);
  }
  return canvas;
}

}  // namespace uavgen
