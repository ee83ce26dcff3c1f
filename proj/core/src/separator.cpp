// Copyright 2026 The cdxkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cdx/separator.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>

#include "cdx/wav_io.hpp"

namespace cdx {

namespace fs = std::filesystem;

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

SourceEstimates load_estimates(const fs::path& dir, const Waveform& like) {
  SourceEstimates est;
  for (Stem s : kAllStems) {
    const fs::path p = dir / (std::string(stem_name(s)) + ".wav");
    Waveform w = load_wav(p);
    if (w.frames() != like.frames() || w.sample_rate() != like.sample_rate()) {
      throw SeparatorError("estimate '" + p.string() + "' has " +
                           std::to_string(w.frames()) + " frames at " +
                           std::to_string(w.sample_rate()) + " Hz, expected " +
                           std::to_string(like.frames()) + " at " +
                           std::to_string(like.sample_rate()));
    }
    est[s] = std::move(w);
  }
  return est;
}

SubprocessSeparator::SubprocessSeparator(std::string command,
                                         fs::path workspace)
    : command_(std::move(command)), workspace_(std::move(workspace)) {
  if (command_.empty()) throw std::invalid_argument("empty separator command");
}

SourceEstimates SubprocessSeparator::separate(const Waveform& mixture) {
  static std::atomic<unsigned long> counter{0};
  const auto stamp =
      std::chrono::steady_clock::now().time_since_epoch().count();
  const fs::path scratch =
      workspace_ / ("cdx-sep-" + std::to_string(::getpid()) + "-" +
                    std::to_string(stamp) + "-" + std::to_string(counter++));
  const fs::path out_dir = scratch / "out";
  fs::create_directories(out_dir);

  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{scratch};

  const fs::path input = scratch / "input.wav";
  save_wav(mixture, input, SampleFormat::kFloat32);
  const std::string cmd = command_ + " " + shell_quote(input.string()) + " " +
                          shell_quote(out_dir.string());
  const int status = std::system(cmd.c_str());
  if (status == -1) throw SeparatorError("could not launch: " + command_);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw SeparatorError("separator exited with status " +
                         std::to_string(WIFEXITED(status) ? WEXITSTATUS(status)
                                                          : status) +
                         ": " + command_);
  }
  try {
    return load_estimates(out_dir, mixture);
  } catch (const SeparatorError&) {
    throw;
  } catch (const std::exception& e) {
    throw SeparatorError(std::string("unreadable separator output: ") +
                         e.what());
  }
}

}  // namespace cdx
