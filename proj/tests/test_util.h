// Copyright 2026 The kgx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small fixtures shared by the test binaries.

#ifndef KGX_TESTS_TEST_UTIL_H_
#define KGX_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "kgx/core.h"
#include "kgx/detector.h"
#include "kgx/random.h"
#include "kgx/scorer.h"
#include "kgx/synthgen.h"

namespace kgx::testing {

inline Vocabulary SizedVocabulary(std::size_t ni, std::size_t nc,
                                  std::size_t nr) {
  std::vector<std::string> a, b, c;
  for (std::size_t i = 0; i < ni; ++i) a.push_back("i" + std::to_string(i));
  for (std::size_t i = 0; i < nc; ++i) b.push_back("c" + std::to_string(i));
  for (std::size_t i = 0; i < nr; ++i) c.push_back("r" + std::to_string(i));
  return Vocabulary(a, b, c);
}

inline std::vector<double> RandomVector(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

// A generator config small enough for second-scale training runs.
inline GenConfig TinyGenConfig(std::uint64_t seed = 0) {
  GenConfig g;
  g.num_individuals = 8;
  g.num_unary = 4;
  g.num_binary = 4;
  g.train_videos = 60;
  g.validation_videos = 20;
  g.test_videos = 20;
  g.dim_e = 16;
  g.scene_images = 200;
  g.seed = seed;
  return g;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("kgx-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace kgx::testing

#endif  // KGX_TESTS_TEST_UTIL_H_
