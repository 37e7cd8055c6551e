// Copyright 2026 The segser Authors. All Rights Reserved.
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

// Writes a small synthetic corpus for the CLI tests.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <iostream>

#include "synth_corpus.hpp"

namespace {

// Corpus-style names: speaker, text code, emotion letter, take.
int write_emodb_style(const std::filesystem::path& dir, int per_class) {
  std::filesystem::create_directories(dir);
  const char letters[] = {'F', 'N', 'W', 'T', 'A', 'L', 'E'};
  for (int c = 0; c < 7; ++c) {
    for (int k = 0; k < per_class; ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "%02da%02d%cb.wav", 3 + k % 13, 1 + k, letters[c]);
      segser::write_wav(dir / name, segser::testing::synth_clip(c, 500u + static_cast<unsigned>(c * 100 + k)), 16);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const bool emodb = argc > 1 && std::string(argv[1]) == "--emodb";
  if (emodb) {
    ++argv;
    --argc;
  }
  if (argc < 3) {
    std::cerr << "usage: make_synth_corpus [--emodb] DIR CLIPS_PER_CLASS [CLASSES]\n";
    return 2;
  }
  const int per_class = std::atoi(argv[2]);
  if (emodb) return write_emodb_style(argv[1], per_class);
  const int classes = argc > 3 ? std::atoi(argv[3]) : 7;
  const auto manifest = segser::testing::write_synth_corpus(argv[1], per_class, 7, classes);
  std::cout << manifest.string() << '\n';
  return 0;
}
