// Copyright 2026 The cgg Authors.
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


#include "cgg/numcore/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cgg/core/binary_io.hpp"
#include "cgg/core/error.hpp"

namespace cgg::num {

namespace {

constexpr char kMagic[4] = {'C', 'G', 'W', '1'};

}  // namespace

void save_checkpoint(const std::string& path, const ParameterStore& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out.write(kMagic, 4);
  binio::write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    binio::write_string(out, p.name);
    binio::write_u32(out, static_cast<std::uint32_t>(p.value.rank()));
    for (auto d : p.value.shape()) binio::write_u32(out, static_cast<std::uint32_t>(d));
    for (double v : p.value.values()) binio::write_f32(out, static_cast<float>(v));
  }
  if (!out) throw DataError("failed writing checkpoint " + path);
}

void load_checkpoint(const std::string& path, ParameterStore& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || !std::equal(magic, magic + 4, kMagic)) {
    throw DataError("checkpoint " + path + ": bad magic");
  }
  const std::uint32_t count = binio::read_u32(in, "checkpoint");
  if (count != params.size()) {
    throw DataError("checkpoint " + path + ": " + std::to_string(count) +
                    " tensors, model expects " + std::to_string(params.size()));
  }
  std::vector<Tensor> loaded;
  loaded.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const auto& expected = params[s];
    const std::string name = binio::read_string(in, "checkpoint", 4096);
    if (name != expected.name) {
      throw DataError("checkpoint " + path + ": tensor " + std::to_string(s) + " is '" + name +
                      "', model expects '" + expected.name + "'");
    }
    const std::uint32_t rank = binio::read_u32(in, "checkpoint");
    if (rank > 8) throw DataError("checkpoint " + path + ": rank out of range for " + name);
    Shape shape(rank);
    for (auto& d : shape) d = binio::read_u32(in, "checkpoint");
    if (shape != expected.value.shape()) {
      throw DataError("checkpoint " + path + ": " + name + " has shape " + shape_string(shape) +
                      ", model expects " + shape_string(expected.value.shape()));
    }
    Tensor t(shape);
    for (auto& v : t.values()) {
      v = binio::read_f32(in, "checkpoint");
      if (!std::isfinite(v)) throw DataError("checkpoint " + path + ": non-finite value in " + name);
    }
    loaded.push_back(std::move(t));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("checkpoint " + path + ": trailing bytes");
  }
  for (std::size_t s = 0; s < count; ++s) params[s].value = std::move(loaded[s]);
}

}  // namespace cgg::num
