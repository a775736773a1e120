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

#include "cgg/core/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "cgg/core/binary_io.hpp"
#include "cgg/core/error.hpp"

namespace cgg::core {

using nlohmann::json;

std::filesystem::path feature_path_for(const std::filesystem::path& dataset_path) {
  auto p = dataset_path;
  p.replace_extension(".cgf");
  return p;
}

json token_to_json(const Token& token) {
  if (const auto* w = std::get_if<Word>(&token)) return w->text;
  if (const auto* p = std::get_if<PersonLink>(&token)) return json{{"person", p->link_id}};
  const auto& o = std::get<ObjectLink>(token);
  return json{{"object", o.region_id}, {"class_name", o.class_name}};
}

Token token_from_json(const json& j) {
  if (j.is_string()) return Word{j.get<std::string>()};
  if (j.is_object()) {
    if (j.contains("person")) return PersonLink{j.at("person").get<int>()};
    if (j.contains("object")) {
      return ObjectLink{j.at("object").get<int>(), j.value("class_name", std::string{})};
    }
  }
  throw DataError("unrecognized token " + j.dump());
}

json tokens_to_json(const TokenList& tokens) {
  json arr = json::array();
  for (const auto& t : tokens) arr.push_back(token_to_json(t));
  return arr;
}

TokenList tokens_from_json(const json& j) {
  if (!j.is_array()) throw DataError("tokens must be an array");
  TokenList out;
  out.reserve(j.size());
  for (const auto& t : j) out.push_back(token_from_json(t));
  return out;
}

json header_to_json(const DatasetHeader& h) {
  return json{{"format_version", h.format_version},
              {"d_vis", h.d_vis},
              {"objectness_threshold", h.objectness_threshold},
              {"max_context_objects", h.max_context_objects}};
}

DatasetHeader header_from_json(const json& j) {
  DatasetHeader h;
  h.format_version = j.at("format_version").get<int>();
  if (h.format_version != 1) {
    throw DataError("unsupported format_version " + std::to_string(h.format_version));
  }
  h.d_vis = j.at("d_vis").get<std::size_t>();
  h.objectness_threshold = j.at("objectness_threshold").get<double>();
  h.max_context_objects = j.at("max_context_objects").get<std::size_t>();
  return h;
}

namespace {

json box_to_json(const BoundingBox& b) {
  return json{{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}};
}

BoundingBox box_from_json(const json& j) {
  return BoundingBox{j.at("x1").get<double>(), j.at("y1").get<double>(), j.at("x2").get<double>(),
                     j.at("y2").get<double>()};
}

}  // namespace

json image_to_json(const ImageRecord& image) {
  json persons = json::array();
  for (const auto& p : image.persons) persons.push_back(box_to_json(p.box));
  json objects = json::array();
  for (const auto& c : image.context_objects) {
    json o = box_to_json(c.box);
    o["objectness"] = c.objectness;
    o["class_name"] = c.class_name;
    objects.push_back(std::move(o));
  }
  return json{{"image_id", image.image_id},
              {"width", image.width},
              {"height", image.height},
              {"persons", std::move(persons)},
              {"context_objects", std::move(objects)}};
}

ImageRecord image_from_json(const json& j) {
  ImageRecord img;
  img.image_id = j.at("image_id").get<std::string>();
  img.width = j.at("width").get<int>();
  img.height = j.at("height").get<int>();
  std::size_t idx = 0;
  for (const auto& p : j.at("persons")) img.persons.push_back({idx++, box_from_json(p), {}});
  if (j.contains("context_objects")) {
    for (const auto& o : j.at("context_objects")) {
      ContextObject c;
      c.box = box_from_json(o);
      c.objectness = o.at("objectness").get<double>();
      c.class_name = o.at("class_name").get<std::string>();
      img.context_objects.push_back(std::move(c));
    }
  }
  return img;
}

json sample_to_json(const Sample& s) {
  json labels = json::object();
  for (const auto& [id, idx] : s.labels.pairs) labels[std::to_string(id)] = idx;
  return json{{"sample_id", s.sample_id},
              {"image", image_to_json(s.image)},
              {"tokens", tokens_to_json(s.description.tokens)},
              {"labels", std::move(labels)},
              {"commonsense_type", std::string(to_string(s.commonsense_type))}};
}

Sample sample_from_json(const json& j) {
  Sample s;
  s.sample_id = j.at("sample_id").get<std::string>();
  s.image = image_from_json(j.at("image"));
  s.description.tokens = tokens_from_json(j.at("tokens"));
  for (const auto& [key, value] : j.at("labels").items()) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw DataError("label key '" + key + "' is not an integer link id");
    }
    s.labels.pairs[id] = value.get<std::size_t>();
  }
  s.commonsense_type = parse_commonsense_type(j.at("commonsense_type").get<std::string>());
  return s;
}

void write_features(std::ostream& out, std::size_t d_vis,
                    const std::vector<std::pair<std::string, const ImageRecord*>>& images) {
  out.write(kFeatureMagic, 4);
  binio::write_u32(out, static_cast<std::uint32_t>(d_vis));
  auto write_row = [&](const std::string& id, std::uint32_t ordinal, const std::vector<float>& f) {
    binio::write_string(out, id);
    binio::write_u32(out, ordinal);
    for (float v : f) binio::write_f32(out, v);
  };
  for (const auto& [id, img] : images) {
    std::uint32_t ordinal = 0;
    for (const auto& p : img->persons) write_row(id, ordinal++, p.feature);
    for (const auto& c : img->context_objects) write_row(id, ordinal++, c.feature);
  }
  if (!out) throw DataError("failed writing feature file");
}

FeatureTable read_features(std::istream& in, std::size_t& d_vis_out) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFeatureMagic, 4) != 0) {
    throw DataError("feature file: bad magic bytes");
  }
  const std::uint32_t d_vis = binio::read_u32(in, "feature file header");
  d_vis_out = d_vis;
  FeatureTable table;
  while (in.peek() != std::char_traits<char>::eof()) {
    std::string id = binio::read_string(in, "feature row");
    const std::uint32_t ordinal = binio::read_u32(in, "feature row");
    std::vector<float> row(d_vis);
    for (auto& v : row) v = binio::read_f32(in, "feature row");
    if (!table.emplace(std::make_pair(id, ordinal), std::move(row)).second) {
      throw DataError("feature file: duplicate row for sample " + id + " region " +
                      std::to_string(ordinal));
    }
  }
  return table;
}

void attach_features(const std::string& sample_id, ImageRecord& image, FeatureTable& table,
                     std::size_t d_vis) {
  std::uint32_t ordinal = 0;
  auto take = [&](std::vector<float>& dst) {
    auto it = table.find({sample_id, ordinal});
    if (it == table.end()) {
      throw DataError("sample " + sample_id + ": missing feature row for region " +
                      std::to_string(ordinal));
    }
    if (it->second.size() != d_vis) {
      throw DataError("sample " + sample_id + ": feature dimension mismatch for region " +
                      std::to_string(ordinal));
    }
    dst = std::move(it->second);
    table.erase(it);
    ++ordinal;
  };
  for (auto& p : image.persons) take(p.feature);
  for (auto& c : image.context_objects) take(c.feature);
}

Dataset read_dataset(const std::filesystem::path& path, Validation level) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed line: " +
                      e.what());
    }
    try {
      if (!have_header) {
        ds.header = header_from_json(j);
        have_header = true;
      } else {
        ds.samples.push_back(sample_from_json(j));
      }
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed record: " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw DataError(path.string() + ": missing header line");

  const auto fpath = feature_path_for(path);
  std::ifstream fin(fpath, std::ios::binary);
  if (!fin) throw DataError("cannot open feature file " + fpath.string());
  std::size_t d_vis = 0;
  FeatureTable table = read_features(fin, d_vis);
  if (d_vis != ds.header.d_vis) {
    throw DataError("feature dimension mismatch: feature file d_vis " + std::to_string(d_vis) +
                    ", dataset header d_vis " + std::to_string(ds.header.d_vis));
  }
  for (auto& s : ds.samples) attach_features(s.sample_id, s.image, table, d_vis);
  if (!table.empty()) {
    throw DataError("feature file has " + std::to_string(table.size()) +
                    " rows not referenced by the dataset (first: sample " +
                    table.begin()->first.first + ")");
  }
  for (const auto& s : ds.samples) validate_sample(s, ds.header, level);
  return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path, Validation level) {
  for (const auto& s : ds.samples) validate_sample(s, ds.header, level);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write dataset " + path.string());
  out << header_to_json(ds.header).dump() << '\n';
  std::vector<std::pair<std::string, const ImageRecord*>> images;
  for (const auto& s : ds.samples) {
    out << sample_to_json(s).dump() << '\n';
    images.emplace_back(s.sample_id, &s.image);
  }
  if (!out) throw DataError("failed writing dataset " + path.string());

  const auto fpath = feature_path_for(path);
  std::ofstream fout(fpath, std::ios::binary | std::ios::trunc);
  if (!fout) throw DataError("cannot write feature file " + fpath.string());
  write_features(fout, ds.header.d_vis, images);
}

}  // namespace cgg::core
