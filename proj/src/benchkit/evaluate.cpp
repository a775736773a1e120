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


#include "cgg/benchkit/evaluate.hpp"

#include "cgg/core/error.hpp"

namespace cgg::bench {

using nlohmann::json;

double Bucket::accuracy() const {
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

EvalReport evaluate(const std::vector<Assignment>& predictions, const std::vector<core::Sample>& samples) {
  if (predictions.size() != samples.size()) {
    throw UsageError("evaluate: " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(samples.size()) + " samples");
  }
  EvalReport r;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::size_t n = s.image.persons.size();
    auto& type = r.by_type[std::string(core::to_string(s.commonsense_type))];
    auto& by_n = r.by_n[n];
    for (int link : s.description.distinct_links()) {
      auto got = predictions[i].find(link);
      if (got == predictions[i].end()) {
        throw DataError("sample " + s.sample_id + ": no prediction for PERSON" + std::to_string(link));
      }
      if (got->second >= n) {
        throw DataError("sample " + s.sample_id + ": prediction for PERSON" + std::to_string(link) +
                        " is person " + std::to_string(got->second) + " of " + std::to_string(n));
      }
      auto label = s.labels.pairs.find(link);
      if (label == s.labels.pairs.end()) {
        throw DataError("sample " + s.sample_id + ": no label for PERSON" + std::to_string(link));
      }
      const std::size_t hit = got->second == label->second ? 1 : 0;
      for (Bucket* b : {&r.overall, &type, &by_n}) {
        b->correct += hit;
        b->total += 1;
      }
    }
  }
  return r;
}

namespace {

json bucket_json(const Bucket& b) {
  return {{"correct", b.correct}, {"total", b.total}, {"accuracy", b.accuracy()}};
}

Bucket bucket_from(const json& j) {
  Bucket b;
  b.correct = j.at("correct").get<std::size_t>();
  b.total = j.at("total").get<std::size_t>();
  if (b.correct > b.total) throw DataError("eval report: correct exceeds total");
  return b;
}

}  // namespace

json report_to_json(const EvalReport& r) {
  json j;
  j["overall"] = bucket_json(r.overall);
  j["by_type"] = json::object();
  for (const auto& [k, b] : r.by_type) j["by_type"][k] = bucket_json(b);
  j["by_n"] = json::object();
  for (const auto& [k, b] : r.by_n) j["by_n"][std::to_string(k)] = bucket_json(b);
  return j;
}

EvalReport report_from_json(const json& j) {
  try {
    EvalReport r;
    r.overall = bucket_from(j.at("overall"));
    for (const auto& [k, v] : j.at("by_type").items()) r.by_type[k] = bucket_from(v);
    for (const auto& [k, v] : j.at("by_n").items()) r.by_n[std::stoul(k)] = bucket_from(v);
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("eval report: ") + e.what());
  } catch (const std::logic_error& e) {
    throw DataError(std::string("eval report: bad key: ") + e.what());
  }
}

double chance_accuracy(const std::vector<core::Sample>& samples) {
  double sum = 0.0;
  std::size_t links = 0;
  for (const auto& s : samples) {
    const std::size_t k = s.description.distinct_links().size();
    if (s.image.persons.empty()) continue;
    sum += static_cast<double>(k) / static_cast<double>(s.image.persons.size());
    links += k;
  }
  return links == 0 ? 0.0 : sum / static_cast<double>(links);
}

}  // namespace cgg::bench
