// Copyright 2026 The Anuvaad Authors
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

// Writes a small synthetic Hindi-Bengali corpus with embeddings and a
// pipeline config, ready for `anuvaad import/mine/split`.
//
//   make_toy_corpus --out toy
//   anuvaad mine  --config toy/config.json
//   anuvaad split --config toy/config.json

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "anuvaad/corpus.hpp"

namespace {

using namespace anuvaad;

std::vector<double> gaussian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(d);
  for (auto& x : v) x = g(rng);
  return v;
}

void normalize(std::vector<double>& v) {
  double sq = 0;
  for (double x : v) sq += x * x;
  for (double& x : v) x /= std::sqrt(sq);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate a toy speech-translation corpus"};
  std::filesystem::path out = "toy";
  std::uint64_t seed = 1;
  std::size_t pairs = 60, unpaired = 15, dim = 128;
  app.add_option("--out", out, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--pairs", pairs, "Translation pairs to plant");
  app.add_option("--unpaired", unpaired, "Extra utterances per language with no partner");
  app.add_option("--dim", dim, "Embedding dimension");
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cosine(0.45, 0.98), seconds(1.5, 12.0);
  const std::vector<std::string> hi_words{"नदी", "विद्यालय", "बारिश", "सरकार", "बच्चे", "आज", "बाज़ार", "किताब"};
  const std::vector<std::string> bn_words{"নদী", "বিদ্যালয়", "বৃষ্টি", "সরকার", "শিশুরা", "আজ", "বাজার", "বই"};

  Corpus hi{"hi", {}}, bn{"bn", {}};
  std::vector<float> hi_data, bn_data;
  std::vector<std::string> hi_ids, bn_ids;
  const auto add = [&](Corpus& c, std::vector<float>& data, std::vector<std::string>& ids,
                       const std::vector<std::string>& words, std::size_t i, const std::vector<double>& v) {
    std::string text;
    for (std::size_t w = 0; w < 4 + i % 5; ++w) text += (w ? " " : "") + words[(i * 7 + w * 3) % words.size()];
    text += " " + std::to_string(i);
    const std::string id = c.lang + "_" + std::to_string(i);
    c.records.push_back({id, c.lang, text, "audio/" + id + ".wav", std::round(seconds(rng) * 100) / 100});
    ids.push_back(id);
    for (double x : v) data.push_back(static_cast<float>(x));
  };

  for (std::size_t i = 0; i < pairs + unpaired; ++i) {
    auto u = gaussian(dim, rng);
    normalize(u);
    auto w = gaussian(dim, rng);
    double dot = 0;
    for (std::size_t k = 0; k < dim; ++k) dot += u[k] * w[k];
    for (std::size_t k = 0; k < dim; ++k) w[k] -= dot * u[k];
    normalize(w);
    const double c = i < pairs ? cosine(rng) : 0.0;
    std::vector<double> v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = c * u[k] + std::sqrt(1 - c * c) * w[k];
    add(hi, hi_data, hi_ids, hi_words, i, u);
    add(bn, bn_data, bn_ids, bn_words, i, v);
  }

  std::filesystem::create_directories(out);
  save_corpus(hi, out / "hi.jsonl");
  save_corpus(bn, out / "bn.jsonl");
  const std::size_t n = hi_ids.size();
  save_embeddings(EmbeddingMatrix(n, dim, std::move(hi_data), std::move(hi_ids)), out / "hi.emb");
  save_embeddings(EmbeddingMatrix(n, dim, std::move(bn_data), std::move(bn_ids)), out / "bn.emb");

  std::ifstream tmpl(std::filesystem::path(ANUVAAD_SAMPLES_DIR) / "toy_config.json");
  std::ofstream(out / "config.json") << tmpl.rdbuf();
  std::cout << "wrote " << n << " utterances per language to " << out.string() << "\n";
  return 0;
}
