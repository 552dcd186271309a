/*
 * Copyright 2026 The rrmx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "rrmx/nn/dense_net.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rrmx::nn {

// Weight file layout (whitespace separated, one record per line):
//
//   rrmx-densenet 1
//   layers <L>
//   layer <out> <in> <activation> <bound>
//   <out rows of <in> weights, row-major>
//   <one line of <out> biases>
//   ... repeated L times
//   end
//
// Values use the shortest decimal that reads back to the same double.

inline void save(const DenseNet& net, std::ostream& os) {
  os << "rrmx-densenet 1\n";
  os << "layers " << net.layers().size() << '\n';
  for (const auto& l : net.layers()) {
    os << "layer " << l.out_dim() << ' ' << l.in_dim() << ' ' << to_string(l.act) << ' '
       << format_double(l.bound) << '\n';
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
        os << (c ? " " : "") << format_double(l.weight(r, c));
      os << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r)
      os << (r ? " " : "") << format_double(l.bias(r));
    os << '\n';
  }
  os << "end\n";
}

namespace detail {

inline std::string next_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw ParseError(std::string("weight file truncated while reading ") + what);
  return tok;
}

inline long next_int(std::istream& is, const char* what) {
  const std::string tok = next_token(is, what);
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("bad integer for ") + what + ": '" + tok + "'");
  }
  if (pos != tok.size() || v < 0)
    throw ParseError(std::string("bad integer for ") + what + ": '" + tok + "'");
  return v;
}

inline void expect(std::istream& is, const std::string& word) {
  const std::string tok = next_token(is, word.c_str());
  if (tok != word) throw ParseError("expected '" + word + "', found '" + tok + "'");
}

}  // namespace detail

inline DenseNet load(std::istream& is) {
  detail::expect(is, "rrmx-densenet");
  if (detail::next_int(is, "version") != 1) throw ParseError("unsupported weight file version");
  detail::expect(is, "layers");
  const long count = detail::next_int(is, "layer count");
  if (count < 1) throw ParseError("weight file declares no layers");
  std::vector<Layer> layers;
  for (long k = 0; k < count; ++k) {
    detail::expect(is, "layer");
    const long out = detail::next_int(is, "layer width");
    const long in = detail::next_int(is, "layer input");
    if (out < 1 || in < 1) throw ParseError("layer dimensions must be positive");
    if (!layers.empty() && layers.back().out_dim() != in)
      throw ParseError("declared layer dimensions do not chain");
    Layer l;
    l.act = activation_from_string(detail::next_token(is, "activation"));
    l.bound = parse_double(detail::next_token(is, "bound"));
    l.weight.resize(out, in);
    l.bias.resize(out);
    for (long r = 0; r < out; ++r)
      for (long c = 0; c < in; ++c) l.weight(r, c) = parse_double(detail::next_token(is, "weight"));
    for (long r = 0; r < out; ++r) l.bias(r) = parse_double(detail::next_token(is, "bias"));
    layers.push_back(std::move(l));
  }
  detail::expect(is, "end");
  try {
    return DenseNet(std::move(layers));
  } catch (const ContractViolation& e) {
    throw ParseError(e.what());
  }
}

inline void save(const DenseNet& net, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  save(net, os);
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

inline DenseNet load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path.string() + "'");
  return load(is);
}

inline DenseNet load_expecting(const std::filesystem::path& path, Eigen::Index in_dim,
                               Eigen::Index out_dim) {
  DenseNet net = load(path);
  if (net.in_dim() != in_dim || net.out_dim() != out_dim)
    throw ParseError("'" + path.string() + "' has dims " + std::to_string(net.in_dim()) + "->" +
                     std::to_string(net.out_dim()) + ", expected " + std::to_string(in_dim) +
                     "->" + std::to_string(out_dim));
  return net;
}

}  // namespace rrmx::nn
