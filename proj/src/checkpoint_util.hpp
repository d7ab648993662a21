#pragma once

#include <random>
#include <stdexcept>

#include "json.hpp"
#include "mvf/nn.hpp"

namespace mvf::detail {

inline nlohmann::json net_to_json(const nn::Mlp& net) {
  nlohmann::json j;
  j["dims"] = net.dims;
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (const nn::Dense& d : net.layers) {
    weights.push_back(d.w);
    biases.push_back(d.b);
  }
  j["weights"] = weights;
  j["biases"] = biases;
  return j;
}

inline void net_from_json(const nlohmann::json& j, nn::Mlp& net,
                          bool relu_out) {
  std::vector<int> dims = j.at("dims").get<std::vector<int>>();
  std::mt19937_64 dummy(0);
  net.init(dims, dummy, relu_out);
  const nlohmann::json& weights = j.at("weights");
  const nlohmann::json& biases = j.at("biases");
  for (size_t i = 0; i < net.layers.size(); ++i) {
    net.layers[i].w = weights.at(i).get<std::vector<double>>();
    net.layers[i].b = biases.at(i).get<std::vector<double>>();
    if (net.layers[i].w.size() !=
            static_cast<size_t>(net.layers[i].in) * net.layers[i].out ||
        net.layers[i].b.size() != static_cast<size_t>(net.layers[i].out))
      throw std::runtime_error("checkpoint: layer shape mismatch");
  }
}

inline nlohmann::json dense_to_json(const nn::Dense& d) {
  return {{"in", d.in}, {"out", d.out}, {"w", d.w}, {"b", d.b}};
}

inline void dense_from_json(const nlohmann::json& j, nn::Dense& d) {
  d.in = j.at("in").get<int>();
  d.out = j.at("out").get<int>();
  d.w = j.at("w").get<std::vector<double>>();
  d.b = j.at("b").get<std::vector<double>>();
  if (d.w.size() != static_cast<size_t>(d.in) * d.out ||
      d.b.size() != static_cast<size_t>(d.out))
    throw std::runtime_error("checkpoint: dense shape mismatch");
}

}  // namespace mvf::detail
