#pragma once

#include "docqual/nn/tensor.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace docqual::nn {

// Self-describing tensor container used for checkpoints and backbone weight
// files. Layout: magic line, JSON header (tensor names/shapes plus free-form
// metadata), then raw little-endian float64 blocks in header order.
class Archive {
 public:
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  void put(const std::string& name, const Tensor& t);
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  const Tensor& get(const std::string& name) const;
  std::vector<std::string> names() const;

  void save(const std::string& path) const;
  static Archive load(const std::string& path);

 private:
  std::vector<std::string> order_;
  std::map<std::string, Tensor> index_;
};

}  // namespace docqual::nn
