#include "docqual/nn/archive.hpp"

#include "docqual/error.hpp"

#include <fstream>

namespace docqual::nn {

namespace {
constexpr char kMagic[] = "DQAR1\n";
}

void Archive::put(const std::string& name, const Tensor& t) {
  if (!index_.count(name)) order_.push_back(name);
  index_[name] = t.clone();
}

const Tensor& Archive::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw IoError("archive: missing tensor '" + name + "'");
  return it->second;
}

std::vector<std::string> Archive::names() const { return order_; }

void Archive::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write archive: " + path);
  nlohmann::ordered_json header;
  header["tensors"] = nlohmann::ordered_json::array();
  for (const auto& name : order_) {
    const Tensor& t = index_.at(name);
    header["tensors"].push_back({{"name", name}, {"shape", t.shape()}});
  }
  header["meta"] = meta;
  std::string hs = header.dump();
  std::uint64_t hlen = hs.size();
  out.write(kMagic, 6);
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& name : order_) {
    const Tensor& t = index_.at(name);
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw IoError("short write: " + path);
}

Archive Archive::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open archive: " + path);
  char magic[6];
  in.read(magic, 6);
  if (!in || std::string(magic, 6) != kMagic) throw IoError("bad archive magic: " + path);
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw IoError("truncated archive header: " + path);
  nlohmann::ordered_json header = nlohmann::ordered_json::parse(hs);

  Archive ar;
  ar.meta = header.value("meta", nlohmann::ordered_json::object());
  for (const auto& e : header["tensors"]) {
    std::string name = e["name"];
    std::vector<int> shape = e["shape"].get<std::vector<int>>();
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!in) throw IoError("truncated tensor data in " + path);
    ar.order_.push_back(name);
    ar.index_[name] = std::move(t);
  }
  return ar;
}

}  // namespace docqual::nn
