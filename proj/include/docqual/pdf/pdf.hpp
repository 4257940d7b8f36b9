#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace docqual::pdf {

struct Obj;
using ObjPtr = std::shared_ptr<Obj>;

// PDF object model. Strings/streams keep raw (still encoded) bytes.
struct Obj {
  enum class Kind { kNull, kBool, kInt, kReal, kString, kName, kArray, kDict, kStream, kRef };
  Kind kind = Kind::kNull;
  bool b = false;
  long i = 0;
  double d = 0.0;
  std::string s;  // string or name payload
  std::vector<ObjPtr> arr;
  std::map<std::string, ObjPtr> dict;
  std::string stream;  // raw stream bytes
  int ref_num = 0;

  static ObjPtr make(Kind k) {
    auto o = std::make_shared<Obj>();
    o->kind = k;
    return o;
  }
  static ObjPtr make_int(long v) {
    auto o = make(Kind::kInt);
    o->i = v;
    return o;
  }
  static ObjPtr make_name(std::string n) {
    auto o = make(Kind::kName);
    o->s = std::move(n);
    return o;
  }
  static ObjPtr make_ref(int num) {
    auto o = make(Kind::kRef);
    o->ref_num = num;
    return o;
  }

  bool is(Kind k) const { return kind == k; }
  ObjPtr at(const std::string& key) const {
    auto it = dict.find(key);
    return it == dict.end() ? nullptr : it->second;
  }
  long as_int(long fallback = 0) const {
    if (kind == Kind::kInt) return i;
    if (kind == Kind::kReal) return static_cast<long>(d);
    return fallback;
  }
  double as_real(double fallback = 0.0) const {
    if (kind == Kind::kReal) return d;
    if (kind == Kind::kInt) return static_cast<double>(i);
    return fallback;
  }
};

// Parsed document: every numbered object loaded into memory.
class PdfFile {
 public:
  static PdfFile parse(const std::string& bytes, const std::string& doc_id = "");

  ObjPtr object(int num) const;
  ObjPtr resolve(const ObjPtr& o) const;  // follows references
  ObjPtr root() const;

  // Page object numbers in document order.
  std::vector<int> pages() const;

  // Effective (inheritance-resolved) page attribute, e.g. MediaBox.
  ObjPtr page_attr(int page_num, const std::string& key) const;

  const std::map<int, ObjPtr>& objects() const { return objects_; }

 private:
  std::map<int, ObjPtr> objects_;
  int root_num_ = 0;
  std::string doc_id_;
  std::map<int, int> parent_;  // page-tree child -> parent object number

  friend class Parser;
};

// Serializes an object table into a classic-xref PDF.
std::string write_pdf(const std::map<int, ObjPtr>& objects, int root_num);

// Crops to the first target_pages pages or pads with blank pages matching the
// first page's MediaBox, so the output always has exactly target_pages pages.
std::string normalize_pdf(const std::string& bytes, int target_pages = 12,
                          const std::string& doc_id = "");

int count_pages(const std::string& bytes, const std::string& doc_id = "");

// Flate helpers (exposed for tests).
std::string flate_decode(const std::string& data);
std::string flate_encode(const std::string& data);

}  // namespace docqual::pdf
