#include "docqual/pdf/pdf.hpp"

#include "docqual/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

namespace docqual::pdf {

namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\0';
}
bool is_delim(char c) {
  return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' ||
         c == '{' || c == '}' || c == '/' || c == '%';
}

[[noreturn]] void fail(const std::string& doc_id, const std::string& msg) {
  throw IngestError(doc_id.empty() ? "pdf" : doc_id, msg);
}

}  // namespace

std::string flate_decode(const std::string& data) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw IoError("inflateInit failed");
  std::string out;
  out.reserve(data.size() * 4);
  char buf[16384];
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw IoError("inflate failed");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
  } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
  inflateEnd(&zs);
  return out;
}

std::string flate_encode(const std::string& data) {
  uLongf bound = compressBound(static_cast<uLong>(data.size()));
  std::string out(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                reinterpret_cast<const Bytef*>(data.data()),
                static_cast<uLong>(data.size()), 6) != Z_OK)
    throw IoError("deflate failed");
  out.resize(bound);
  return out;
}

namespace {

// Undo PNG row predictors (Predictor >= 10) used by xref streams.
std::string undo_png_predictor(const std::string& data, int columns) {
  int stride = columns;
  std::string out;
  std::vector<unsigned char> prev(static_cast<std::size_t>(stride), 0);
  std::size_t pos = 0;
  while (pos + 1 + static_cast<std::size_t>(stride) <= data.size() + stride) {
    if (pos >= data.size()) break;
    int filter = static_cast<unsigned char>(data[pos++]);
    std::vector<unsigned char> row(static_cast<std::size_t>(stride), 0);
    for (int i = 0; i < stride && pos < data.size(); ++i, ++pos) {
      int x = static_cast<unsigned char>(data[pos]);
      int a = i >= 1 ? row[static_cast<std::size_t>(i - 1)] : 0;
      int b = prev[static_cast<std::size_t>(i)];
      int c = i >= 1 ? prev[static_cast<std::size_t>(i - 1)] : 0;
      switch (filter) {
        case 0: break;
        case 1: x += a; break;
        case 2: x += b; break;
        case 3: x += (a + b) / 2; break;
        case 4: {
          int p = a + b - c;
          int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
          x += (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
          break;
        }
        default: throw IoError("pdf: unsupported predictor filter");
      }
      row[static_cast<std::size_t>(i)] = static_cast<unsigned char>(x & 0xff);
    }
    out.append(reinterpret_cast<const char*>(row.data()), row.size());
    prev = row;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  Parser(const std::string& bytes, const std::string& doc_id)
      : s_(bytes), doc_id_(doc_id) {}

  PdfFile run();

 private:
  struct XEntry {
    int type = 1;  // 1: offset, 2: (objstm, index)
    long a = 0;
    long b = 0;
  };

  const std::string& s_;
  std::string doc_id_;
  std::size_t pos_ = 0;
  std::map<int, XEntry> xref_;
  ObjPtr trailer_;
  std::map<int, ObjPtr> loaded_;
  std::set<int> loading_;

  void skip_ws() {
    while (pos_ < s_.size()) {
      if (is_ws(s_[pos_])) {
        ++pos_;
      } else if (s_[pos_] == '%') {
        while (pos_ < s_.size() && s_[pos_] != '\n' && s_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  bool keyword_at(std::size_t p, const char* kw) const {
    std::size_t len = std::strlen(kw);
    if (p + len > s_.size()) return false;
    if (s_.compare(p, len, kw) != 0) return false;
    std::size_t after = p + len;
    return after >= s_.size() || is_ws(s_[after]) || is_delim(s_[after]);
  }

  bool accept(const char* kw) {
    skip_ws();
    if (keyword_at(pos_, kw)) {
      pos_ += std::strlen(kw);
      return true;
    }
    return false;
  }

  long parse_raw_int() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail(doc_id_, "expected integer at offset " + std::to_string(start));
    return std::stol(s_.substr(start, pos_ - start));
  }

  ObjPtr parse_value();
  ObjPtr parse_dict_or_stream();
  ObjPtr parse_indirect_at(std::size_t offset, int expect_num);

  void parse_xref_chain(std::size_t offset);
  void parse_xref_table();
  void parse_xref_stream(std::size_t offset);
  void merge_trailer(const ObjPtr& t);
  void brute_scan();

  ObjPtr fetch(int num);
  ObjPtr resolve(ObjPtr o) {
    while (o && o->is(Obj::Kind::kRef)) o = fetch(o->ref_num);
    return o;
  }
  void load_objstm(int num);
};

ObjPtr Parser::parse_value() {
  skip_ws();
  if (pos_ >= s_.size()) fail(doc_id_, "unexpected end of file");
  char c = s_[pos_];

  if (c == '/') {
    ++pos_;
    auto o = Obj::make(Obj::Kind::kName);
    while (pos_ < s_.size() && !is_ws(s_[pos_]) && !is_delim(s_[pos_])) {
      char ch = s_[pos_];
      if (ch == '#' && pos_ + 2 < s_.size()) {
        auto hex = [](char h) -> int {
          if (h >= '0' && h <= '9') return h - '0';
          if (h >= 'a' && h <= 'f') return h - 'a' + 10;
          if (h >= 'A' && h <= 'F') return h - 'A' + 10;
          return -1;
        };
        int hi = hex(s_[pos_ + 1]), lo = hex(s_[pos_ + 2]);
        if (hi >= 0 && lo >= 0) {
          o->s += static_cast<char>(hi * 16 + lo);
          pos_ += 3;
          continue;
        }
      }
      o->s += ch;
      ++pos_;
    }
    return o;
  }

  if (c == '(') {
    ++pos_;
    auto o = Obj::make(Obj::Kind::kString);
    int depth = 1;
    while (pos_ < s_.size() && depth > 0) {
      char ch = s_[pos_++];
      if (ch == '\\' && pos_ < s_.size()) {
        char e = s_[pos_++];
        switch (e) {
          case 'n': o->s += '\n'; break;
          case 'r': o->s += '\r'; break;
          case 't': o->s += '\t'; break;
          case 'b': o->s += '\b'; break;
          case 'f': o->s += '\f'; break;
          case '(': o->s += '('; break;
          case ')': o->s += ')'; break;
          case '\\': o->s += '\\'; break;
          case '\r':
            if (pos_ < s_.size() && s_[pos_] == '\n') ++pos_;
            break;
          case '\n': break;
          default:
            if (e >= '0' && e <= '7') {
              int v = e - '0';
              for (int k = 0; k < 2 && pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '7';
                   ++k)
                v = v * 8 + (s_[pos_++] - '0');
              o->s += static_cast<char>(v);
            } else {
              o->s += e;
            }
        }
        continue;
      }
      if (ch == '(') ++depth;
      if (ch == ')') {
        --depth;
        if (depth == 0) break;
      }
      o->s += ch;
    }
    return o;
  }

  if (c == '<') {
    if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '<') return parse_dict_or_stream();
    ++pos_;
    auto o = Obj::make(Obj::Kind::kString);
    std::string hex;
    while (pos_ < s_.size() && s_[pos_] != '>') {
      if (!is_ws(s_[pos_])) hex += s_[pos_];
      ++pos_;
    }
    ++pos_;  // '>'
    if (hex.size() % 2) hex += '0';
    for (std::size_t i = 0; i + 1 < hex.size() + 1 && i + 1 <= hex.size(); i += 2) {
      auto nib = [](char h) -> int {
        if (h >= '0' && h <= '9') return h - '0';
        if (h >= 'a' && h <= 'f') return h - 'a' + 10;
        if (h >= 'A' && h <= 'F') return h - 'A' + 10;
        return 0;
      };
      o->s += static_cast<char>(nib(hex[i]) * 16 + nib(hex[i + 1]));
    }
    return o;
  }

  if (c == '[') {
    ++pos_;
    auto o = Obj::make(Obj::Kind::kArray);
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size()) fail(doc_id_, "unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        break;
      }
      o->arr.push_back(parse_value());
    }
    return o;
  }

  if (keyword_at(pos_, "true")) {
    pos_ += 4;
    auto o = Obj::make(Obj::Kind::kBool);
    o->b = true;
    return o;
  }
  if (keyword_at(pos_, "false")) {
    pos_ += 5;
    auto o = Obj::make(Obj::Kind::kBool);
    o->b = false;
    return o;
  }
  if (keyword_at(pos_, "null")) {
    pos_ += 4;
    return Obj::make(Obj::Kind::kNull);
  }

  if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
    std::size_t start = pos_;
    bool real = false;
    if (c == '+' || c == '-') ++pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      if (s_[pos_] == '.') real = true;
      ++pos_;
    }
    std::string num = s_.substr(start, pos_ - start);
    if (!real) {
      // Possible "num gen R" reference.
      std::size_t save = pos_;
      skip_ws();
      std::size_t gen_start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ > gen_start) {
        std::size_t after_gen = pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == 'R' &&
            (pos_ + 1 >= s_.size() || is_ws(s_[pos_ + 1]) || is_delim(s_[pos_ + 1]))) {
          ++pos_;
          return Obj::make_ref(static_cast<int>(std::stol(num)));
        }
        (void)after_gen;
      }
      pos_ = save;
      return Obj::make_int(std::stol(num));
    }
    auto o = Obj::make(Obj::Kind::kReal);
    o->d = std::stod(num);
    return o;
  }

  fail(doc_id_, std::string("unexpected character '") + c + "' at offset " +
                    std::to_string(pos_));
}

ObjPtr Parser::parse_dict_or_stream() {
  pos_ += 2;  // <<
  auto o = Obj::make(Obj::Kind::kDict);
  for (;;) {
    skip_ws();
    if (pos_ + 1 < s_.size() && s_[pos_] == '>' && s_[pos_ + 1] == '>') {
      pos_ += 2;
      break;
    }
    if (pos_ >= s_.size()) fail(doc_id_, "unterminated dictionary");
    ObjPtr key = parse_value();
    if (!key->is(Obj::Kind::kName)) fail(doc_id_, "dictionary key is not a name");
    o->dict[key->s] = parse_value();
  }
  skip_ws();
  if (!keyword_at(pos_, "stream")) return o;
  pos_ += 6;
  if (pos_ < s_.size() && s_[pos_] == '\r') ++pos_;
  if (pos_ < s_.size() && s_[pos_] == '\n') ++pos_;
  o->kind = Obj::Kind::kStream;

  long length = -1;
  ObjPtr len = o->at("Length");
  if (len) {
    if (len->is(Obj::Kind::kInt)) {
      length = len->i;
    } else if (len->is(Obj::Kind::kRef)) {
      auto it = xref_.find(len->ref_num);
      if (it != xref_.end() && it->second.type == 1) {
        std::size_t save = pos_;
        ObjPtr lo = parse_indirect_at(static_cast<std::size_t>(it->second.a), len->ref_num);
        if (lo && lo->is(Obj::Kind::kInt)) length = lo->i;
        pos_ = save;
      }
    }
  }
  std::size_t data_start = pos_;
  if (length >= 0 && data_start + static_cast<std::size_t>(length) <= s_.size()) {
    o->stream = s_.substr(data_start, static_cast<std::size_t>(length));
    pos_ = data_start + static_cast<std::size_t>(length);
    skip_ws();
    if (keyword_at(pos_, "endstream")) {
      pos_ += 9;
      o->dict["Length"] = Obj::make_int(length);
      return o;
    }
    // /Length was wrong; fall through to the scan below.
  }
  std::size_t es = s_.find("endstream", data_start);
  if (es == std::string::npos) fail(doc_id_, "stream without endstream");
  std::size_t data_end = es;
  if (data_end > data_start && s_[data_end - 1] == '\n') --data_end;
  if (data_end > data_start && s_[data_end - 1] == '\r') --data_end;
  o->stream = s_.substr(data_start, data_end - data_start);
  o->dict["Length"] = Obj::make_int(static_cast<long>(o->stream.size()));
  pos_ = es + 9;
  return o;
}

ObjPtr Parser::parse_indirect_at(std::size_t offset, int expect_num) {
  if (offset >= s_.size()) fail(doc_id_, "xref offset out of range");
  pos_ = offset;
  long num = parse_raw_int();
  (void)parse_raw_int();  // generation
  if (!accept("obj")) fail(doc_id_, "expected 'obj' at offset " + std::to_string(offset));
  if (expect_num != 0 && num != expect_num)
    fail(doc_id_, "xref points to wrong object number");
  ObjPtr v = parse_value();
  return v;
}

void Parser::merge_trailer(const ObjPtr& t) {
  if (!trailer_) {
    trailer_ = Obj::make(Obj::Kind::kDict);
  }
  for (const auto& [k, v] : t->dict) {
    if (!trailer_->dict.count(k)) trailer_->dict[k] = v;
  }
}

void Parser::parse_xref_table() {
  // "xref" already consumed.
  for (;;) {
    skip_ws();
    if (keyword_at(pos_, "trailer")) {
      pos_ += 7;
      ObjPtr t = parse_value();
      merge_trailer(t);
      ObjPtr xs = t->at("XRefStm");
      if (xs && xs->is(Obj::Kind::kInt)) parse_xref_stream(static_cast<std::size_t>(xs->i));
      ObjPtr prev = t->at("Prev");
      if (prev && prev->is(Obj::Kind::kInt))
        parse_xref_chain(static_cast<std::size_t>(prev->i));
      return;
    }
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      fail(doc_id_, "malformed xref table");
    }
    long start = parse_raw_int();
    long count = parse_raw_int();
    skip_ws();
    for (long k = 0; k < count; ++k) {
      if (pos_ + 18 > s_.size()) fail(doc_id_, "truncated xref entry");
      std::string entry = s_.substr(pos_, 20);
      long off = std::stol(entry.substr(0, 10));
      char type = entry[17];
      int num = static_cast<int>(start + k);
      if (type == 'n' && !xref_.count(num)) xref_[num] = {1, off, 0};
      // Entries are 20 bytes, but tolerate 19-byte lines.
      std::size_t adv = 20;
      if (entry.size() >= 19 && entry[18] != '\r' && entry[18] != '\n' && entry[18] != ' ')
        adv = 19;
      pos_ += adv;
      skip_ws();
    }
  }
}

void Parser::parse_xref_stream(std::size_t offset) {
  std::size_t save = pos_;
  ObjPtr xs = parse_indirect_at(offset, 0);
  pos_ = save;
  if (!xs || !xs->is(Obj::Kind::kStream)) fail(doc_id_, "bad xref stream");

  std::string data = xs->stream;
  ObjPtr filter = xs->at("Filter");
  if (filter && filter->is(Obj::Kind::kName) && filter->s == "FlateDecode")
    data = flate_decode(data);
  ObjPtr parms = xs->at("DecodeParms");
  if (parms && parms->is(Obj::Kind::kDict)) {
    long pred = parms->at("Predictor") ? parms->at("Predictor")->as_int(1) : 1;
    long cols = parms->at("Columns") ? parms->at("Columns")->as_int(1) : 1;
    if (pred >= 10) data = undo_png_predictor(data, static_cast<int>(cols));
    else if (pred != 1) fail(doc_id_, "unsupported xref predictor");
  }

  ObjPtr wobj = xs->at("W");
  if (!wobj || !wobj->is(Obj::Kind::kArray) || wobj->arr.size() < 3)
    fail(doc_id_, "xref stream missing W");
  int w0 = static_cast<int>(wobj->arr[0]->as_int());
  int w1 = static_cast<int>(wobj->arr[1]->as_int());
  int w2 = static_cast<int>(wobj->arr[2]->as_int());
  int rec = w0 + w1 + w2;

  std::vector<std::pair<long, long>> ranges;
  ObjPtr index = xs->at("Index");
  if (index && index->is(Obj::Kind::kArray)) {
    for (std::size_t k = 0; k + 1 < index->arr.size(); k += 2)
      ranges.push_back({index->arr[k]->as_int(), index->arr[k + 1]->as_int()});
  } else {
    long size = xs->at("Size") ? xs->at("Size")->as_int() : 0;
    ranges.push_back({0, size});
  }

  std::size_t p = 0;
  auto read_field = [&](int width, long fallback) -> long {
    if (width == 0) return fallback;
    long v = 0;
    for (int k = 0; k < width && p < data.size(); ++k)
      v = (v << 8) | static_cast<unsigned char>(data[p++]);
    return v;
  };
  for (auto [start, count] : ranges) {
    for (long k = 0; k < count && p + static_cast<std::size_t>(rec) <= data.size() + rec;
         ++k) {
      if (p >= data.size()) break;
      long type = read_field(w0, 1);
      long f2 = read_field(w1, 0);
      long f3 = read_field(w2, 0);
      int num = static_cast<int>(start + k);
      if (!xref_.count(num) && (type == 1 || type == 2))
        xref_[num] = {static_cast<int>(type), f2, f3};
    }
  }

  merge_trailer(xs);
  ObjPtr prev = xs->at("Prev");
  if (prev && prev->is(Obj::Kind::kInt)) parse_xref_chain(static_cast<std::size_t>(prev->i));
}

void Parser::parse_xref_chain(std::size_t offset) {
  pos_ = offset;
  if (accept("xref")) {
    parse_xref_table();
  } else {
    parse_xref_stream(offset);
  }
}

void Parser::brute_scan() {
  // Recovery path: find every "<num> <gen> obj" in the file.
  xref_.clear();
  std::size_t p = 0;
  while (p + 3 < s_.size()) {
    std::size_t hit = s_.find(" obj", p);
    std::size_t alt = s_.find("\nobj", p);
    if (alt != std::string::npos && (hit == std::string::npos || alt < hit)) hit = alt;
    if (hit == std::string::npos) break;
    // Walk back across "num gen".
    std::size_t q = hit;
    auto skip_back_ws = [&](std::size_t r) {
      while (r > 0 && is_ws(s_[r - 1])) --r;
      return r;
    };
    auto skip_back_digits = [&](std::size_t r) {
      while (r > 0 && std::isdigit(static_cast<unsigned char>(s_[r - 1]))) --r;
      return r;
    };
    std::size_t gen_end = skip_back_ws(q);
    std::size_t gen_start = skip_back_digits(gen_end);
    if (gen_start < gen_end) {
      std::size_t num_end = skip_back_ws(gen_start);
      std::size_t num_start = skip_back_digits(num_end);
      if (num_start < num_end &&
          (num_start == 0 || is_ws(s_[num_start - 1]))) {
        int num = std::stoi(s_.substr(num_start, num_end - num_start));
        xref_[num] = {1, static_cast<long>(num_start), 0};
      }
    }
    p = hit + 4;
  }
}

ObjPtr Parser::fetch(int num) {
  auto it = loaded_.find(num);
  if (it != loaded_.end()) return it->second;
  if (loading_.count(num)) fail(doc_id_, "circular object reference");
  auto xe = xref_.find(num);
  if (xe == xref_.end()) return Obj::make(Obj::Kind::kNull);
  loading_.insert(num);
  ObjPtr v;
  if (xe->second.type == 1) {
    std::size_t save = pos_;
    v = parse_indirect_at(static_cast<std::size_t>(xe->second.a), num);
    pos_ = save;
  } else {
    load_objstm(static_cast<int>(xe->second.a));
    auto it2 = loaded_.find(num);
    v = it2 == loaded_.end() ? Obj::make(Obj::Kind::kNull) : it2->second;
  }
  loading_.erase(num);
  loaded_[num] = v;
  return v;
}

void Parser::load_objstm(int num) {
  ObjPtr stm = fetch(num);
  if (!stm || !stm->is(Obj::Kind::kStream)) fail(doc_id_, "bad object stream");
  std::string data = stm->stream;
  ObjPtr filter = stm->at("Filter");
  if (filter && filter->is(Obj::Kind::kName) && filter->s == "FlateDecode")
    data = flate_decode(data);
  long n = stm->at("N") ? resolve(stm->at("N"))->as_int() : 0;
  long first = stm->at("First") ? resolve(stm->at("First"))->as_int() : 0;

  Parser sub(data, doc_id_);
  sub.xref_ = xref_;
  std::vector<std::pair<int, long>> header;
  sub.pos_ = 0;
  for (long k = 0; k < n; ++k) {
    long onum = sub.parse_raw_int();
    long off = sub.parse_raw_int();
    header.push_back({static_cast<int>(onum), off});
  }
  for (auto [onum, off] : header) {
    if (loaded_.count(onum)) continue;
    sub.pos_ = static_cast<std::size_t>(first + off);
    loaded_[onum] = sub.parse_value();
  }
}

PdfFile Parser::run() {
  if (s_.compare(0, 5, "%PDF-") != 0) fail(doc_id_, "not a PDF (missing %PDF header)");

  bool have_xref = false;
  std::size_t sx = s_.rfind("startxref");
  if (sx != std::string::npos) {
    try {
      pos_ = sx + 9;
      long off = parse_raw_int();
      if (off >= 0 && static_cast<std::size_t>(off) < s_.size()) {
        parse_xref_chain(static_cast<std::size_t>(off));
        have_xref = !xref_.empty();
      }
    } catch (const Error&) {
      have_xref = false;
    }
  }
  if (!have_xref) {
    brute_scan();
    if (xref_.empty()) fail(doc_id_, "no cross-reference information found");
  }

  if (trailer_ && trailer_->at("Encrypt"))
    fail(doc_id_, "encrypted PDFs are not supported");

  // Load everything up front: the writer re-emits the full object table.
  for (const auto& [num, _] : xref_) fetch(num);

  // Resolve the catalog.
  int root_num = 0;
  if (trailer_) {
    ObjPtr r = trailer_->at("Root");
    if (r && r->is(Obj::Kind::kRef)) root_num = r->ref_num;
  }
  if (root_num == 0 || !loaded_.count(root_num)) {
    for (const auto& [num, obj] : loaded_) {
      ObjPtr type = obj ? obj->at("Type") : nullptr;
      if (type && type->is(Obj::Kind::kName) && type->s == "Catalog") {
        root_num = num;
        break;
      }
    }
  }
  if (root_num == 0) fail(doc_id_, "no document catalog");

  PdfFile f;
  f.objects_ = loaded_;
  f.root_num_ = root_num;
  f.doc_id_ = doc_id_;
  return f;
}

// ---------------------------------------------------------------------------
// PdfFile
// ---------------------------------------------------------------------------

PdfFile PdfFile::parse(const std::string& bytes, const std::string& doc_id) {
  Parser p(bytes, doc_id);
  return p.run();
}

ObjPtr PdfFile::object(int num) const {
  auto it = objects_.find(num);
  return it == objects_.end() ? Obj::make(Obj::Kind::kNull) : it->second;
}

ObjPtr PdfFile::resolve(const ObjPtr& o) const {
  ObjPtr cur = o;
  int guard = 0;
  while (cur && cur->is(Obj::Kind::kRef)) {
    if (++guard > 64) fail(doc_id_, "reference chain too deep");
    cur = object(cur->ref_num);
  }
  return cur;
}

ObjPtr PdfFile::root() const { return object(root_num_); }

std::vector<int> PdfFile::pages() const {
  std::vector<int> out;
  ObjPtr cat = root();
  ObjPtr pages_ref = cat ? cat->at("Pages") : nullptr;
  if (!pages_ref) fail(doc_id_, "catalog has no /Pages");
  std::set<int> visited;

  auto walk = [&](auto&& self, ObjPtr node_ref) -> void {
    if (!node_ref || !node_ref->is(Obj::Kind::kRef)) return;
    int num = node_ref->ref_num;
    if (visited.count(num)) return;
    visited.insert(num);
    ObjPtr node = object(num);
    if (!node || !(node->is(Obj::Kind::kDict) || node->is(Obj::Kind::kStream))) return;
    ObjPtr type = node->at("Type");
    std::string t = type && type->is(Obj::Kind::kName) ? type->s : "";
    if (t == "Page") {
      const_cast<PdfFile*>(this)->parent_[num] =
          node->at("Parent") && node->at("Parent")->is(Obj::Kind::kRef)
              ? node->at("Parent")->ref_num
              : 0;
      out.push_back(num);
      return;
    }
    // Treat as intermediate Pages node.
    ObjPtr kids = resolve(node->at("Kids"));
    if (!kids || !kids->is(Obj::Kind::kArray)) return;
    for (const auto& kid : kids->arr) self(self, kid);
  };
  walk(walk, pages_ref);
  return out;
}

ObjPtr PdfFile::page_attr(int page_num, const std::string& key) const {
  int num = page_num;
  int guard = 0;
  while (num != 0 && ++guard < 64) {
    ObjPtr node = object(num);
    if (!node) break;
    ObjPtr v = node->at(key);
    if (v) return resolve(v);
    ObjPtr parent = node->at("Parent");
    num = parent && parent->is(Obj::Kind::kRef) ? parent->ref_num : 0;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

namespace {

void serialize(const ObjPtr& o, std::string& out);

void serialize_name(const std::string& s, std::string& out) {
  out += '/';
  for (char c : s) {
    if (is_ws(c) || is_delim(c) || c == '#' || static_cast<unsigned char>(c) < 0x21 ||
        static_cast<unsigned char>(c) > 0x7e) {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "#%02X", static_cast<unsigned char>(c));
      out += buf;
    } else {
      out += c;
    }
  }
}

void serialize_string(const std::string& s, std::string& out) {
  out += '(';
  for (char c : s) {
    if (c == '(' || c == ')' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else {
      out += c;
    }
  }
  out += ')';
}

void serialize_real(double d, std::string& out) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", d);
  // Trim trailing zeros.
  std::string t = buf;
  while (t.find('.') != std::string::npos && (t.back() == '0')) t.pop_back();
  if (!t.empty() && t.back() == '.') t.pop_back();
  out += t;
}

void serialize_dict(const std::map<std::string, ObjPtr>& dict, std::string& out) {
  out += "<<";
  for (const auto& [k, v] : dict) {
    out += ' ';
    serialize_name(k, out);
    out += ' ';
    serialize(v, out);
  }
  out += " >>";
}

void serialize(const ObjPtr& o, std::string& out) {
  if (!o) {
    out += "null";
    return;
  }
  switch (o->kind) {
    case Obj::Kind::kNull: out += "null"; break;
    case Obj::Kind::kBool: out += o->b ? "true" : "false"; break;
    case Obj::Kind::kInt: out += std::to_string(o->i); break;
    case Obj::Kind::kReal: serialize_real(o->d, out); break;
    case Obj::Kind::kString: serialize_string(o->s, out); break;
    case Obj::Kind::kName: serialize_name(o->s, out); break;
    case Obj::Kind::kRef:
      out += std::to_string(o->ref_num) + " 0 R";
      break;
    case Obj::Kind::kArray: {
      out += '[';
      bool first = true;
      for (const auto& e : o->arr) {
        if (!first) out += ' ';
        first = false;
        serialize(e, out);
      }
      out += ']';
      break;
    }
    case Obj::Kind::kDict: serialize_dict(o->dict, out); break;
    case Obj::Kind::kStream: {
      auto dict = o->dict;
      dict["Length"] = Obj::make_int(static_cast<long>(o->stream.size()));
      serialize_dict(dict, out);
      out += "\nstream\n";
      out += o->stream;
      out += "\nendstream";
      break;
    }
  }
}

}  // namespace

std::string write_pdf(const std::map<int, ObjPtr>& objects, int root_num) {
  std::string out = "%PDF-1.7\n%\xE2\xE3\xCF\xD3\n";
  int max_num = 0;
  for (const auto& [num, _] : objects) max_num = std::max(max_num, num);
  std::vector<long> offsets(static_cast<std::size_t>(max_num) + 1, -1);
  for (const auto& [num, obj] : objects) {
    if (num <= 0) continue;
    offsets[static_cast<std::size_t>(num)] = static_cast<long>(out.size());
    out += std::to_string(num) + " 0 obj\n";
    serialize(obj, out);
    out += "\nendobj\n";
  }
  long xref_pos = static_cast<long>(out.size());
  out += "xref\n0 " + std::to_string(max_num + 1) + "\n";
  out += "0000000000 65535 f \n";
  for (int num = 1; num <= max_num; ++num) {
    long off = offsets[static_cast<std::size_t>(num)];
    char buf[32];
    if (off < 0) {
      std::snprintf(buf, sizeof(buf), "0000000000 65535 f \n");
    } else {
      std::snprintf(buf, sizeof(buf), "%010ld 00000 n \n", off);
    }
    out += buf;
  }
  out += "trailer\n<< /Size " + std::to_string(max_num + 1) + " /Root " +
         std::to_string(root_num) + " 0 R >>\nstartxref\n" + std::to_string(xref_pos) +
         "\n%%EOF\n";
  return out;
}

// ---------------------------------------------------------------------------
// Page normalization
// ---------------------------------------------------------------------------

std::string normalize_pdf(const std::string& bytes, int target_pages,
                          const std::string& doc_id) {
  if (target_pages < 1) throw ConfigError("target page count must be positive");
  PdfFile f = PdfFile::parse(bytes, doc_id);
  std::vector<int> pages = f.pages();
  if (pages.empty()) fail(doc_id, "document has no pages");

  std::map<int, ObjPtr> objects = f.objects();
  int next_num = 0;
  for (const auto& [num, _] : objects) next_num = std::max(next_num, num);
  int pages_node = ++next_num;

  std::vector<int> kept(pages.begin(),
                        pages.begin() + std::min<std::size_t>(pages.size(),
                                                              static_cast<std::size_t>(
                                                                  target_pages)));

  // Inheritable page attributes are materialized before reparenting.
  static const char* kInheritable[] = {"MediaBox", "Resources", "CropBox", "Rotate"};
  for (int num : kept) {
    ObjPtr page = std::make_shared<Obj>(*objects.at(num));
    for (const char* key : kInheritable) {
      if (!page->at(key)) {
        ObjPtr v = f.page_attr(num, key);
        if (v) page->dict[key] = v;
      }
    }
    page->dict["Parent"] = Obj::make_ref(pages_node);
    objects[num] = page;
  }

  // Blank padding pages share the first page's MediaBox.
  ObjPtr media = f.page_attr(pages[0], "MediaBox");
  if (!media) {
    media = Obj::make(Obj::Kind::kArray);
    for (double v : {0.0, 0.0, 612.0, 792.0}) {
      auto e = Obj::make(Obj::Kind::kReal);
      e->d = v;
      media->arr.push_back(e);
    }
  }
  std::vector<int> final_pages = kept;
  while (static_cast<int>(final_pages.size()) < target_pages) {
    int num = ++next_num;
    auto page = Obj::make(Obj::Kind::kDict);
    page->dict["Type"] = Obj::make_name("Page");
    page->dict["Parent"] = Obj::make_ref(pages_node);
    page->dict["MediaBox"] = media;
    page->dict["Resources"] = Obj::make(Obj::Kind::kDict);
    objects[num] = page;
    final_pages.push_back(num);
  }

  auto pages_obj = Obj::make(Obj::Kind::kDict);
  pages_obj->dict["Type"] = Obj::make_name("Pages");
  pages_obj->dict["Count"] = Obj::make_int(static_cast<long>(final_pages.size()));
  auto kids = Obj::make(Obj::Kind::kArray);
  for (int num : final_pages) kids->arr.push_back(Obj::make_ref(num));
  pages_obj->dict["Kids"] = kids;
  objects[pages_node] = pages_obj;

  // Rewrite the catalog to point at the flattened page tree.
  int root_num = 0;
  for (const auto& [num, obj] : objects) {
    if (obj && obj->at("Type") && obj->at("Type")->is(Obj::Kind::kName) &&
        obj->at("Type")->s == "Catalog" && obj == f.root()) {
      root_num = num;
      break;
    }
  }
  if (root_num == 0) {
    for (const auto& [num, obj] : objects) {
      ObjPtr type = obj ? obj->at("Type") : nullptr;
      if (type && type->is(Obj::Kind::kName) && type->s == "Catalog") {
        root_num = num;
        break;
      }
    }
  }
  if (root_num == 0) fail(doc_id, "no document catalog");
  ObjPtr cat = std::make_shared<Obj>(*objects.at(root_num));
  cat->dict["Pages"] = Obj::make_ref(pages_node);
  objects[root_num] = cat;

  return write_pdf(objects, root_num);
}

int count_pages(const std::string& bytes, const std::string& doc_id) {
  PdfFile f = PdfFile::parse(bytes, doc_id);
  return static_cast<int>(f.pages().size());
}

}  // namespace docqual::pdf
