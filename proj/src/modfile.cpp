#include "logff/modfile.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "logff/errors.hpp"
#include "logff/expr.hpp"

namespace logff {

using json = nlohmann::ordered_json;

namespace {

// nlohmann::json does not report where a value sits in the text, so a second
// SAX pass over a counting iterator records the offset of every value.
struct CountingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  std::size_t* reads = nullptr;

  reference operator*() const { return *p; }
  CountingIterator& operator++() {
    ++p;
    ++*reads;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator old = *this;
    ++*this;
    return old;
  }
  friend bool operator==(const CountingIterator& a, const CountingIterator& b) { return a.p == b.p; }
  friend bool operator!=(const CountingIterator& a, const CountingIterator& b) { return a.p != b.p; }
};

class PositionRecorder : public nlohmann::json_sax<json> {
 public:
  explicit PositionRecorder(const std::size_t* reads) : reads_(reads) {}

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t& s) override {
    // consumed through the closing quote
    offsets_[current()] = *reads_ - s.size() - 2;
    advance();
    return true;
  }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override {
    offsets_[current()] = *reads_ - 1;
    stack_.push_back({true, "", 0});
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().key = k;
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    advance();
    return true;
  }
  bool start_array(std::size_t) override {
    offsets_[current()] = *reads_ - 1;
    stack_.push_back({false, "", 0});
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    advance();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

  std::map<std::string, std::size_t> take() { return std::move(offsets_); }

 private:
  struct Frame {
    bool object;
    std::string key;
    std::size_t index;
  };

  bool value() {
    // number tokens read one character of lookahead
    offsets_[current()] = *reads_ == 0 ? 0 : *reads_ - 1;
    advance();
    return true;
  }
  void advance() {
    if (!stack_.empty() && !stack_.back().object) ++stack_.back().index;
  }
  std::string current() const {
    json::json_pointer ptr;
    for (const auto& f : stack_) ptr /= f.object ? f.key : std::to_string(f.index);
    return ptr.to_string();
  }

  const std::size_t* reads_;
  std::vector<Frame> stack_;
  std::map<std::string, std::size_t> offsets_;
};

std::pair<int, int> line_column(const std::string& text, std::size_t offset) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

class Document {
 public:
  explicit Document(const std::string& text) : text_(text) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
      throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": malformed JSON", line, column);
    }
  }

  const json& root() const { return root_; }

  [[noreturn]] void fail(const json::json_pointer& where, const std::string& msg, int inner_column = 0) const {
    std::size_t offset = locate(where);
    auto [line, column] = line_column(text_, offset);
    if (inner_column > 0) column += inner_column;  // past the opening quote
    std::string path = where.to_string().empty() ? "/" : where.to_string();
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + " (" + path + "): " + msg, line, column);
  }

  const json& get(const json::json_pointer& where) const {
    if (!root_.contains(where)) {
      fail(where.parent_pointer(), "missing field '" + where.back() + "'");
    }
    return root_.at(where);
  }

  long integer(const json::json_pointer& where) const {
    const json& v = get(where);
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<long>();
  }

  const json& array(const json::json_pointer& where, std::size_t expected_size = SIZE_MAX) const {
    const json& v = get(where);
    if (!v.is_array()) fail(where, "expected an array");
    if (expected_size != SIZE_MAX && v.size() != expected_size)
      fail(where, "expected " + std::to_string(expected_size) + " entries, found " + std::to_string(v.size()));
    return v;
  }

  const json& object(const json::json_pointer& where) const {
    const json& v = get(where);
    if (!v.is_object()) fail(where, "expected an object");
    return v;
  }

  std::string string(const json::json_pointer& where) const {
    const json& v = get(where);
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
  }

  RingElem expression(const json::json_pointer& where, const RingSpec& spec) const {
    const json& v = get(where);
    if (v.is_number_integer()) return RingElem::constant(spec, spec.modulus().reduce(mpz_class(v.dump())));
    if (!v.is_string()) fail(where, "expected an expression string");
    try {
      return parse_expression(v.get<std::string>(), spec);
    } catch (const ParseError& e) {
      fail(where, e.what(), e.column());
    }
  }

  RingSpec ring(const json::json_pointer& where) const {
    object(where);
    long p = integer(where / "p");
    long n = integer(where / "n");
    long d = integer(where / "d");
    long s = integer(where / "s");
    if (d < 0 || d > static_cast<long>(kMaxSlots)) fail(where / "d", "d must lie in 0.." + std::to_string(kMaxSlots));
    if (s < 0 || s > d) fail(where / "s", "s must lie in 0..d");
    if (n < 1) fail(where / "n", "precision must be positive");
    try {
      return RingSpec(p, static_cast<int>(n), static_cast<int>(d), static_cast<int>(s));
    } catch (const Error& e) {
      fail(where, e.what());
    }
  }

  Matrix matrix(const json::json_pointer& where, const RingSpec& spec, int rank) const {
    array(where, static_cast<std::size_t>(rank));
    Matrix m(spec, rank, rank);
    for (int i = 0; i < rank; ++i) {
      auto row = where / static_cast<std::size_t>(i);
      array(row, static_cast<std::size_t>(rank));
      for (int k = 0; k < rank; ++k) m.at(i, k) = expression(row / static_cast<std::size_t>(k), spec);
    }
    return m;
  }

  std::vector<RingElem> u_vector(const json::json_pointer& where, const RingSpec& spec) const {
    array(where, static_cast<std::size_t>(spec.d()));
    std::vector<RingElem> u;
    for (int j = 0; j < spec.d(); ++j) u.push_back(expression(where / static_cast<std::size_t>(j), spec));
    return u;
  }

 private:
  std::size_t locate(json::json_pointer where) const {
    if (!offsets_) {
      std::size_t reads = 0;
      PositionRecorder recorder(&reads);
      CountingIterator first{text_.data(), &reads};
      CountingIterator last{text_.data() + text_.size(), &reads};
      json::sax_parse(first, last, &recorder);
      offsets_ = recorder.take();
    }
    while (true) {
      auto it = offsets_->find(where.to_string());
      if (it != offsets_->end()) return it->second;
      if (where.empty()) return 0;
      where = where.parent_pointer();
    }
  }

  const std::string& text_;
  json root_;
  mutable std::optional<std::map<std::string, std::size_t>> offsets_;
};

json::json_pointer ptr(const std::string& s) { return json::json_pointer(s); }

json ring_json(const RingSpec& spec) {
  return json{{"p", spec.p()}, {"n", spec.n()}, {"d", spec.d()}, {"s", spec.s()}};
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(format_expression(m.at(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

const FrobLift& ModuleFile::lift(const std::string& name) const {
  for (const auto& [n, l] : lifts)
    if (n == name) return l;
  throw PreconditionViolation("no lift named '" + name + "'");
}

ModuleFile parse_module_file(const std::string& text, RangePolicy policy) {
  Document doc(text);
  if (!doc.root().is_object()) doc.fail(ptr(""), "expected a JSON object");
  RingSpec spec = doc.ring(ptr("/ring"));

  ModuleFile out;
  FilteredModule& fm = out.module.filtered;
  fm.spec = spec;
  doc.array(ptr("/hodge_range"), 2);
  fm.a = static_cast<int>(doc.integer(ptr("/hodge_range/0")));
  fm.b = static_cast<int>(doc.integer(ptr("/hodge_range/1")));

  const json& lifts = doc.object(ptr("/lifts"));
  if (lifts.empty()) doc.fail(ptr("/lifts"), "at least one lift is required");
  for (const auto& [name, value] : lifts.items()) {
    (void)value;
    out.lifts.emplace_back(name, FrobLift(spec, doc.u_vector(ptr("/lifts") / name, spec)));
  }

  const json& basis = doc.array(ptr("/basis"));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    auto where = ptr("/basis") / k;
    doc.object(where);
    BasisVector bv;
    bv.name = doc.string(where / "name");
    bv.level = static_cast<int>(doc.integer(where / "level"));
    bv.torsion = doc.root().contains(where / "torsion") ? static_cast<int>(doc.integer(where / "torsion")) : spec.n();
    fm.basis.push_back(std::move(bv));
  }
  const int rank = fm.rank();

  doc.array(ptr("/connection"), static_cast<std::size_t>(spec.d()));
  for (int j = 0; j < spec.d(); ++j) fm.connection.push_back(doc.matrix(ptr("/connection") / static_cast<std::size_t>(j), spec, rank));

  doc.object(ptr("/frobenius"));
  out.frobenius_lift = doc.string(ptr("/frobenius/lift"));
  bool found = false;
  for (const auto& [name, l] : out.lifts)
    if (name == out.frobenius_lift) {
      out.module.lift = l;
      found = true;
    }
  if (!found) doc.fail(ptr("/frobenius/lift"), "unknown lift '" + out.frobenius_lift + "'");
  out.module.frobenius = doc.matrix(ptr("/frobenius/matrix"), spec, rank);

  validate(out.module, policy);
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModuleFile load_module_file(const std::filesystem::path& path, RangePolicy policy) {
  return parse_module_file(read_text_file(path), policy);
}

std::string serialize_module_file(const ModuleFile& file) {
  const LogFFModule& m = file.module;
  json doc;
  doc["ring"] = ring_json(m.spec());
  doc["hodge_range"] = {m.filtered.a, m.filtered.b};
  json lifts = json::object();
  for (const auto& [name, l] : file.lifts) {
    json u = json::array();
    for (const auto& x : l.u()) u.push_back(format_expression(x));
    lifts[name] = std::move(u);
  }
  doc["lifts"] = std::move(lifts);
  json basis = json::array();
  for (const auto& bv : m.filtered.basis) basis.push_back(json{{"name", bv.name}, {"level", bv.level}, {"torsion", bv.torsion}});
  doc["basis"] = std::move(basis);
  json connection = json::array();
  for (const auto& a : m.filtered.connection) connection.push_back(matrix_json(a));
  doc["connection"] = std::move(connection);
  doc["frobenius"] = json{{"lift", file.frobenius_lift}, {"matrix", matrix_json(m.frobenius)}};
  return doc.dump(2) + "\n";
}

MapFile parse_map_file(const std::string& text, const RingSpec& source) {
  Document doc(text);
  if (!doc.root().is_object()) doc.fail(ptr(""), "expected a JSON object");
  RingSpec target = doc.root().contains("target") ? doc.ring(ptr("/target")) : source;
  if (target.p() != source.p() || target.n() != source.n())
    doc.fail(ptr("/target"), "target ring must have the same p and n as the module");
  RingSpec lifted = target.at_precision(target.n() + 1);
  doc.array(ptr("/images"), static_cast<std::size_t>(source.d()));
  std::vector<RingElem> images;
  for (int j = 0; j < source.d(); ++j) images.push_back(doc.expression(ptr("/images") / static_cast<std::size_t>(j), lifted));
  MapFile out;
  try {
    out.map = RingMap::from_images(source, target, images);
  } catch (const IllegalMap& e) {
    doc.fail(ptr("/images"), e.what());
  }
  if (doc.root().contains("source_lift")) out.source_lift = doc.string(ptr("/source_lift"));
  if (doc.root().contains("target_lift")) out.target_lift = FrobLift(target, doc.u_vector(ptr("/target_lift"), target));
  return out;
}

MapFile load_map_file(const std::filesystem::path& path, const RingSpec& source) {
  return parse_map_file(read_text_file(path), source);
}

}  // namespace logff
