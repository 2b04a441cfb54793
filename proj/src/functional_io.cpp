#include "ribbonbv/functional_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ribbonbv {

namespace {

void add_term(Functional& f, int hbar, std::vector<Word> cycles, const Rational& c,
              const std::vector<std::uint8_t>& parity, int line) {
  for (const auto& w : cycles) {
    if (w.empty()) throw ParseError(line, 1, "empty cycle");
    for (int l : w)
      if (l < 0 || l >= static_cast<int>(parity.size()))
        throw ParseError(line, 1, "letter " + std::to_string(l) + " outside the basis of B");
  }
  Functional t;
  t.add(hbar, std::move(cycles), c, parity);
  f += t;
}

// Cursor over one term line.
class LineParser {
 public:
  LineParser(const std::string& text, int line) : s_(text), line_(line) {}

  void expect(const std::string& lit) {
    skip_space();
    if (s_.compare(pos_, lit.size(), lit) != 0) fail("expected '" + lit + "'");
    pos_ += lit.size();
  }
  bool peek(char c) {
    skip_space();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  int integer() {
    skip_space();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_ || !std::isdigit(static_cast<unsigned char>(s_[pos_ - 1]))) fail("expected an integer");
    return std::stoi(s_.substr(start, pos_ - start));
  }
  std::string token() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a value");
    return s_.substr(start, pos_ - start);
  }
  std::vector<Word> cycles() {
    std::vector<Word> out;
    expect("[");
    if (peek(']')) {
      ++pos_;
      return out;
    }
    while (true) {
      expect("[");
      Word w;
      if (!peek(']')) {
        while (true) {
          w.push_back(integer());
          if (peek(',')) {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect("]");
      out.push_back(std::move(w));
      if (peek(',')) {
        ++pos_;
        continue;
      }
      break;
    }
    expect("]");
    return out;
  }
  void end() {
    skip_space();
    if (pos_ != s_.size()) fail("unexpected trailing text");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, static_cast<int>(pos_) + 1, msg); }

 private:
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

int parse_bound(const std::string& v, int line) {
  if (v == "unbounded") return Truncation::unbounded;
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError(line, 1, "bad bound '" + v + "'");
  }
}

}  // namespace

void write_functional(std::ostream& os, const Functional& f, const Manifest& m) {
  os << "# ribbonbv functional\n";
  os << "# version=" << (m.version.empty() ? kVersion : m.version) << '\n';
  if (!m.algebra.empty()) os << "# algebra=" << m.algebra << '\n';
  if (m.truncation.max_letters != Truncation::unbounded) os << "# max_letters=" << m.truncation.max_letters << '\n';
  if (m.truncation.max_hbar != Truncation::unbounded) os << "# max_hbar=" << m.truncation.max_hbar << '\n';
  if (m.chi_min) os << "# chi_min=" << *m.chi_min << '\n';
  if (!m.weighting.empty()) os << "# weighting=" << m.weighting << '\n';
  os << "# terms=" << f.size() << '\n';
  for (const auto& [k, v] : f.terms()) os << format_term(k, v) << '\n';
}

std::string format_functional(const Functional& f, const Manifest& m) {
  std::ostringstream os;
  write_functional(os, f, m);
  return os.str();
}

StoredFunctional read_functional(std::istream& is, const std::vector<std::uint8_t>& parity) {
  StoredFunctional out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::string body = line.substr(first + 1);
      std::size_t eq = body.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        std::size_t a = s.find_first_not_of(" \t");
        std::size_t b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key == "max_letters") out.manifest.truncation.max_letters = parse_bound(value, lineno);
      else if (key == "max_hbar") out.manifest.truncation.max_hbar = parse_bound(value, lineno);
      else if (key == "weighting") out.manifest.weighting = value;
      else if (key == "version") out.manifest.version = value;
      else if (key == "algebra") out.manifest.algebra = value;
      else if (key == "chi_min") out.manifest.chi_min = parse_bound(value, lineno);
      continue;
    }
    LineParser p(line, lineno);
    p.expect("hbar=");
    const int hbar = p.integer();
    if (hbar < 0) p.fail("hbar power must be non-negative");
    p.expect("cycles=");
    std::vector<Word> cycles = p.cycles();
    p.expect("coeff=");
    const std::string coeff = p.token();
    p.end();
    Rational c;
    try {
      c = parse_rational(coeff);
    } catch (const std::exception&) {
      p.fail("bad coefficient '" + coeff + "'");
    }
    add_term(out.functional, hbar, std::move(cycles), c, parity, lineno);
  }
  return out;
}

StoredFunctional load_functional(const std::string& path, const std::vector<std::uint8_t>& parity) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return read_functional(in, parity);
}

std::string format_functional_json(const Functional& f, const Manifest& m) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json man;
  man["version"] = m.version.empty() ? kVersion : m.version;
  if (!m.algebra.empty()) man["algebra"] = m.algebra;
  if (m.truncation.max_letters != Truncation::unbounded) man["max_letters"] = m.truncation.max_letters;
  if (m.truncation.max_hbar != Truncation::unbounded) man["max_hbar"] = m.truncation.max_hbar;
  if (m.chi_min) man["chi_min"] = *m.chi_min;
  if (!m.weighting.empty()) man["weighting"] = m.weighting;
  j["manifest"] = man;
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [k, v] : f.terms()) {
    nlohmann::ordered_json t;
    t["hbar"] = k.hbar;
    t["cycles"] = k.monomial;
    t["coeff"] = format_rational(v);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j.dump(1) + "\n";
}

StoredFunctional parse_functional_json(const std::string& text, const std::vector<std::uint8_t>& parity) {
  StoredFunctional out;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, static_cast<int>(e.byte), e.what());
  }
  try {
    if (j.contains("manifest")) {
      const auto& man = j.at("manifest");
      if (man.contains("max_letters")) out.manifest.truncation.max_letters = man.at("max_letters").get<int>();
      if (man.contains("max_hbar")) out.manifest.truncation.max_hbar = man.at("max_hbar").get<int>();
      if (man.contains("chi_min")) out.manifest.chi_min = man.at("chi_min").get<int>();
      if (man.contains("weighting")) out.manifest.weighting = man.at("weighting").get<std::string>();
      if (man.contains("version")) out.manifest.version = man.at("version").get<std::string>();
      if (man.contains("algebra")) out.manifest.algebra = man.at("algebra").get<std::string>();
    }
    int index = 0;
    for (const auto& t : j.at("terms")) {
      ++index;
      const int hbar = t.at("hbar").get<int>();
      if (hbar < 0) throw ParseError(index, 1, "hbar power must be non-negative");
      auto cycles = t.at("cycles").get<std::vector<Word>>();
      Rational c;
      try {
        c = parse_rational(t.at("coeff").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ParseError(index, 1, e.what());
      }
      add_term(out.functional, hbar, std::move(cycles), c, parity, index);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, 0, e.what());
  }
  return out;
}

}  // namespace ribbonbv
