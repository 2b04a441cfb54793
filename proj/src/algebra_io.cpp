#include "ribbonbv/algebra_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ribbonbv {

ParseError::ParseError(int line_, int column_, const std::string& message)
    : std::runtime_error("line " + std::to_string(line_) + ", column " + std::to_string(column_) + ": " + message),
      line(line_),
      column(column_) {}

namespace {

struct Cursor {
  const std::string& text;
  int line;
  std::size_t pos = 0;

  [[noreturn]] void error(const std::string& msg) const { throw ParseError(line, static_cast<int>(pos) + 1, msg); }
  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) error(std::string("expected '") + c + "'");
    ++pos;
  }
  void expect(const std::string& s) {
    skip_ws();
    if (text.compare(pos, s.size(), s) != 0) error("expected '" + s + "'");
    pos += s.size();
  }
  std::string token(const std::string& stops) {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && stops.find(text[pos]) == std::string::npos)
      ++pos;
    if (start == pos) error("expected a token");
    return text.substr(start, pos - start);
  }
  std::string rest() {
    skip_ws();
    std::string r = text.substr(pos);
    while (!r.empty() && std::isspace(static_cast<unsigned char>(r.back()))) r.pop_back();
    pos = text.size();
    return r;
  }
};

struct Builder {
  std::vector<GradedBasis::Element> elements;
  BasisPtr basis;
  AlgebraKind kind = AlgebraKind::associative;
  bool kind_set = false;
  // Entries are recorded before the basis is frozen only after `basis` lines.
  std::map<int, std::map<std::vector<int>, Rational>> products;
  std::map<int, std::map<std::vector<int>, Rational>> cyclic;
  std::map<std::vector<int>, Rational> beta;
  bool has_beta = false;
  std::map<std::pair<int, int>, Rational> I;
  std::map<std::pair<int, int>, Rational> H;
  bool has_H = false;

  const GradedBasis& frozen(Cursor& c) {
    if (elements.empty()) c.error("entries must follow a 'basis' line");
    if (!basis) basis = std::make_shared<const GradedBasis>(elements);
    return *basis;
  }

  int index(Cursor& c, const std::string& tok) {
    const GradedBasis& b = frozen(c);
    int i = b.index_of(tok);
    if (i >= 0) return i;
    bool numeric = !tok.empty();
    for (char ch : tok) numeric = numeric && std::isdigit(static_cast<unsigned char>(ch));
    if (numeric) {
      i = std::stoi(tok);
      if (i < b.dimension()) return i;
    }
    c.error("unknown basis element '" + tok + "'");
  }

  std::vector<int> tuple(Cursor& c) {
    c.expect('(');
    std::vector<int> out;
    c.skip_ws();
    if (c.pos < c.text.size() && c.text[c.pos] == ')') c.error("empty index tuple");
    for (;;) {
      out.push_back(index(c, c.token(",)")));
      c.skip_ws();
      if (c.pos < c.text.size() && c.text[c.pos] == ',') {
        ++c.pos;
        continue;
      }
      c.expect(')');
      return out;
    }
  }

  Rational value(Cursor& c) {
    c.expect('=');
    std::size_t at = c.pos;
    std::string v = c.rest();
    try {
      return parse_rational(v);
    } catch (const std::invalid_argument& e) {
      c.pos = at;
      c.error(e.what());
    }
  }

  int arity(Cursor& c) {
    c.expect('[');
    std::string t = c.token("]");
    c.expect(']');
    for (char ch : t)
      if (!std::isdigit(static_cast<unsigned char>(ch))) c.error("arity must be an integer");
    int n = std::stoi(t);
    if (n < 2) c.error("arity must be at least 2");
    return n;
  }
};

void parse_line(Builder& b, Cursor& c) {
  std::string head = c.token("[(");
  if (head == "kind") {
    std::string k = c.token("");
    if (k == "associative") {
      b.kind = AlgebraKind::associative;
    } else if (k == "a_infinity") {
      b.kind = AlgebraKind::a_infinity;
    } else {
      c.error("unknown kind '" + k + "'");
    }
    b.kind_set = true;
  } else if (head == "basis") {
    if (b.basis) c.error("basis declared after entries");
    while (!c.done()) {
      std::size_t at = c.pos;
      std::string item = c.token("");
      auto colon = item.find(':');
      if (colon == std::string::npos) {
        c.pos = at;
        c.error("basis element must be <name>:<even|odd>");
      }
      std::string name = item.substr(0, colon);
      std::string par = item.substr(colon + 1);
      if (name.empty() || (par != "even" && par != "odd")) {
        c.pos = at;
        c.error("basis element must be <name>:<even|odd>");
      }
      for (const auto& e : b.elements)
        if (e.name == name) {
          c.pos = at;
          c.error("duplicate basis element '" + name + "'");
        }
      b.elements.push_back({name, par == "even" ? Parity::even : Parity::odd});
    }
  } else if (head == "product") {
    int n = b.arity(c);
    auto in = b.tuple(c);
    if (static_cast<int>(in.size()) != n) c.error("product[" + std::to_string(n) + "] needs " + std::to_string(n) + " inputs");
    c.expect("->");
    in.push_back(b.index(c, c.token("=")));
    b.products[n][in] += b.value(c);
  } else if (head == "cyclic") {
    int n = b.arity(c);
    auto idx = b.tuple(c);
    if (static_cast<int>(idx.size()) != n + 1) c.error("cyclic[" + std::to_string(n) + "] needs " + std::to_string(n + 1) + " indices");
    b.cyclic[n][idx] += b.value(c);
  } else if (head == "beta") {
    auto idx = b.tuple(c);
    if (idx.size() != 2) c.error("beta needs two indices");
    b.beta[idx] += b.value(c);
    b.has_beta = true;
  } else if (head == "I" || head == "H") {
    auto idx = b.tuple(c);
    if (idx.size() != 1) c.error(head + " takes one input");
    c.expect("->");
    int out = b.index(c, c.token("="));
    auto& target = head == "I" ? b.I : b.H;
    target[{out, idx[0]}] += b.value(c);
    if (head == "H") b.has_H = true;
  } else {
    c.error("unknown directive '" + head + "'");
  }
  if (!c.done()) c.error("trailing characters");
}

}  // namespace

AlgebraSpec parse_algebra(std::istream& in) {
  Builder b;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    Cursor c{raw, line_no};
    if (c.done()) continue;
    parse_line(b, c);
  }
  if (b.elements.empty()) throw ParseError(line_no, 1, "no basis declared");
  if (!b.basis) b.basis = std::make_shared<const GradedBasis>(b.elements);

  AlgebraSpec spec;
  spec.kind = b.kind;
  spec.basis = b.basis;
  for (const auto& [n, entries] : b.products) {
    SparseTensor t = make_product_tensor(spec.basis, n);
    for (const auto& [idx, v] : entries) t.add(idx, v);
    spec.products.emplace(n, std::move(t));
  }
  for (const auto& [n, entries] : b.cyclic) {
    SparseTensor t = make_cyclic_tensor(spec.basis, n);
    for (const auto& [idx, v] : entries) t.add(idx, v);
    spec.cyclic.emplace(n, std::move(t));
  }
  if (b.has_beta) {
    SparseTensor beta = make_beta_tensor(spec.basis);
    for (const auto& [idx, v] : b.beta) beta.add(idx, v);
    spec.beta = std::move(beta);
  }
  const int d = spec.basis->dimension();
  spec.I = RationalMatrix(d, d);
  for (const auto& [ij, v] : b.I) spec.I(ij.first, ij.second) += v;
  if (b.has_H) {
    RationalMatrix h(d, d);
    for (const auto& [ij, v] : b.H) h(ij.first, ij.second) += v;
    spec.H = std::move(h);
  }
  return spec;
}

AlgebraSpec parse_algebra_string(const std::string& text) {
  std::istringstream in(text);
  return parse_algebra(in);
}

AlgebraSpec load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  return parse_algebra(in);
}

std::string format_algebra(const AlgebraSpec& spec) {
  const GradedBasis& basis = *spec.basis;
  std::ostringstream os;
  os << "kind " << (spec.kind == AlgebraKind::associative ? "associative" : "a_infinity") << '\n';
  os << "basis";
  for (const auto& e : basis.elements()) os << ' ' << e.name << ':' << to_string(e.parity);
  os << '\n';
  auto tuple = [&](const std::vector<int>& idx, std::size_t count) {
    std::string s = "(";
    for (std::size_t k = 0; k < count; ++k) {
      if (k) s += ',';
      s += basis.name(idx[k]);
    }
    return s + ")";
  };
  for (const auto& [n, t] : spec.products)
    for (const auto& [idx, v] : t.entries())
      os << "product[" << n << "] " << tuple(idx, idx.size() - 1) << "->" << basis.name(idx.back()) << '='
         << format_rational(v) << '\n';
  for (const auto& [n, t] : spec.cyclic)
    for (const auto& [idx, v] : t.entries()) os << "cyclic[" << n << "] " << tuple(idx, idx.size()) << '=' << format_rational(v) << '\n';
  if (spec.beta)
    for (const auto& [idx, v] : spec.beta->entries()) os << "beta " << tuple(idx, 2) << '=' << format_rational(v) << '\n';
  auto op = [&](const char* name, const RationalMatrix& m) {
    for (int j = 0; j < m.cols(); ++j)
      for (int i = 0; i < m.rows(); ++i)
        if (sgn(m(i, j)) != 0) os << name << " (" << basis.name(j) << ")->" << basis.name(i) << '=' << format_rational(m(i, j)) << '\n';
  };
  op("I", spec.I);
  if (spec.H) op("H", *spec.H);
  return os.str();
}

}  // namespace ribbonbv
