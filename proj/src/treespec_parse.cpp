#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "covsys/treespec.hpp"

namespace covsys {

std::uint32_t effective_count(const Child& c) {
  if (auto* w = std::get_if<Wedge>(&c)) return w->take;
  return 1;
}

bool same_shape(const TreeNode& a, const TreeNode& b) {
  if (a.prime != b.prime || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    const Child& x = a.children[i];
    const Child& y = b.children[i];
    if (x.index() != y.index()) return false;
    if (auto* n = std::get_if<NodePtr>(&x)) {
      if (!same_shape(**n, *std::get<NodePtr>(y))) return false;
    } else if (!(x == y)) {
      return false;
    }
  }
  return true;
}

bool operator==(const TreeSpec& a, const TreeSpec& b) {
  if (a.declared_q != b.declared_q) return false;
  if (!a.root || !b.root) return a.root == b.root;
  return same_shape(*a.root, *b.root);
}

std::vector<FactoredNat> wedge_products(const Wedge& w) {
  std::size_t k = w.optional.size();
  auto to_entries = [](const FactorList& l, std::vector<FactoredNat::Entry>& out) {
    for (auto& f : l) out.emplace_back(f.prime, f.exponent);
  };
  std::vector<FactoredNat> all;
  all.reserve(std::size_t{1} << k);
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<FactoredNat::Entry> e;
    to_entries(w.base, e);
    for (std::size_t i = 0; i < k; ++i) {
      if (mask >> i & 1) to_entries(w.optional[i], e);
    }
    all.push_back(FactoredNat::from_factors(std::move(e)));
  }
  std::stable_sort(all.begin(), all.end());
  all.resize(std::min<std::size_t>(all.size(), w.take));
  return all;
}

namespace {

enum class Tok { Word, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) { advance(); }

  const Token& peek() const { return cur_; }
  Token next() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    for (;;) {
      while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) bump();
      if (i_ < s_.size() && s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') bump();
        continue;
      }
      break;
    }
    cur_ = Token{};
    cur_.line = line_;
    cur_.col = col_;
    if (i_ >= s_.size()) return;
    char c = s_[i_];
    std::size_t start = i_;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) bump();
      cur_.kind = Tok::Number;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) bump();
      cur_.kind = Tok::Word;
    } else {
      bump();
      cur_.kind = Tok::Symbol;
    }
    cur_.text = std::string(s_.substr(start, i_ - start));
  }
  void bump() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) {}

  TreeSpec parse() {
    TreeSpec t;
    if (peek_word("q")) {
      lex_.next();
      Token n = lex_.peek();
      std::uint64_t q = number("q");
      if (!is_prime(q)) throw Error(ErrorKind::NonPrime, "q = " + std::to_string(q) + " is not prime", n.line, n.col);
      t.declared_q = q;
      symbol(";");
    }
    if (!peek_word("node")) fail(lex_.peek(), "expected 'node'");
    t.root = node();
    if (lex_.peek().kind != Tok::End) fail(lex_.peek(), "unexpected text after the root node");
    return t;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg, ErrorKind k = ErrorKind::SyntaxError) {
    throw Error(k, msg, t.line, t.col);
  }
  bool peek_word(const char* w) const { return lex_.peek().kind == Tok::Word && lex_.peek().text == w; }
  bool peek_symbol(const char* s) const { return lex_.peek().kind == Tok::Symbol && lex_.peek().text == s; }
  void symbol(const char* s) {
    if (!peek_symbol(s)) fail(lex_.peek(), std::string("expected '") + s + "'");
    lex_.next();
  }
  void word(const char* w) {
    if (!peek_word(w)) fail(lex_.peek(), std::string("expected '") + w + "'");
    lex_.next();
  }
  std::uint64_t number(const char* what) {
    Token t = lex_.peek();
    if (t.kind != Tok::Number) fail(t, std::string("expected ") + what);
    lex_.next();
    if (t.text.size() > 19) fail(t, "number too large");
    return std::stoull(t.text);
  }
  std::uint32_t exponent() {
    Token t = lex_.peek();
    std::uint64_t e = number("exponent");
    if (e < 1 || e > 1'000'000) fail(t, "exponent out of range");
    return static_cast<std::uint32_t>(e);
  }

  std::uint32_t path_exp(std::uint64_t p) const {
    auto it = path_.find(p);
    return it == path_.end() ? 0 : it->second;
  }

  Factor factor() {
    Token t = lex_.peek();
    Factor f;
    if (peek_symbol("@")) {
      lex_.next();
      Token pt = lex_.peek();
      f.prime = number("prime");
      f.path_ref = true;
      f.exponent = 0;
      if (path_exp(f.prime) == 0) {
        fail(pt, "@" + std::to_string(f.prime) + " names a prime not on the path", ErrorKind::UnknownPathPrime);
      }
      return f;
    }
    f.prime = number("prime factor");
    if (!is_prime(f.prime)) fail(t, std::to_string(f.prime) + " is not prime", ErrorKind::NonPrimeFactor);
    if (peek_symbol("^")) {
      lex_.next();
      f.exponent = exponent();
    }
    return f;
  }

  FactorList factor_list() {
    FactorList l{factor()};
    while (peek_symbol("*")) {
      lex_.next();
      l.push_back(factor());
    }
    return l;
  }

  NodePtr node() {
    Token start = lex_.next();  // 'node'
    Token pt = lex_.peek();
    auto n = std::make_shared<TreeNode>();
    n->prime = number("node prime");
    if (!is_prime(n->prime)) fail(pt, std::to_string(n->prime) + " is not prime", ErrorKind::NonPrime);
    symbol("{");
    std::uint32_t& depth = path_[n->prime];
    ++depth;
    std::uint64_t total = 0;
    while (!peek_symbol("}")) {
      Token ct = lex_.peek();
      if (ct.kind == Tok::End) fail(ct, "unterminated node");
      if (peek_word("node")) {
        n->children.emplace_back(node());
      } else if (peek_word("leaf")) {
        lex_.next();
        symbol("[");
        Leaf l{factor_list()};
        symbol("]");
        symbol(";");
        n->children.emplace_back(std::move(l));
      } else if (peek_word("wedge")) {
        n->children.emplace_back(wedge());
      } else if (peek_word("power")) {
        lex_.next();
        Power pw;
        Token bt = lex_.peek();
        pw.base = number("power base");
        if (peek_symbol("^")) {
          lex_.next();
          pw.start_exponent = exponent();
        }
        if (peek_word("term")) {
          lex_.next();
          if (peek_word("minimal")) pw.term = Termination::Minimal;
          else if (peek_word("full")) pw.term = Termination::FullContext;
          else fail(lex_.peek(), "expected 'minimal' or 'full'");
          lex_.next();
        }
        symbol(";");
        if (!n->children.empty()) fail(ct, "a power branch must be the leftmost child", ErrorKind::StructureMismatch);
        if (pw.base != n->prime) fail(bt, "power base must equal the node prime", ErrorKind::StructureMismatch);
        if (pw.start_exponent != depth) {
          fail(bt, "power exponent must be " + std::to_string(depth) + " here", ErrorKind::StructureMismatch);
        }
        n->children.emplace_back(pw);
      } else {
        fail(ct, "expected a child ('node', 'leaf', 'wedge' or 'power')");
      }
      total += effective_count(n->children.back());
    }
    lex_.next();
    --path_[n->prime];
    if (total != n->prime) {
      fail(start,
           "node " + std::to_string(n->prime) + " has " + std::to_string(total) + " children, expected " +
               std::to_string(n->prime),
           ErrorKind::ChildCountMismatch);
    }
    return n;
  }

  Wedge wedge() {
    lex_.next();
    Wedge w;
    symbol("{");
    if (!peek_symbol("}")) {
      w.optional.push_back(factor_list());
      while (peek_symbol(",")) {
        lex_.next();
        w.optional.push_back(factor_list());
      }
    }
    symbol("}");
    word("x");
    symbol("[");
    w.base = factor_list();
    symbol("]");
    word("take");
    Token tt = lex_.peek();
    std::uint64_t take = number("take count");
    symbol(";");
    if (take == 0) fail(tt, "take must be positive");
    if (w.optional.size() < 63 && take > (std::uint64_t{1} << w.optional.size())) {
      fail(tt, "take " + std::to_string(take) + " exceeds the " + std::to_string(std::uint64_t{1} << w.optional.size()) +
                   " available products",
           ErrorKind::WedgeTakeTooLarge);
    }
    w.take = static_cast<std::uint32_t>(take);
    return w;
  }

  Lexer lex_;
  std::map<std::uint64_t, std::uint32_t> path_;
};

std::string factor_text(const Factor& f) {
  if (f.path_ref) return "@" + std::to_string(f.prime);
  std::string s = std::to_string(f.prime);
  if (f.exponent != 1) s += "^" + std::to_string(f.exponent);
  return s;
}

std::string list_text(const FactorList& l) {
  std::string s;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i) s += "*";
    s += factor_text(l[i]);
  }
  return s;
}

std::string child_text(const Child& c) {
  if (auto* l = std::get_if<Leaf>(&c)) return "leaf [" + list_text(l->retained) + "];";
  if (auto* w = std::get_if<Wedge>(&c)) {
    std::string s = "wedge {";
    for (std::size_t i = 0; i < w->optional.size(); ++i) {
      if (i) s += ", ";
      s += list_text(w->optional[i]);
    }
    return s + "} x [" + list_text(w->base) + "] take " + std::to_string(w->take) + ";";
  }
  auto& p = std::get<Power>(c);
  std::string s = "power " + std::to_string(p.base);
  if (p.start_exponent != 1) s += "^" + std::to_string(p.start_exponent);
  if (p.term == Termination::FullContext) s += " term full";
  return s + ";";
}

void print_node(const TreeNode& n, int indent, std::ostringstream& os) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  os << pad << "node " << n.prime << " {\n";
  for (auto& c : n.children) {
    if (auto* sub = std::get_if<NodePtr>(&c)) print_node(**sub, indent + 1, os);
    else os << pad << "  " << child_text(c) << "\n";
  }
  os << pad << "}\n";
}

std::string dot_escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r;
}

void dot_node(const TreeNode& n, int& next_id, std::ostringstream& os) {
  int id = next_id++;
  os << "  n" << id << " [label=\"" << n.prime << "\", shape=circle];\n";
  std::uint32_t pos = 0;
  for (auto& c : n.children) {
    std::uint32_t k = effective_count(c);
    std::string edge = k == 1 ? std::to_string(pos) : std::to_string(pos) + "-" + std::to_string(pos + k - 1);
    int cid = next_id;
    if (auto* sub = std::get_if<NodePtr>(&c)) {
      dot_node(**sub, next_id, os);
    } else {
      ++next_id;
      std::string text = child_text(c);
      text.pop_back();
      os << "  n" << cid << " [label=\"" << dot_escape(text) << "\", shape=box];\n";
    }
    os << "  n" << id << " -> n" << cid << " [label=\"" << edge << "\"];\n";
    pos += k;
  }
}

}  // namespace

TreeSpec parse_tree(std::string_view text) { return Parser(text).parse(); }

std::string print_tree(const TreeSpec& t) {
  std::ostringstream os;
  if (t.declared_q) os << "q " << *t.declared_q << ";\n";
  if (t.root) print_node(*t.root, 0, os);
  return os.str();
}

std::string to_dot(const TreeSpec& t) {
  std::ostringstream os;
  os << "digraph tree {\n";
  int id = 0;
  if (t.root) dot_node(*t.root, id, os);
  os << "}\n";
  return os.str();
}

}  // namespace covsys
