#include <cctype>
#include <sstream>

#include "kpbbm/expr.hpp"

namespace kpbbm {

namespace {

const char* head_name(Kind k) {
  switch (k) {
    case Kind::Sum: return "+";
    case Kind::Product: return "*";
    case Kind::Pow: return "pow";
    case Kind::Exp: return "exp";
    case Kind::Tanh: return "tanh";
    case Kind::Sech: return "sech";
    case Kind::Cosh: return "cosh";
    case Kind::Sqrt: return "sqrt";
    default: return "";
  }
}

void print(const Expr& e, std::ostream& os) {
  switch (e.kind()) {
    case Kind::Rational: os << e.value().get_str(); return;
    case Kind::Symbol: os << e.name(); return;
    case Kind::Pow:
      os << "(pow ";
      print(e.base(), os);
      os << ' ' << e.exponent() << ')';
      return;
    default:
      os << '(' << head_name(e.kind());
      for (const auto& o : e.operands()) {
        os << ' ';
        print(o, os);
      }
      os << ')';
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse_all() {
    Expr e = parse();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  std::string atom() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected atom");
    return std::string(s_.substr(start, pos_ - start));
  }
  static bool numeric(const std::string& a) {
    std::size_t i = (a[0] == '-' || a[0] == '+') ? 1 : 0;
    if (i >= a.size()) return false;
    return std::isdigit(static_cast<unsigned char>(a[i])) || a[i] == '.';
  }
  static bool identifier(const std::string& a) {
    if (!(std::isalpha(static_cast<unsigned char>(a[0])) || a[0] == '_')) return false;
    for (char c : a)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
  }

  Expr parse() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_[pos_] == ')') fail("unexpected ')'");
    if (s_[pos_] != '(') {
      std::string a = atom();
      if (numeric(a)) {
        try {
          return Expr(parse_rational(a));
        } catch (const std::invalid_argument&) {
          fail("bad number '" + a + "'");
        }
      }
      if (!identifier(a)) fail("bad symbol '" + a + "'");
      return Expr::symbol(a);
    }
    ++pos_;
    std::string head = atom();
    std::vector<Expr> args;
    long exponent = 0;
    bool is_pow = head == "pow";
    for (;;) {
      skip();
      if (pos_ >= s_.size()) fail("missing ')'");
      if (s_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (is_pow && args.size() == 1) {
        std::string a = atom();
        try {
          Rational q = parse_rational(a);
          if (!is_integer(q)) fail("pow exponent must be an integer");
          exponent = q.get_num().get_si();
        } catch (const std::invalid_argument&) {
          fail("pow exponent must be an integer");
        }
        args.emplace_back(0);
        continue;
      }
      args.push_back(parse());
    }
    auto arity = [&](std::size_t n) {
      if (args.size() != n) fail("'" + head + "' expects " + std::to_string(n) + " argument(s)");
    };
    if (head == "+") return sum(args);
    if (head == "*") return product(args);
    if (head == "-") {
      if (args.size() == 1) return -args[0];
      arity(2);
      return args[0] - args[1];
    }
    if (head == "/") {
      arity(2);
      return args[0] / args[1];
    }
    if (is_pow) {
      arity(2);
      return pow(args[0], exponent);
    }
    arity(1);
    if (head == "exp") return exp(args[0]);
    if (head == "tanh") return tanh(args[0]);
    if (head == "sech") return sech(args[0]);
    if (head == "cosh") return cosh(args[0]);
    if (head == "sinh") return sinh(args[0]);
    if (head == "sqrt") return sqrt(args[0]);
    fail("unknown head '" + head + "'");
  }

  std::string_view s_;
  std::size_t pos_{0};
};

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(e, os);
  return os.str();
}

Expr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace kpbbm
