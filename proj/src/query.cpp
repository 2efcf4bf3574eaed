#include "sscc/query.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "sscc/wkt.hpp"

namespace sscc::query {

QueryError::QueryError(Kind kind, std::size_t offset, std::vector<std::string> expected,
                       const std::string& what)
    : std::runtime_error(what), kind_(kind), offset_(offset), expected_(std::move(expected)) {}

bool operator==(const Source& a, const Source& b) {
  if (a.is_table() != b.is_table()) return false;
  if (a.is_table()) return a.table == b.table;
  return *a.nested == *b.nested;
}

bool operator==(const Pipeline& a, const Pipeline& b) {
  return a.source == b.source && a.stages == b.stages;
}

namespace {

enum class Tok { kIdent, kInt, kNumber, kString, kLBracket, kRBracket, kLParen, kRParen, kComma,
                 kLt, kGt, kEq, kDot, kDotDot, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::size_t offset = 0;
  std::string text;  // identifier name, decoded string, or number spelling
  double number = 0;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::kEnd:
      return "end of input";
    case Tok::kString:
      return "string literal";
    case Tok::kInt:
    case Tok::kNumber:
      return "number '" + t.text + "'";
    case Tok::kIdent:
      return "'" + t.text + "'";
    default:
      return "'" + t.text + "'";
  }
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto lex_error = [&](std::size_t at, const std::string& what) -> QueryError {
    return QueryError(QueryError::Kind::kLexical, at, {},
                      "lexical error at offset " + std::to_string(at) + ": " + what);
  };
  while (true) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    Token t;
    t.offset = i;
    if (i >= s.size()) {
      t.kind = Tok::kEnd;
      out.push_back(t);
      return out;
    }
    const char c = s[i];
    const auto single = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      ++i;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::kIdent;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      std::size_t j = i;
      bool integral = true;
      if (s[j] == '-') {
        integral = false;
        ++j;
      }
      const std::size_t digits_start = j;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j == digits_start) throw lex_error(i, "expected digits");
      if (j < s.size() && s[j] == '.') {
        integral = false;
        ++j;
        const std::size_t frac = j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == frac) throw lex_error(j, "expected digits after '.'");
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        integral = false;
        ++j;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        const std::size_t exp = j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == exp) throw lex_error(j, "expected exponent digits");
      }
      t.text = std::string(s.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, t.number);
      if (ec != std::errc() || ptr != s.data() + j || !std::isfinite(t.number)) {
        throw lex_error(i, "number out of range");
      }
      t.kind = integral ? Tok::kInt : Tok::kNumber;
      i = j;
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string value;
      while (true) {
        if (j >= s.size()) throw lex_error(i, "unterminated string");
        const char d = s[j];
        if (d == '"') break;
        if (d == '\\') {
          if (j + 1 >= s.size()) throw lex_error(i, "unterminated string");
          const char e = s[j + 1];
          if (e != '"' && e != '\\') throw lex_error(j, "invalid escape");
          value.push_back(e);
          j += 2;
          continue;
        }
        value.push_back(d);
        ++j;
      }
      t.kind = Tok::kString;
      t.text = std::move(value);
      i = j + 1;
    } else if (c == '.') {
      if (i + 1 < s.size() && s[i + 1] == '.') {
        t.kind = Tok::kDotDot;
        t.text = "..";
        i += 2;
      } else {
        single(Tok::kDot);
      }
    } else {
      switch (c) {
        case '[':
          single(Tok::kLBracket);
          break;
        case ']':
          single(Tok::kRBracket);
          break;
        case '(':
          single(Tok::kLParen);
          break;
        case ')':
          single(Tok::kRParen);
          break;
        case ',':
          single(Tok::kComma);
          break;
        case '<':
          single(Tok::kLt);
          break;
        case '>':
          single(Tok::kGt);
          break;
        case '=':
          single(Tok::kEq);
          break;
        default:
          throw lex_error(i, "unexpected character");
      }
    }
    out.push_back(std::move(t));
  }
}

constexpr std::size_t kMaxNesting = 64;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Query parse() {
    keyword("query");
    Query q;
    q.pipeline = pipeline(0);
    q.terminal = terminal();
    if (peek().kind != Tok::kEnd) {
      throw QueryError(QueryError::Kind::kTrailing, peek().offset, {"end of input"},
                       "trailing input at offset " + std::to_string(peek().offset) + ": " +
                           describe(peek()));
    }
    return q;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::kEnd) ++pos_;
    return t;
  }
  bool at_ident(std::string_view word) const {
    return peek().kind == Tok::kIdent && peek().text == word;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string list;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) list += ", ";
      list += expected[i];
    }
    throw QueryError(QueryError::Kind::kSyntax, peek().offset, expected,
                     "syntax error at offset " + std::to_string(peek().offset) + ": expected " +
                         list + ", found " + describe(peek()));
  }

  void keyword(std::string_view word) {
    if (!at_ident(word)) fail({"'" + std::string(word) + "'"});
    next();
  }

  void expect(Tok kind, const char* spelling) {
    if (peek().kind != kind) fail({std::string("'") + spelling + "'"});
    next();
  }

  std::string ident() {
    if (peek().kind != Tok::kIdent) fail({"identifier"});
    return next().text;
  }

  double number() {
    if (peek().kind != Tok::kInt && peek().kind != Tok::kNumber) fail({"number"});
    return next().number;
  }

  std::uint64_t integer() {
    if (peek().kind != Tok::kInt) fail({"integer"});
    const Token& t = peek();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail({"integer"});
    next();
    return v;
  }

  std::string string_literal() {
    if (peek().kind != Tok::kString) fail({"string literal"});
    return next().text;
  }

  Pipeline pipeline(std::size_t depth) {
    if (depth > kMaxNesting) fail({"shallower nesting"});
    Pipeline p;
    if (peek().kind == Tok::kLParen) {
      next();
      p.source.nested = std::make_shared<const Pipeline>(pipeline(depth + 1));
      expect(Tok::kRParen, ")");
    } else if (peek().kind == Tok::kIdent) {
      p.source.table = next().text;
      keyword("feed");
    } else {
      fail({"identifier", "'('"});
    }
    while (peek().kind == Tok::kIdent) {
      const std::string& w = peek().text;
      if (w == "filter") {
        p.stages.emplace_back(filter());
      } else if (w == "head") {
        next();
        expect(Tok::kLBracket, "[");
        const std::uint64_t n = integer();
        expect(Tok::kRBracket, "]");
        p.stages.emplace_back(Head{n});
      } else if (w == "distancescan") {
        next();
        expect(Tok::kLBracket, "[");
        DistanceScan ds;
        ds.anchor = point_literal();
        expect(Tok::kComma, ",");
        ds.k = integer();
        expect(Tok::kRBracket, "]");
        p.stages.emplace_back(ds);
      } else if (w == "symmjoin") {
        p.stages.emplace_back(symmjoin());
      } else {
        break;
      }
    }
    return p;
  }

  Terminal terminal() {
    if (at_ident("consume")) {
      next();
      return Terminal::kConsume;
    }
    if (at_ident("count")) {
      next();
      return Terminal::kCount;
    }
    fail({"'filter'", "'head'", "'distancescan'", "'symmjoin'", "'consume'", "'count'"});
  }

  Filter filter() {
    keyword("filter");
    expect(Tok::kLBracket, "[");
    Filter f{predicate()};
    expect(Tok::kRBracket, "]");
    return f;
  }

  Predicate predicate() {
    if (peek().kind == Tok::kDot) {
      next();
      if (at_ident("geom")) {
        next();
        SpatialPredicate sp;
        if (at_ident("intersects")) {
          sp.op = SpatialOp::kIntersects;
        } else if (at_ident("inside")) {
          sp.op = SpatialOp::kInside;
        } else {
          fail({"'intersects'", "'inside'"});
        }
        next();
        sp.target = ref_expr();
        return sp;
      }
      if (at_ident("attr")) {
        next();
        expect(Tok::kLParen, "(");
        AttributePredicate ap;
        ap.key = string_literal();
        expect(Tok::kRParen, ")");
        switch (peek().kind) {
          case Tok::kEq:
            ap.op = CompareOp::kEq;
            break;
          case Tok::kLt:
            ap.op = CompareOp::kLt;
            break;
          case Tok::kGt:
            ap.op = CompareOp::kGt;
            break;
          default:
            fail({"'='", "'<'", "'>'"});
        }
        next();
        if (peek().kind == Tok::kString) {
          ap.value = string_literal();
        } else if (peek().kind == Tok::kInt || peek().kind == Tok::kNumber) {
          ap.value = number();
        } else {
          fail({"string literal", "number"});
        }
        return ap;
      }
      fail({"'geom'", "'attr'"});
    }
    if (at_ident("distance")) {
      next();
      expect(Tok::kLParen, "(");
      geom_self();
      expect(Tok::kComma, ",");
      DistancePredicate dp;
      dp.target = ref_expr();
      expect(Tok::kRParen, ")");
      expect(Tok::kLt, "<");
      dp.limit = number();
      return dp;
    }
    fail({"'.geom'", "'distance'", "'.attr'"});
  }

  void geom_self() {
    if (peek().kind != Tok::kDot) fail({"'.geom'"});
    next();
    keyword("geom");
  }

  void geom_other() {
    if (peek().kind != Tok::kDotDot) fail({"'..geom'"});
    next();
    keyword("geom");
  }

  SymmJoin symmjoin() {
    keyword("symmjoin");
    expect(Tok::kLBracket, "[");
    SymmJoin j;
    if (peek().kind == Tok::kDot) {
      geom_self();
      keyword("intersects");
      geom_other();
    } else if (at_ident("distance")) {
      next();
      expect(Tok::kLParen, "(");
      geom_self();
      expect(Tok::kComma, ",");
      geom_other();
      expect(Tok::kRParen, ")");
      expect(Tok::kLt, "<");
      j.predicate.by_distance = true;
      j.predicate.limit = number();
    } else {
      fail({"'.geom'", "'distance'"});
    }
    expect(Tok::kRBracket, "]");
    j.right_table = ident();
    keyword("feed");
    return j;
  }

  RefExpr ref_expr() {
    if (at_ident("ref")) {
      next();
      expect(Tok::kLParen, "(");
      EntityRef r{string_literal()};
      expect(Tok::kRParen, ")");
      return r;
    }
    if (at_ident("POINT")) return point_literal();
    fail({"'ref'", "'POINT'"});
  }

  Point point_literal() {
    keyword("POINT");
    expect(Tok::kLParen, "(");
    Point p;
    p.x = number();
    p.y = number();
    expect(Tok::kRParen, ")");
    return p;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string print_number(double v) { return format_coordinate(v); }

std::string print_ref(const RefExpr& r) {
  if (const auto* e = std::get_if<EntityRef>(&r)) return "ref(" + quote_string(e->name) + ")";
  return print_point(std::get<Point>(r));
}

std::string print_predicate(const Predicate& p) {
  return std::visit(
      [](const auto& pred) -> std::string {
        using T = std::decay_t<decltype(pred)>;
        if constexpr (std::is_same_v<T, SpatialPredicate>) {
          return std::string(".geom ") + (pred.op == SpatialOp::kInside ? "inside " : "intersects ") +
                 print_ref(pred.target);
        } else if constexpr (std::is_same_v<T, DistancePredicate>) {
          return "distance(.geom, " + print_ref(pred.target) + ") < " + print_number(pred.limit);
        } else {
          std::string out = ".attr(" + quote_string(pred.key) + ") ";
          out += pred.op == CompareOp::kEq ? "=" : pred.op == CompareOp::kLt ? "<" : ">";
          out += ' ';
          if (const auto* s = std::get_if<std::string>(&pred.value)) {
            out += quote_string(*s);
          } else {
            out += print_number(std::get<double>(pred.value));
          }
          return out;
        }
      },
      p);
}

std::string print_pipeline(const Pipeline& p) {
  std::string out = p.source.is_table() ? p.source.table + " feed"
                                        : "(" + print_pipeline(*p.source.nested) + ")";
  for (const Stage& s : p.stages) {
    out += ' ';
    out += std::visit(
        [](const auto& st) -> std::string {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, Filter>) {
            return "filter[" + print_predicate(st.predicate) + "]";
          } else if constexpr (std::is_same_v<T, Head>) {
            return "head[" + std::to_string(st.n) + "]";
          } else if constexpr (std::is_same_v<T, DistanceScan>) {
            return "distancescan[" + print_point(st.anchor) + ", " + std::to_string(st.k) + "]";
          } else {
            const std::string pred = st.predicate.by_distance
                                         ? "distance(.geom, ..geom) < " + print_number(st.predicate.limit)
                                         : ".geom intersects ..geom";
            return "symmjoin[" + pred + "] " + st.right_table + " feed";
          }
        },
        s);
  }
  return out;
}

}  // namespace

Query parse_query(std::string_view text) { return Parser(lex(text)).parse(); }

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string print_point(Point p) {
  return "POINT (" + print_number(p.x) + " " + print_number(p.y) + ")";
}

std::string print_query(const Query& q) {
  return "query " + print_pipeline(q.pipeline) +
         (q.terminal == Terminal::kCount ? " count" : " consume");
}

}  // namespace sscc::query
