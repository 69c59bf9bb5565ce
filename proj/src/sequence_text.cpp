#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "pcdeer/pulse_engine.hpp"

namespace pcdeer {

namespace {

struct Token {
  enum Kind { Word, Number, At, Semicolon, Slash, End } kind = End;
  std::string text;
  double value = 0.0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) return t;  // End
    const char c = text_[pos_];
    if (c == '@') {
      advance();
      t.kind = Token::At;
      t.text = "@";
      return t;
    }
    if (c == ';') {
      advance();
      t.kind = Token::Semicolon;
      t.text = ";";
      return t;
    }
    if (c == '/') {
      advance();
      t.kind = Token::Slash;
      t.text = "/";
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.') {
      return lex_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::Word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        t.text += static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_])));
        advance();
      }
      return t;
    }
    throw validation_error(err_at("unexpected character '" + std::string(1, c) + "'", t));
  }

  static std::string err_at(const std::string& msg, const Token& t) {
    std::ostringstream oss;
    oss << "sequence parse error at line " << t.line << ", column " << t.col << ": " << msg;
    return oss.str();
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  Token lex_number() {
    Token t;
    t.line = line_;
    t.col = col_;
    const size_t start = pos_;
    auto accept = [&](auto pred) {
      while (pos_ < text_.size() && pred(text_[pos_])) advance();
    };
    if (text_[pos_] == '+' || text_[pos_] == '-') advance();
    accept([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      accept([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
      accept([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    }
    t.text = text_.substr(start, pos_ - start);
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      throw validation_error(err_at("malformed number '" + t.text + "'", t));
    }
    t.kind = Token::Number;
    return t;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, const SequenceContext& ctx) : lex_(text), ctx_(ctx) {
    cur_ = lex_.next();
  }

  PulseSequence parse() {
    PulseSequence seq;
    bool saw_read = false;
    while (cur_.kind != Token::End) {
      seq.blocks.push_back(statement(saw_read));
      if (cur_.kind == Token::Semicolon) {
        consume();
      } else if (cur_.kind != Token::End) {
        fail("expected ';' between statements");
      }
    }
    if (!saw_read) {
      throw validation_error("sequence parse error: missing 'read' statement");
    }
    seq.validate();
    return seq;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw validation_error(Lexer::err_at(msg, cur_));
  }

  void consume() { cur_ = lex_.next(); }

  Token expect(Token::Kind kind, const std::string& what) {
    if (cur_.kind != kind) fail("expected " + what + ", got '" + cur_.text + "'");
    Token t = cur_;
    consume();
    return t;
  }

  PulseBlock statement(bool& saw_read) {
    if (cur_.kind != Token::Word) fail("expected statement keyword (mw|rf|delay|read)");
    const std::string kw = cur_.text;
    if (kw == "mw") {
      consume();
      const double theta = angle();
      expect(Token::At, "'@'");
      const double f = frequency();
      MwPulse p;
      p.carrier_mhz = f;
      p.omega_mhz = ctx_.omega_mw_mhz;
      p.duration_ns = pulse_angle_duration_ns(theta, ctx_.omega_mw_mhz);
      return p;
    }
    if (kw == "rf") {
      consume();
      const double dur = duration();
      expect(Token::At, "'@'");
      const double f = frequency();
      RfPulse p;
      p.carrier_mhz = f;
      p.omega_mhz = ctx_.omega_rf_mhz;
      p.duration_ns = dur;
      return p;
    }
    if (kw == "delay") {
      consume();
      return DelayBlock{duration()};
    }
    if (kw == "read") {
      consume();
      saw_read = true;
      return ReadoutBlock{};
    }
    fail("unknown statement '" + kw + "' (expected mw|rf|delay|read)");
  }

  double angle() {
    if (cur_.kind == Token::Word && cur_.text == "pi") {
      consume();
      if (cur_.kind == Token::Slash) {
        consume();
        const Token den = expect(Token::Number, "'2' after 'pi/'");
        if (den.value != 2.0) fail("only 'pi' and 'pi/2' angles are supported");
        return M_PI / 2;
      }
      return M_PI;
    }
    if (cur_.kind == Token::Number) {
      const double deg = cur_.value;
      consume();
      const Token unit = expect(Token::Word, "'deg'");
      if (unit.text != "deg") fail("expected angle unit 'deg', got '" + unit.text + "'");
      if (deg < 0) fail("pulse angle must be >= 0");
      return deg * M_PI / 180.0;
    }
    fail("expected angle ('pi', 'pi/2' or '<value> deg')");
  }

  double duration() {
    const Token num = expect(Token::Number, "duration value");
    const Token unit = expect(Token::Word, "'ns'");
    if (unit.text != "ns") fail("expected duration unit 'ns', got '" + unit.text + "'");
    if (num.value < 0) fail("duration must be >= 0");
    return num.value;
  }

  double frequency() {
    if (cur_.kind == Token::Number) {
      const double v = cur_.value;
      consume();
      const Token unit = expect(Token::Word, "'mhz'");
      if (unit.text != "mhz") fail("expected frequency unit 'mhz', got '" + unit.text + "'");
      return v;
    }
    if (cur_.kind == Token::Word) {
      const std::string name = cur_.text;
      const auto it = ctx_.named_frequencies_mhz.find(name);
      if (it == ctx_.named_frequencies_mhz.end()) {
        fail("unresolved frequency name '" + name + "'");
      }
      consume();
      return it->second;
    }
    fail("expected frequency ('<value> mhz' or a name)");
  }

  Lexer lex_;
  const SequenceContext& ctx_;
  Token cur_;
};

std::string fmt_shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

PulseSequence parse_sequence(const std::string& text, const SequenceContext& ctx) {
  if (ctx.omega_mw_mhz <= 0 || ctx.omega_rf_mhz <= 0) {
    throw validation_error("sequence context requires positive channel Rabi frequencies");
  }
  return Parser(text, ctx).parse();
}

std::string serialize_sequence(const PulseSequence& seq, const SequenceContext& ctx) {
  seq.validate();
  std::ostringstream oss;
  bool first = true;
  for (const auto& block : seq.blocks) {
    if (!first) oss << "; ";
    first = false;
    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, MwPulse>) {
            if (b.phase_rad != 0.0) {
              throw validation_error("serialize_sequence: mini-language has no pulse phase");
            }
            if (std::abs(b.omega_mhz - ctx.omega_mw_mhz) > 1e-12 * ctx.omega_mw_mhz) {
              throw validation_error(
                  "serialize_sequence: MW amplitude differs from the context channel");
            }
            // theta[deg] = 360 * omega[MHz] * t[us]
            const double deg = 0.36 * b.omega_mhz * b.duration_ns;
            oss << "mw " << fmt_shortest(deg) << " deg @" << fmt_shortest(b.carrier_mhz)
                << " mhz";
          } else if constexpr (std::is_same_v<T, RfPulse>) {
            if (b.phase_rad != 0.0) {
              throw validation_error("serialize_sequence: mini-language has no pulse phase");
            }
            oss << "rf " << fmt_shortest(b.duration_ns) << " ns @"
                << fmt_shortest(b.carrier_mhz) << " mhz";
          } else if constexpr (std::is_same_v<T, DelayBlock>) {
            oss << "delay " << fmt_shortest(b.duration_ns) << " ns";
          } else {
            oss << "read";
          }
        },
        block);
  }
  return oss.str();
}

}  // namespace pcdeer
