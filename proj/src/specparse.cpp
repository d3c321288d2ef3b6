#include "ict/specparse.hpp"

#include <cctype>

namespace ict {

namespace {

struct Cursor {
  std::string text;            // whitespace-stripped input
  std::vector<std::size_t> at; // original byte offset of each stripped char
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }
  char take() { return text[pos++]; }
  std::size_t offset() const { return pos < at.size() ? at[pos] : (at.empty() ? 0 : at.back() + 1); }
  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, offset()); }
};

Cursor strip(const std::string& raw) {
  Cursor c;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned char ch = static_cast<unsigned char>(raw[i]);
    if (ch > 0x7f) throw parse_error("non-ASCII byte in spec", i);
    if (std::isspace(ch)) continue;
    c.text.push_back(static_cast<char>(ch));
    c.at.push_back(i);
  }
  return c;
}

long parse_integer(Cursor& c) {
  if (!std::isdigit(static_cast<unsigned char>(c.peek()))) c.fail("expected integer");
  long v = 0;
  while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
    v = v * 10 + (c.take() - '0');
    if (v > 1'000'000) c.fail("weight out of range");
  }
  return v;
}

Weight parse_weight(Cursor& c, Group group) {
  const std::size_t start = c.offset();
  const long n = parse_integer(c);
  if (c.peek() == '/') {
    if (c.peek(1) != '2') c.fail("expected '/2' in half-integer weight");
    c.take();
    c.take();
    if (group != Group::SU2)
      throw parse_error("half-integer weight requires SU2", start);
    return Weight::from_doubled(static_cast<int>(n));
  }
  return Weight::integer(static_cast<int>(n));
}

bool starts_term(char ch) { return ch == '(' || ch == 'R'; }

Term parse_term(Cursor& c, Group group, std::vector<std::string>* warnings) {
  Term term;
  if (c.peek() == 'R') {
    // shorthand R3^n
    const std::size_t start = c.offset();
    if (!(c.peek(1) == '3' && c.peek(2) == '^')) c.fail("expected 'R3^' shorthand");
    c.pos += 3;
    const long n = parse_integer(c);
    if (n < 1) throw parse_error("R3^n requires n >= 1", start);
    term.factors.assign(static_cast<std::size_t>(n), Irrep{Weight::integer(1), -1});
    term.parity = (n % 2 == 0) ? 1 : -1;
    return term;
  }
  if (c.peek() != '(') c.fail("expected '(' or 'R3^'");
  c.take();
  term.factors.push_back(Irrep{parse_weight(c, group), -1});
  while (c.peek() == 'x') {
    c.take();
    term.factors.push_back(Irrep{parse_weight(c, group), -1});
  }
  if (c.peek() != ')') c.fail("expected 'x' or ')'");
  c.take();

  term.parity = -1;  // O3 default
  const char next = c.peek();
  const bool parity_mark =
      (next == '-') || (next == '+' && !starts_term(c.peek(1)));
  if (parity_mark) {
    const std::size_t mark_at = c.offset();
    const int p = (c.take() == '+') ? 1 : -1;
    if (group == Group::O3) {
      term.parity = p;
    } else if (warnings) {
      warnings->push_back("parity mark at byte " + std::to_string(mark_at) + " ignored under " +
                          group_name(group));
    }
  }
  return term;
}

}  // namespace

SpaceSpec parse_space_spec(const std::string& text, Group group,
                           std::vector<std::string>* warnings) {
  Cursor c = strip(text);
  if (c.done()) throw parse_error("empty spec", 0);
  SpaceSpec spec;
  spec.group = group;
  spec.terms.push_back(parse_term(c, group, warnings));
  while (!c.done()) {
    if (c.peek() != '+') c.fail("expected '+' between terms");
    c.take();
    spec.terms.push_back(parse_term(c, group, warnings));
  }
  if (group != Group::O3)
    for (auto& t : spec.terms) t.parity = 1;
  spec.validate();
  return spec;
}

std::string render_space_spec(const SpaceSpec& spec) {
  spec.validate();
  std::string out;
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    if (i > 0) out += '+';
    const Term& t = spec.terms[i];
    out += '(';
    for (std::size_t f = 0; f < t.factors.size(); ++f) {
      if (f > 0) out += 'x';
      out += t.factors[f].l.str();
    }
    out += ')';
    if (spec.group == Group::O3) out += (t.parity > 0) ? '+' : '-';
  }
  return out;
}

}  // namespace ict
