#include <cctype>

#include "rst/error.hpp"
#include "rst/treebank.hpp"

namespace rst {

namespace {

//   node := "(" "EDU" <id> ")" | "(" <REL> <NUC> node node ")"
class BracketParser {
 public:
  explicit BracketParser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr n = node();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError,
                msg + " at offset " + std::to_string(pos_), pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view atom() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected a symbol");
    return text_.substr(start, pos_ - start);
  }

  NodePtr node() {
    expect('(');
    const std::size_t head_pos = pos_;
    const auto head = atom();
    if (head == "EDU") {
      const auto id = atom();
      int value = 0;
      for (char c : id) {
        if (!std::isdigit(static_cast<unsigned char>(c)) || value > 100000000)
          fail("bad EDU id");
        value = value * 10 + (c - '0');
      }
      if (value < 1) fail("EDU ids start at 1");
      expect(')');
      return Node::leaf(value);
    }
    const auto rel = relation_class_from_name(head);
    if (!rel) {
      pos_ = head_pos;
      skip_ws();
      fail("unknown relation '" + std::string(head) + "'");
    }
    const std::size_t nuc_pos = pos_;
    const auto nuc = parse_nuclearity(atom());
    if (!nuc) {
      pos_ = nuc_pos;
      skip_ws();
      fail("expected NS, SN or NN");
    }
    NodePtr left = node();
    NodePtr right = node();
    const std::size_t close = pos_;
    expect(')');
    try {
      return Node::internal(std::move(left), std::move(right), *nuc, *rel);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError,
                  std::string(e.what()) + " at offset " + std::to_string(close),
                  close);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void write_node(const Node& n, std::string& out) {
  if (n.is_leaf()) {
    out += "(EDU ";
    out += std::to_string(n.edu());
    out += ')';
    return;
  }
  if (n.children().size() != 2)
    throw Error(ErrorCode::NonBinaryTree,
                "bracketed format holds binary trees only");
  out += '(';
  out += to_string(n.relation().cls);
  out += ' ';
  out += to_string(n.nuclearity());
  out += ' ';
  write_node(n.left(), out);
  out += ' ';
  write_node(n.right(), out);
  out += ')';
}

}  // namespace

NodePtr read_bracketed(std::string_view text) {
  return BracketParser(text).parse();
}

std::string write_bracketed(const Node& node) {
  std::string out;
  write_node(node, out);
  return out;
}

}  // namespace rst
