// rs3 (rstweb) reader and writer.
//
// rs3 encodes a tree as a flat list of segments and groups, each pointing at
// its parent. Satellites point at their nucleus with a mononuclear relname;
// nuclei of a span group point at the group with relname "span"; members of a
// multinuc group point at the group with the multinuclear relname.

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "rst/error.hpp"
#include "rst/treebank.hpp"

namespace rst {

namespace {

namespace pt = boost::property_tree;

enum class GroupType { Segment, Span, Multinuc };

struct RsNode {
  std::string id;
  GroupType type = GroupType::Segment;
  std::string parent;
  std::string relname;
  std::string text;
  int edu = 0;
};

enum class Role { SpanChild, MultinucChild, Satellite };

struct Child {
  std::size_t node;
  Role role;
  RelationClass rel;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (b < e && ws(s[b])) ++b;
  while (e > b && ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::optional<long> to_long(const std::string& s) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

class TreeBuilder {
 public:
  TreeBuilder(std::vector<RsNode> nodes, std::vector<std::vector<Child>> kids)
      : nodes_(std::move(nodes)),
        kids_(std::move(kids)),
        state_(nodes_.size(), 0) {}

  NodePtr build(std::size_t i) {
    if (state_[i] == 1)
      throw Error(ErrorCode::MalformedXml, "cycle through node " + nodes_[i].id);
    state_[i] = 1;
    NodePtr content = build_content(i);

    std::vector<std::pair<NodePtr, RelationClass>> sats;
    for (const auto& c : kids_[i])
      if (c.role == Role::Satellite) sats.emplace_back(build(c.node), c.rel);
    state_[i] = 2;
    ++visited_;
    if (sats.empty()) return content;

    std::sort(sats.begin(), sats.end(), [](const auto& a, const auto& b) {
      return a.first->span().first < b.first->span().first;
    });
    if (sats.size() == 1) {
      const auto& [sat, rel] = sats.front();
      const bool nucleus_first = content->span().first < sat->span().first;
      return nucleus_first
                 ? checked_nary({content, sat}, Nuclearity::NS, rel, i)
                 : checked_nary({sat, content}, Nuclearity::SN, rel, i);
    }
    // Several satellites on one nucleus: kept n-ary so binarize can reject it.
    std::vector<NodePtr> all{content};
    for (const auto& s : sats) all.push_back(s.first);
    std::sort(all.begin(), all.end(), [](const NodePtr& a, const NodePtr& b) {
      return a->span().first < b->span().first;
    });
    const auto nuc =
        all.front() == content ? Nuclearity::NS : Nuclearity::SN;
    return checked_nary(std::move(all), nuc, sats.front().second, i);
  }

  std::size_t visited() const { return visited_; }

 private:
  NodePtr build_content(std::size_t i) {
    const RsNode& n = nodes_[i];
    if (n.type == GroupType::Segment) {
      for (const auto& c : kids_[i])
        if (c.role != Role::Satellite)
          throw Error(ErrorCode::MalformedXml,
                      "segment " + n.id + " has a non-satellite child");
      return Node::leaf(n.edu);
    }
    std::vector<std::pair<NodePtr, RelationClass>> members;
    for (const auto& c : kids_[i]) {
      if (c.role == Role::Satellite) continue;
      members.emplace_back(build(c.node), c.rel);
    }
    if (members.empty())
      throw Error(ErrorCode::MalformedXml, "group " + n.id + " is empty");
    if (n.type == GroupType::Span) {
      if (members.size() != 1)
        throw Error(ErrorCode::MalformedXml,
                    "span group " + n.id + " has several nuclei");
      return members.front().first;
    }
    if (members.size() == 1) return members.front().first;
    std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) {
      return a.first->span().first < b.first->span().first;
    });
    std::vector<NodePtr> ch;
    for (auto& m : members) ch.push_back(m.first);
    return checked_nary(std::move(ch), Nuclearity::NN, members.front().second, i);
  }

  NodePtr checked_nary(std::vector<NodePtr> ch, Nuclearity nuc,
                       RelationClass rel, std::size_t i) {
    try {
      return Node::nary(std::move(ch), nuc, rel);
    } catch (const Error&) {
      throw Error(ErrorCode::MalformedXml,
                  "node " + nodes_[i].id + " covers a discontinuous span");
    }
  }

  std::vector<RsNode> nodes_;
  std::vector<std::vector<Child>> kids_;
  std::vector<int> state_;
  std::size_t visited_ = 0;
};

}  // namespace

Document read_rs3(std::string_view xml, std::string doc_id,
                  const RelationAliasTable& aliases) {
  pt::ptree root;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, root, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedXml, e.message(), e.line());
  }
  const auto rst = root.get_child_optional("rst");
  if (!rst) throw Error(ErrorCode::MalformedXml, "missing <rst> root element");

  // Declared relation types, keyed by normalized name.
  std::map<std::string, std::set<std::string>> declared;
  if (auto rels = rst->get_child_optional("header.relations")) {
    for (const auto& [tag, rel] : *rels) {
      if (tag != "rel") continue;
      const auto name = rel.get<std::string>("<xmlattr>.name", "");
      const auto type = rel.get<std::string>("<xmlattr>.type", "rst");
      declared[RelationAliasTable::normalize_key(name)].insert(type);
    }
  }

  std::vector<RsNode> nodes;
  std::unordered_map<std::string, std::size_t> by_id;
  std::vector<std::size_t> segments;
  if (auto body = rst->get_child_optional("body")) {
    for (const auto& [tag, el] : *body) {
      if (tag != "segment" && tag != "group") continue;
      RsNode n;
      n.id = el.get<std::string>("<xmlattr>.id", "");
      if (n.id.empty())
        throw Error(ErrorCode::MalformedXml, "<" + tag + "> without id");
      n.parent = el.get<std::string>("<xmlattr>.parent", "");
      n.relname = el.get<std::string>("<xmlattr>.relname", "");
      if (tag == "segment") {
        n.text = trim(el.data());
        segments.push_back(nodes.size());
      } else {
        const auto type = el.get<std::string>("<xmlattr>.type", "span");
        n.type = type == "multinuc" ? GroupType::Multinuc : GroupType::Span;
      }
      if (!by_id.emplace(n.id, nodes.size()).second)
        throw Error(ErrorCode::MalformedXml, "duplicate id " + n.id);
      nodes.push_back(std::move(n));
    }
  }
  if (segments.empty()) throw Error(ErrorCode::MalformedXml, "no segments");

  const bool numeric = std::all_of(segments.begin(), segments.end(), [&](auto i) {
    return to_long(nodes[i].id).has_value();
  });
  if (numeric)
    std::stable_sort(segments.begin(), segments.end(), [&](auto a, auto b) {
      return *to_long(nodes[a].id) < *to_long(nodes[b].id);
    });

  std::vector<std::vector<std::string>> edu_tokens;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    RsNode& s = nodes[segments[k]];
    s.edu = static_cast<int>(k) + 1;
    auto toks = split_ws(s.text);
    if (toks.empty())
      throw Error(ErrorCode::MalformedXml, "segment " + s.id + " is empty");
    edu_tokens.push_back(std::move(toks));
  }
  Document doc = make_document(std::move(doc_id), edu_tokens);

  std::vector<std::vector<Child>> kids(nodes.size());
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const RsNode& n = nodes[i];
    if (n.parent.empty()) {
      roots.push_back(i);
      continue;
    }
    auto pit = by_id.find(n.parent);
    if (pit == by_id.end())
      throw Error(ErrorCode::DanglingParent,
                  "node " + n.id + " points at undefined parent " + n.parent);
    const RsNode& p = nodes[pit->second];
    const auto key = RelationAliasTable::normalize_key(n.relname);
    Child c{i, Role::Satellite, RelationClass::Span};
    if (key == "span") {
      if (p.type != GroupType::Span)
        throw Error(ErrorCode::MalformedXml,
                    "node " + n.id + " has relname span under non-span parent");
      c.role = Role::SpanChild;
    } else {
      auto cls = aliases.lookup(n.relname);
      if (!cls || *cls == RelationClass::Span)
        throw Error(ErrorCode::UnknownRelation,
                    "'" + n.relname + "' on node " + n.id);
      c.rel = *cls;
      if (p.type == GroupType::Multinuc) {
        auto dit = declared.find(key);
        const bool rst_only = dit != declared.end() &&
                              dit->second.size() == 1 &&
                              dit->second.contains("rst");
        if (!rst_only) c.role = Role::MultinucChild;
      }
    }
    kids[pit->second].push_back(c);
  }
  if (roots.size() > 1) {
    std::string ids;
    for (auto r : roots) ids += (ids.empty() ? "" : ",") + nodes[r].id;
    throw Error(ErrorCode::MultipleRoots, "parentless nodes: " + ids);
  }
  if (roots.empty())
    throw Error(ErrorCode::MalformedXml, "no root: parent links form a cycle");

  const std::size_t node_count = nodes.size();
  TreeBuilder builder(std::move(nodes), std::move(kids));
  doc.tree = builder.build(roots.front());
  if (builder.visited() != node_count)
    throw Error(ErrorCode::MalformedXml, "unreachable nodes (cycle)");
  return doc;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Rs3Writer {
  struct Entry {
    int id;
    std::string parent;
    std::string relname;
    GroupType type;
  };

  int next_group;
  std::map<int, Entry> groups;
  std::map<int, Entry> segs;
  std::set<std::pair<std::string, std::string>> rels;  // (name, type)

  void attach(int id, int parent, std::string relname) {
    auto& table = segs.contains(id) ? segs : groups;
    table[id].parent = std::to_string(parent);
    table[id].relname = std::move(relname);
  }

  int new_group(GroupType type) {
    const int id = next_group++;
    groups[id] = {id, "", "", type};
    return id;
  }

  // Returns the id of the topmost rs3 node representing `n`.
  int emit(const Node& n) {
    if (n.is_leaf()) {
      segs[n.edu()] = {n.edu(), "", "", GroupType::Segment};
      return n.edu();
    }
    const std::string rel(to_string(n.relation().cls));
    if (n.nuclearity() == Nuclearity::NN) {
      const int mg = new_group(GroupType::Multinuc);
      for (const auto& c : n.children()) attach(emit(*c), mg, rel);
      rels.insert({rel, "multinuc"});
      // Wrapped so satellites attach to a span group, never a multinuc one.
      const int wrap = new_group(GroupType::Span);
      attach(mg, wrap, "span");
      return wrap;
    }
    if (n.children().size() != 2)
      throw Error(ErrorCode::NonBinaryTree, "mononuclear n-ary node");
    const bool ns = n.nuclearity() == Nuclearity::NS;
    const Node& nuc = ns ? n.left() : n.right();
    const Node& sat = ns ? n.right() : n.left();
    const int g = new_group(GroupType::Span);
    const int nuc_id = emit(nuc);
    const int sat_id = emit(sat);
    attach(nuc_id, g, "span");
    attach(sat_id, nuc_id, rel);
    rels.insert({rel, "rst"});
    return g;
  }
};

}  // namespace

std::string write_rs3(const Document& doc) {
  if (!doc.tree)
    throw Error(ErrorCode::MissingTree, "document '" + doc.doc_id + "'");
  const int n_edus = static_cast<int>(doc.tree->leaf_count());
  if (static_cast<std::size_t>(n_edus) != doc.edus.size())
    throw Error(ErrorCode::LeafMismatch, "tree leaves do not match EDUs");

  Rs3Writer w{n_edus + 1, {}, {}, {}};
  w.emit(*doc.tree);

  std::ostringstream out;
  out << "<rst>\n  <header>\n    <relations>\n";
  for (const auto& [name, type] : w.rels)
    out << "      <rel name=\"" << xml_escape(name) << "\" type=\"" << type
        << "\"/>\n";
  out << "    </relations>\n  </header>\n  <body>\n";
  auto attrs = [&](const Rs3Writer::Entry& e) {
    if (!e.parent.empty())
      out << " parent=\"" << e.parent << "\" relname=\"" << xml_escape(e.relname)
          << "\"";
  };
  for (const auto& [id, e] : w.segs) {
    out << "    <segment id=\"" << id << "\"";
    attrs(e);
    out << ">" << xml_escape(doc.edus[static_cast<std::size_t>(id - 1)].text)
        << "</segment>\n";
  }
  for (const auto& [id, e] : w.groups) {
    out << "    <group id=\"" << id << "\" type=\""
        << (e.type == GroupType::Multinuc ? "multinuc" : "span") << "\"";
    attrs(e);
    out << "/>\n";
  }
  out << "  </body>\n</rst>\n";
  return out.str();
}

}  // namespace rst
