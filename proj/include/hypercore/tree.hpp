#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Rooted alternating variable/factor trees. The root is a variable node;
// node kind is determined by depth parity (even = variable, odd = factor).
// Children of a node are stored contiguously (trees are built level by
// level), which keeps depth-truncation and bottom-up sweeps cheap.
//
// Label conventions, by producer:
//   - plain {0,1} marks or messages: 0 / 1
//   - 9-type triples (mark, up, down): mark*4 + up*2 + down

namespace hypercore {

struct MarkedTree {
  struct Node {
    std::int32_t parent = -1;
    std::uint32_t first_child = 0;
    std::uint32_t num_children = 0;
    std::uint16_t depth = 0;
  };

  int r = 0;  // arity of the generating model; factor nodes have r-1 children
  std::vector<Node> nodes;
  std::vector<std::uint8_t> labels;

  bool is_variable(std::size_t i) const { return nodes[i].depth % 2 == 0; }
  std::size_t size() const { return nodes.size(); }

  std::size_t add_root() {
    nodes.push_back(Node{});
    labels.push_back(0);
    return 0;
  }

  // Appends `count` children under `parent`; children of one parent must be
  // added in a single call so they stay contiguous.
  std::size_t add_children(std::size_t parent, std::uint32_t count) {
    Node& par = nodes[parent];
    if (par.num_children != 0)
      throw std::logic_error("MarkedTree: children of a node must be added once");
    par.first_child = (std::uint32_t)nodes.size();
    par.num_children = count;
    std::uint16_t d = (std::uint16_t)(par.depth + 1);
    std::size_t first = nodes.size();
    for (std::uint32_t i = 0; i < count; ++i) {
      Node child;
      child.parent = (std::int32_t)parent;
      child.depth = d;
      nodes.push_back(child);
      labels.push_back(0);
    }
    return first;
  }

  int max_depth() const {
    int d = 0;
    for (const Node& node : nodes) d = std::max<int>(d, node.depth);
    return d;
  }
};

constexpr std::uint8_t kType000 = 0;
constexpr std::uint8_t kType001 = 1;
constexpr std::uint8_t kType010 = 2;
constexpr std::uint8_t kType110 = 6;
constexpr std::uint8_t kType111 = 7;

inline std::uint8_t type_mark(std::uint8_t t) { return (t >> 2) & 1; }
inline std::uint8_t type_up(std::uint8_t t) { return (t >> 1) & 1; }
inline std::uint8_t type_down(std::uint8_t t) { return t & 1; }
inline std::uint8_t make_type(int mark, int up, int down) {
  return (std::uint8_t)((mark << 2) | (up << 1) | down);
}

inline bool variable_type_ok(std::uint8_t t) {
  return t == kType000 || t == kType001 || t == kType010 || t == kType110 || t == kType111;
}
inline bool factor_type_ok(std::uint8_t t) {
  return t == kType000 || t == kType001 || t == kType010 || t == kType111;
}

}  // namespace hypercore
