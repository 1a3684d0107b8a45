#include "sembcd/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stack>

#include <nlohmann/json.hpp>

namespace sembcd {

namespace {

// Iterative Tarjan SCC over the directed part.
void compute_scc(int n, const std::vector<std::vector<NodeId>>& children,
                 std::vector<int>& scc_id, std::vector<int>& scc_size) {
  scc_id.assign(n, -1);
  std::vector<int> index(n, -1), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack_nodes;
  int next_index = 0;
  int n_comp = 0;

  struct Frame {
    int v;
    std::size_t child;
  };

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames;
    frames.push_back({root, 0});
    index[root] = lowlink[root] = next_index++;
    stack_nodes.push_back(root);
    on_stack[root] = true;

    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < children[f.v].size()) {
        int w = children[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          stack_nodes.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
        }
        if (lowlink[v] == index[v]) {
          int comp = n_comp++;
          while (true) {
            int w = stack_nodes.back();
            stack_nodes.pop_back();
            on_stack[w] = false;
            scc_id[w] = comp;
            if (w == v) break;
          }
        }
      }
    }
  }

  scc_size.assign(n_comp, 0);
  for (int v = 0; v < n; ++v) ++scc_size[scc_id[v]];
}

}  // namespace

MixedGraph::MixedGraph(int n_nodes, std::vector<Edge> directed, std::vector<Edge> bidirected)
    : n_(n_nodes), directed_(std::move(directed)), bidirected_(std::move(bidirected)) {
  if (n_ < 0) throw ParseError("graph: negative node count");

  for (auto& [a, b] : bidirected_) {
    if (a > b) std::swap(a, b);
  }
  std::sort(directed_.begin(), directed_.end());
  std::sort(bidirected_.begin(), bidirected_.end());

  auto check_edge = [this](const Edge& e, const char* kind) {
    if (e.first < 0 || e.first >= n_ || e.second < 0 || e.second >= n_) {
      throw ParseError(std::string("graph: ") + kind + " edge endpoint out of range");
    }
    if (e.first == e.second) {
      throw ParseError(std::string("graph: self-loop in ") + kind + " edges");
    }
  };
  for (const Edge& e : directed_) check_edge(e, "directed");
  for (const Edge& e : bidirected_) check_edge(e, "bidirected");

  if (std::adjacent_find(directed_.begin(), directed_.end()) != directed_.end() ||
      std::adjacent_find(bidirected_.begin(), bidirected_.end()) != bidirected_.end()) {
    throw ParseError("graph: duplicate edge");
  }

  parents_.assign(n_, {});
  children_.assign(n_, {});
  siblings_.assign(n_, {});
  for (const auto& [tail, head] : directed_) {
    parents_[head].push_back(tail);
    children_[tail].push_back(head);
  }
  for (const auto& [a, b] : bidirected_) {
    siblings_[a].push_back(b);
    siblings_[b].push_back(a);
  }
  for (int v = 0; v < n_; ++v) {
    std::sort(parents_[v].begin(), parents_[v].end());
    std::sort(children_[v].begin(), children_[v].end());
    std::sort(siblings_[v].begin(), siblings_[v].end());
  }

  compute_scc(n_, children_, scc_id_, scc_size_);
}

MixedGraph MixedGraph::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) {
    throw ParseError("graph: expected object with integer field 'n'");
  }
  auto read_edges = [&j](const char* key) {
    std::vector<Edge> edges;
    if (!j.contains(key)) return edges;
    const auto& arr = j[key];
    if (!arr.is_array()) throw ParseError(std::string("graph: '") + key + "' must be an array");
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        throw ParseError(std::string("graph: entries of '") + key + "' must be [int, int]");
      }
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return edges;
  };
  return MixedGraph(j["n"].get<int>(), read_edges("directed"), read_edges("bidirected"));
}

MixedGraph MixedGraph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("graph: cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string MixedGraph::to_json_text(int indent) const {
  nlohmann::json j;
  j["n"] = n_;
  j["directed"] = nlohmann::json::array();
  for (const auto& [t, h] : directed_) j["directed"].push_back({t, h});
  j["bidirected"] = nlohmann::json::array();
  for (const auto& [a, b] : bidirected_) j["bidirected"].push_back({a, b});
  return j.dump(indent);
}

void MixedGraph::check_node(NodeId i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("node index out of range");
}

const std::vector<NodeId>& MixedGraph::parents(NodeId i) const {
  check_node(i);
  return parents_[i];
}

const std::vector<NodeId>& MixedGraph::siblings(NodeId i) const {
  check_node(i);
  return siblings_[i];
}

const std::vector<NodeId>& MixedGraph::children(NodeId i) const {
  check_node(i);
  return children_[i];
}

bool MixedGraph::has_directed(NodeId tail, NodeId head) const {
  return std::binary_search(directed_.begin(), directed_.end(), Edge{tail, head});
}

bool MixedGraph::has_bidirected(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(bidirected_.begin(), bidirected_.end(), Edge{a, b});
}

bool MixedGraph::node_on_cycle(NodeId i) const {
  check_node(i);
  return scc_size_[scc_id_[i]] >= 2;
}

bool MixedGraph::directed_edge_on_cycle(NodeId tail, NodeId head) const {
  check_node(tail);
  check_node(head);
  return scc_id_[tail] == scc_id_[head] && scc_size_[scc_id_[tail]] >= 2;
}

std::vector<NodeId> nodes_on_cycles(const MixedGraph& g) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.n_nodes(); ++v) {
    if (g.node_on_cycle(v)) out.push_back(v);
  }
  return out;
}

bool is_simple(const MixedGraph& g) {
  std::set<Edge> pairs;
  auto visit = [&pairs](NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return pairs.insert({a, b}).second;
  };
  for (const auto& [t, h] : g.directed_edges()) {
    if (!visit(t, h)) return false;
  }
  for (const auto& [a, b] : g.bidirected_edges()) {
    if (!visit(a, b)) return false;
  }
  return true;
}

NodeSchedule classify_nodes(const MixedGraph& g) {
  NodeSchedule s;
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    bool one_shot = g.siblings(i).empty();
    if (one_shot) {
      for (NodeId p : g.parents(i)) {
        if (g.directed_edge_on_cycle(p, i)) {
          one_shot = false;
          break;
        }
      }
    }
    (one_shot ? s.one_shot : s.iterative).push_back(i);
  }
  return s;
}

}  // namespace sembcd
