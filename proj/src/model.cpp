#include "pgibbs/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pgibbs/errors.hpp"

namespace pgibbs {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }
bool is_deterministic(double p) { return p == 0.0 || p == 1.0; }

std::string describe_edge(const Network& net, const Edge& e) {
  return net.node(e.parent).name + " -> " + net.node(e.child).name;
}

double number_field(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError("field '" + where + "' must be a number");
  return j.get<double>();
}

}  // namespace

Network::Network(std::vector<NodeSpec> nodes, std::vector<std::vector<NodeIndex>> layers,
                 std::vector<Edge> edges, std::map<NodeIndex, int> evidence)
    : nodes_(std::move(nodes)),
      layers_(std::move(layers)),
      edges_(std::move(edges)),
      evidence_(std::move(evidence)),
      parents_(nodes_.size()),
      children_(nodes_.size()),
      layer_of_(nodes_.size()) {
  const auto n = nodes_.size();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (NodeIndex i : layers_[l]) {
      if (i >= n) throw ContractError("layer " + std::to_string(l) + " lists node index " +
                                      std::to_string(i) + " out of range");
      if (!layer_of_[i]) layer_of_[i] = l;
    }
  }
  for (const Edge& e : edges_) {
    if (e.parent >= n || e.child >= n) throw ContractError("edge references a node index out of range");
    parents_[e.child].push_back({e.parent, e.weight});
    children_[e.parent].push_back({e.child, e.weight});
  }
  for (const auto& [i, v] : evidence_) {
    if (i >= n) throw ContractError("evidence references node index " + std::to_string(i) + " out of range");
  }
  for (NodeIndex i = 0; i < n; ++i) {
    if (!is_observed(i)) unknowns_.push_back(i);
  }
}

std::optional<std::size_t> Network::layer_of(NodeIndex i) const { return layer_of_.at(i); }

std::optional<NodeIndex> Network::index_of(std::string_view name) const {
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  return std::nullopt;
}

bool Network::operator==(const Network& other) const {
  return nodes_ == other.nodes_ && layers_ == other.layers_ && edges_ == other.edges_ &&
         evidence_ == other.evidence_;
}

std::size_t ValidationReport::error_count() const {
  return std::count_if(issues.begin(), issues.end(),
                       [](const auto& i) { return i.severity == Severity::Error; });
}

std::size_t ValidationReport::warning_count() const {
  return issues.size() - error_count();
}

ValidationReport validate(const Network& net) {
  ValidationReport report;
  auto error = [&](std::string msg) { report.issues.push_back({Severity::Error, std::move(msg)}); };
  auto warning = [&](std::string msg) { report.issues.push_back({Severity::Warning, std::move(msg)}); };

  const auto n = net.size();

  std::set<std::string> names;
  for (const auto& node : net.nodes()) {
    if (node.name.empty()) error("node with empty name");
    if (!names.insert(node.name).second) error("duplicate node name '" + node.name + "'");
  }

  // Layers must partition the node set.
  std::vector<int> seen(n, 0);
  for (const auto& layer : net.layers()) {
    for (NodeIndex i : layer) ++seen[i];
  }
  for (NodeIndex i = 0; i < n; ++i) {
    if (seen[i] == 0) error("node '" + net.node(i).name + "' is not in any layer");
    if (seen[i] > 1) error("node '" + net.node(i).name + "' appears in more than one layer");
  }
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    if (net.layers()[l].empty()) error("layer " + std::to_string(l) + " is empty");
  }

  bool deterministic = false;
  for (const auto& node : net.nodes()) {
    if (!in_unit_interval(node.leak)) {
      error("leak of '" + node.name + "' is outside [0,1]");
    } else if (is_deterministic(node.leak)) {
      deterministic = true;
    }
  }

  std::set<std::pair<NodeIndex, NodeIndex>> edge_set;
  for (const Edge& e : net.edges()) {
    const auto what = describe_edge(net, e);
    if (!in_unit_interval(e.weight)) {
      error("weight of edge " + what + " is outside [0,1]");
    } else if (is_deterministic(e.weight)) {
      deterministic = true;
    }
    if (e.parent == e.child) error("self loop on '" + net.node(e.parent).name + "'");
    if (!edge_set.insert({e.parent, e.child}).second) error("duplicate edge " + what);
    if (e.parent >= e.child) error("edge " + what + " points to an earlier node; node order must be topological");
    const auto lp = net.layer_of(e.parent);
    const auto lc = net.layer_of(e.child);
    if (lp && lc) {
      if (*lp == *lc) {
        error("edge " + what + " connects two nodes of the same layer");
      } else if (*lc != *lp + 1) {
        error("edge " + what + " does not go to the next layer (layer " + std::to_string(*lp) +
              " to " + std::to_string(*lc) + ")");
      }
    }
  }

  // Layering already rules out cycles when the layers are consistent, but
  // an explicit check still reports them for malformed inputs.
  {
    std::vector<int> indegree(n, 0);
    for (const Edge& e : net.edges()) ++indegree[e.child];
    std::vector<NodeIndex> ready;
    for (NodeIndex i = 0; i < n; ++i) {
      if (indegree[i] == 0) ready.push_back(i);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
      const NodeIndex i = ready.back();
      ready.pop_back();
      ++visited;
      for (const Link& c : net.children(i)) {
        if (--indegree[c.node] == 0) ready.push_back(c.node);
      }
    }
    if (visited != n) error("network contains a directed cycle");
  }

  for (const auto& [i, v] : net.evidence()) {
    if (v != 0 && v != 1) {
      error("evidence for '" + net.node(i).name + "' must be 0 or 1, got " + std::to_string(v));
    }
  }

  if (deterministic) {
    warning("some weights or leaks are exactly 0 or 1; configurations of zero probability exist "
            "and coalescence is not guaranteed");
  }

  report.ok = report.error_count() == 0;
  return report;
}

Network parse_network(std::string_view text, bool check) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed network document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("network document must be a JSON object");
  for (const char* key : {"layers", "nodes"}) {
    if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "layers" && key != "nodes" && key != "edges" && key != "evidence") {
      throw ParseError("unknown field '" + key + "'");
    }
  }

  const Json& jnodes = doc["nodes"];
  if (!jnodes.is_object()) throw ParseError("field 'nodes' must be an object");
  const Json& jlayers = doc["layers"];
  if (!jlayers.is_array()) throw ParseError("field 'layers' must be an array of arrays");

  std::vector<NodeSpec> nodes;
  std::vector<std::vector<NodeIndex>> layers;
  std::map<std::string, NodeIndex, std::less<>> index;
  for (std::size_t l = 0; l < jlayers.size(); ++l) {
    const Json& jlayer = jlayers[l];
    const auto where = "layers[" + std::to_string(l) + "]";
    if (!jlayer.is_array()) throw ParseError("field '" + where + "' must be an array");
    std::vector<NodeIndex> layer;
    for (const Json& jname : jlayer) {
      if (!jname.is_string()) throw ParseError("field '" + where + "' must contain node names");
      const auto name = jname.get<std::string>();
      if (index.count(name)) throw ParseError("node '" + name + "' declared twice in 'layers'");
      if (!jnodes.contains(name)) throw ReferenceError("node '" + name + "' in " + where + " has no entry in 'nodes'");
      const Json& spec = jnodes[name];
      if (!spec.is_object()) throw ParseError("field 'nodes." + name + "' must be an object");
      for (const auto& [key, value] : spec.items()) {
        if (key != "leak") throw ParseError("unknown field 'nodes." + name + "." + key + "'");
      }
      if (!spec.contains("leak")) throw ParseError("missing field 'nodes." + name + ".leak'");
      const double leak = number_field(spec["leak"], "nodes." + name + ".leak");
      index.emplace(name, nodes.size());
      layer.push_back(nodes.size());
      nodes.push_back({name, leak});
    }
    layers.push_back(std::move(layer));
  }
  for (const auto& [name, value] : jnodes.items()) {
    if (!index.count(name)) throw ParseError("node '" + name + "' is not listed in any layer");
  }

  auto lookup = [&](const Json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError("field '" + where + "' must be a node name");
    const auto it = index.find(j.get<std::string>());
    if (it == index.end()) {
      throw ReferenceError("unknown node '" + j.get<std::string>() + "' referenced by " + where);
    }
    return it->second;
  };

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    const Json& jedges = doc["edges"];
    if (!jedges.is_array()) throw ParseError("field 'edges' must be an array");
    for (std::size_t e = 0; e < jedges.size(); ++e) {
      const auto where = "edges[" + std::to_string(e) + "]";
      const Json& je = jedges[e];
      if (!je.is_array() || je.size() != 3) {
        throw ParseError("field '" + where + "' must be [parent, child, weight]");
      }
      edges.push_back({lookup(je[0], where), lookup(je[1], where), number_field(je[2], where + "[2]")});
    }
  }

  std::map<NodeIndex, int> evidence;
  if (doc.contains("evidence")) {
    const Json& jev = doc["evidence"];
    if (!jev.is_object()) throw ParseError("field 'evidence' must be an object");
    for (const auto& [name, value] : jev.items()) {
      const auto where = "evidence." + name;
      const NodeIndex i = lookup(Json(name), where);
      if (!value.is_number_integer()) throw ParseError("field '" + where + "' must be 0 or 1");
      evidence[i] = value.get<int>();
    }
  }

  Network net(std::move(nodes), std::move(layers), std::move(edges), std::move(evidence));
  if (check) {
    const auto report = validate(net);
    if (!report.ok) {
      std::string msg = "invalid network:";
      for (const auto& issue : report.issues) {
        if (issue.severity == Severity::Error) msg += " " + issue.message + ";";
      }
      throw ValidationError(msg);
    }
  }
  return net;
}

Network load_network(const std::string& path, bool check) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str(), check);
}

std::string serialize_network(const Network& net) {
  OrderedJson doc;
  doc["layers"] = OrderedJson::array();
  for (const auto& layer : net.layers()) {
    auto jl = OrderedJson::array();
    for (NodeIndex i : layer) jl.push_back(net.node(i).name);
    doc["layers"].push_back(std::move(jl));
  }
  doc["nodes"] = OrderedJson::object();
  for (const auto& node : net.nodes()) doc["nodes"][node.name] = {{"leak", node.leak}};
  doc["edges"] = OrderedJson::array();
  for (const Edge& e : net.edges()) {
    doc["edges"].push_back({net.node(e.parent).name, net.node(e.child).name, e.weight});
  }
  doc["evidence"] = OrderedJson::object();
  for (const auto& [i, v] : net.evidence()) doc["evidence"][net.node(i).name] = v;
  return doc.dump(2) + "\n";
}

double noisy_or_prob(const Network& net, NodeIndex node, std::span<const std::uint8_t> parent_values) {
  if (node >= net.size()) throw ContractError("node index out of range");
  const auto parents = net.parents(node);
  if (parent_values.size() != parents.size()) {
    throw ContractError("node '" + net.node(node).name + "' has " + std::to_string(parents.size()) +
                        " parents but " + std::to_string(parent_values.size()) + " values were given");
  }
  double off = 1.0 - net.node(node).leak;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parent_values[i] > 1) throw ContractError("parent values must be 0 or 1");
    if (parent_values[i]) off *= 1.0 - parents[i].weight;
  }
  return 1.0 - off;
}

double noisy_or_prob_in(const Network& net, NodeIndex node, std::span<const std::uint8_t> values) {
  double off = 1.0 - net.node(node).leak;
  for (const Link& p : net.parents(node)) {
    if (values[p.node]) off *= 1.0 - p.weight;
  }
  return 1.0 - off;
}

}  // namespace pgibbs
