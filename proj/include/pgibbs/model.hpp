#pragma once

// Layered noisy-OR belief networks: structure, file format, validation and
// the noisy-OR conditional probability.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pgibbs {

using NodeIndex = std::size_t;

struct NodeSpec {
  std::string name;
  /// Probability the node turns on with no active parent (the prior for roots).
  double leak = 0.0;

  bool operator==(const NodeSpec&) const = default;
};

struct Edge {
  NodeIndex parent = 0;
  NodeIndex child = 0;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

/// One incoming or outgoing link as seen from a node.
struct Link {
  NodeIndex node = 0;
  double weight = 0.0;
};

/// Immutable layered noisy-OR network.
///
/// Node indices are positions in `nodes`. The constructor only checks that
/// every index it is handed exists; semantic checks (layering, probability
/// ranges, evidence values) belong to `validate`.
class Network {
 public:
  Network(std::vector<NodeSpec> nodes, std::vector<std::vector<NodeIndex>> layers,
          std::vector<Edge> edges, std::map<NodeIndex, int> evidence);

  std::size_t size() const { return nodes_.size(); }
  const NodeSpec& node(NodeIndex i) const { return nodes_.at(i); }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<std::vector<NodeIndex>>& layers() const { return layers_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::map<NodeIndex, int>& evidence() const { return evidence_; }

  std::span<const Link> parents(NodeIndex i) const { return parents_.at(i); }
  std::span<const Link> children(NodeIndex i) const { return children_.at(i); }

  bool is_observed(NodeIndex i) const { return evidence_.count(i) != 0; }
  /// Unobserved nodes in index order.
  std::span<const NodeIndex> unknowns() const { return unknowns_; }
  /// Layer holding node i, or nullopt when no layer lists it.
  std::optional<std::size_t> layer_of(NodeIndex i) const;
  std::optional<NodeIndex> index_of(std::string_view name) const;

  bool operator==(const Network& other) const;

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<std::vector<NodeIndex>> layers_;
  std::vector<Edge> edges_;
  std::map<NodeIndex, int> evidence_;

  std::vector<std::vector<Link>> parents_;
  std::vector<std::vector<Link>> children_;
  std::vector<NodeIndex> unknowns_;
  std::vector<std::optional<std::size_t>> layer_of_;
};

enum class Severity { Error, Warning };

struct ValidationIssue {
  Severity severity = Severity::Error;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> issues;

  std::size_t error_count() const;
  std::size_t warning_count() const;
};

ValidationReport validate(const Network& net);

/// Parses the JSON network format. With `check` set, a network that fails
/// validation is rejected with ValidationError.
Network parse_network(std::string_view text, bool check = true);
Network load_network(const std::string& path, bool check = true);
std::string serialize_network(const Network& net);

/// 1 - (1 - leak) * prod over on-parents of (1 - weight).
/// `parent_values` is aligned with `net.parents(node)`.
double noisy_or_prob(const Network& net, NodeIndex node,
                     std::span<const std::uint8_t> parent_values);

/// Same quantity, reading parent values out of a full assignment.
double noisy_or_prob_in(const Network& net, NodeIndex node,
                        std::span<const std::uint8_t> values);

}  // namespace pgibbs
