#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bimt {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Json tree_to_json(const FiniteRTree& t) {
  Json nodes = Json::array();
  for (NodeId v = 0; v < t.node_count(); ++v) {
    Json n;
    n["id"] = v;
    if (v == t.root()) {
      n["parent"] = nullptr;
      n["edge_length"] = nullptr;
    } else {
      n["parent"] = t.parent(v);
      n["edge_length"] = t.edge_length(v);
    }
    nodes.push_back(std::move(n));
  }
  Json j;
  j["nodes"] = std::move(nodes);
  j["root"] = t.root();
  return j;
}

std::shared_ptr<const FiniteRTree> tree_from_json(const Json& j) {
  if (!j.contains("nodes") || !j.contains("root"))
    throw std::invalid_argument("tree json needs 'nodes' and 'root'");
  if (j["root"].get<int>() != 0)
    throw std::invalid_argument("tree json: root must have id 0");
  std::vector<FiniteRTree::NodeSpec> spec;
  const auto& nodes = j["nodes"];
  spec.reserve(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n["id"].get<int>() != static_cast<int>(i))
      throw std::invalid_argument("tree json: ids must be dense and in order");
    if (n["parent"].is_null())
      spec.push_back({kNoNode, 0.0});
    else
      spec.push_back({n["parent"].get<NodeId>(), n["edge_length"].get<double>()});
  }
  return std::make_shared<FiniteRTree>(std::move(spec));
}

Json point_to_json(const TreePoint& p) {
  Json j;
  if (p.is_node()) {
    j["node"] = p.node;
  } else {
    j["edge"] = p.edge;
    j["offset"] = p.offset;
  }
  return j;
}

TreePoint point_from_json(const Json& j, const FiniteRTree& t) {
  TreePoint p;
  if (j.contains("node")) {
    p = TreePoint::at_node(j["node"].get<NodeId>());
  } else if (j.contains("edge")) {
    p = make_point(t, j["edge"].get<NodeId>(), j["offset"].get<double>());
  } else {
    throw std::invalid_argument("point json needs 'node' or 'edge'+'offset'");
  }
  validate_point(t, p);
  return p;
}

Json measure_to_json(const TreeMeasure& m) {
  Json j;
  j["length_coeff"] = m.edge_coeffs();
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) {
    Json e;
    e["point"] = point_to_json(a.point);
    e["mass"] = a.mass;
    atoms.push_back(std::move(e));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

TreeMeasure measure_from_json(const Json& j, std::shared_ptr<const FiniteRTree> tree) {
  std::vector<double> coeff;
  if (j.contains("length_coeff")) coeff = j["length_coeff"].get<std::vector<double>>();
  if (coeff.empty()) coeff.assign(tree->node_count(), 0.0);
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    for (const auto& e : j["atoms"])
      atoms.push_back({point_from_json(e["point"], *tree), e["mass"].get<double>()});
  }
  return TreeMeasure::make(tree, coeff, std::move(atoms));
}

Json bimeasure_to_json(const BiMeasureTree& x) {
  Json j;
  j["tree"] = tree_to_json(x.tree());
  j["mu"] = measure_to_json(x.mu());
  j["nu"] = measure_to_json(x.nu());
  return j;
}

BiMeasureTree bimeasure_from_json(const Json& j) {
  auto tree = tree_from_json(j.at("tree"));
  TreeMeasure mu = j.contains("mu") ? measure_from_json(j["mu"], tree) : TreeMeasure::zero(tree);
  TreeMeasure nu = j.contains("nu") ? measure_from_json(j["nu"], tree) : TreeMeasure::zero(tree);
  return BiMeasureTree(tree, std::move(mu), std::move(nu));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvWriter::CsvWriter(const std::string& path, const Json& config, const std::string& header)
    : path_(path) {
  buffer_ = "# config=" + config.dump() + "\n" + header + "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  write_text_file(path_, buffer_);
  closed_ = true;
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

std::string excursion_csv(const Excursion& e, const Json& config) {
  std::string out = "# config=" + config.dump() + "\ntime,value\n";
  for (const auto& [t, v] : e.breakpoints)
    out += format_double(t) + "," + format_double(v) + "\n";
  return out;
}

}  // namespace bimt
