#include "epictrl/edge_list.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "epictrl/error.hpp"

namespace epictrl {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream stream(line);
  std::vector<std::string> fields;
  std::string field;
  while (stream >> field) fields.push_back(field);
  return fields;
}

double parse_real(const std::string& text, std::size_t line, const char* what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line, std::string("cannot parse ") + what + " '" + text + "'");
  return value;
}

}  // namespace

ContactNetwork parse_network(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, VertexId> index;
  std::vector<Edge> edges;
  std::set<std::pair<VertexId, VertexId>> seen;
  std::optional<std::pair<std::string, std::size_t>> source_label;
  std::vector<std::pair<std::string, std::size_t>> seed_labels;
  bool have_seeds = false;

  auto vertex_of = [&](const std::string& label) {
    auto [it, inserted] = index.emplace(label, static_cast<VertexId>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto fields = split_fields(line);
    if (fields.empty()) continue;

    if (fields[0][0] == '@') {
      if (fields[0] == "@source") {
        if (fields.size() != 2) throw ParseError(line_no, "@source takes one label");
        if (source_label) throw ParseError(line_no, "@source given twice");
        source_label = {fields[1], line_no};
      } else if (fields[0] == "@seeds") {
        if (fields.size() < 2) throw ParseError(line_no, "@seeds needs at least one label");
        have_seeds = true;
        for (std::size_t i = 1; i < fields.size(); ++i)
          seed_labels.emplace_back(fields[i], line_no);
      } else {
        throw ParseError(line_no, "unknown directive " + fields[0]);
      }
      continue;
    }

    if (fields.size() != 4)
      throw ParseError(line_no, "expected 'u v cost prob', got " +
                                    std::to_string(fields.size()) + " fields");
    Edge edge;
    edge.cost = parse_real(fields[2], line_no, "cost");
    edge.prob = parse_real(fields[3], line_no, "probability");
    if (!(edge.prob >= 0.0 && edge.prob <= 1.0))
      throw ParseError(line_no, "probability " + fields[3] + " outside [0, 1]");
    if (!(edge.cost >= 0.0)) throw ParseError(line_no, "negative cost " + fields[2]);
    edge.u = vertex_of(fields[0]);
    edge.v = vertex_of(fields[1]);
    if (!seen.insert(std::minmax(edge.u, edge.v)).second)
      throw ParseError(line_no, "duplicate edge " + fields[0] + " " + fields[1]);
    edges.push_back(edge);
  }

  if (labels.empty()) throw ParseError(line_no, "no edges");

  VertexId source = 0;
  if (source_label) {
    auto it = index.find(source_label->first);
    if (it == index.end())
      throw ParseError(source_label->second,
                       "unknown source label '" + source_label->first + "'");
    source = it->second;
  } else if (!have_seeds) {
    throw ParseError(line_no, "missing @source or @seeds directive");
  }

  const std::size_t n = labels.size();
  ContactNetwork network(n, std::move(edges), source, std::move(labels));
  if (!have_seeds) return network;

  std::vector<VertexId> seeds;
  for (const auto& [label, at] : seed_labels) {
    auto id = network.find_label(label);
    if (!id) throw ParseError(at, "unknown seed label '" + label + "'");
    seeds.push_back(*id);
  }
  return merge_seeds(network, seeds);
}

ContactNetwork parse_network_string(const std::string& text) {
  std::istringstream in(text);
  return parse_network(in);
}

ContactNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_network(in);
}

void write_network(std::ostream& out, const ContactNetwork& network) {
  const VertexId s = network.source();
  const bool touched = std::any_of(network.edges().begin(), network.edges().end(),
                                   [s](const Edge& e) { return e.u == s || e.v == s; });
  if (!touched)
    throw ValidationError("source " + network.label(s) +
                          " has no incident edge and cannot be written as an edge list");
  out << "@source " << network.label(network.source()) << '\n';
  out << std::setprecision(17);
  for (const Edge& e : network.edges()) {
    out << network.label(e.u) << ' ' << network.label(e.v) << ' ';
    if (std::isinf(e.cost)) {
      out << "inf";
    } else {
      out << e.cost;
    }
    out << ' ' << e.prob << '\n';
  }
}

void save_network(const std::filesystem::path& path, const ContactNetwork& network) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_network(out, network);
}

}  // namespace epictrl
