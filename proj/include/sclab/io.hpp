// Text formats for graphs and hypothesis classes, plus the multi-graph
// container used to ship graph classes to the CLI.
#pragma once

#include <iosfwd>
#include <string>

#include "sclab/graph.hpp"

namespace sclab {

// Graph file: a header line "n=<int> k=<int>" followed by exactly n lines,
// line i holding the out-neighbors of vertex i as space-separated indices
// (an empty line means no out-arcs).
ManipulationGraph read_graph(std::istream& in);
ManipulationGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const ManipulationGraph& graph);
void write_graph_file(const std::string& path, const ManipulationGraph& graph);

// Class file: a header line "n=<int>" followed by one bit-string of length n
// per hypothesis.
HypothesisClass read_class(std::istream& in);
HypothesisClass read_class_file(const std::string& path);
void write_class(std::ostream& out, const HypothesisClass& cls);
void write_class_file(const std::string& path, const HypothesisClass& cls);

// Graph-class file: "n=<int> k=<int> count=<int>" followed by count graph
// bodies (n neighbor lines each), separated by a single blank line.
GraphClass read_graph_class(std::istream& in);
GraphClass read_graph_class_file(const std::string& path);
void write_graph_class(std::ostream& out, const GraphClass& cls);
void write_graph_class_file(const std::string& path, const GraphClass& cls);

}  // namespace sclab
