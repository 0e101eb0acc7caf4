#include "sclab/io.hpp"

#include <fstream>
#include <sstream>

#include "sclab/errors.hpp"

namespace sclab {

namespace {

// Pulls "<key>=<int>" out of a header token, complaining loudly otherwise.
int parse_kv(const std::string& token, const std::string& key) {
    const std::string prefix = key + "=";
    if (token.rfind(prefix, 0) != 0)
        throw ValidationError("header: expected '" + prefix + "<int>', got '" + token + "'");
    try {
        std::size_t used = 0;
        int value = std::stoi(token.substr(prefix.size()), &used);
        if (used != token.size() - prefix.size())
            throw ValidationError("header: trailing junk in '" + token + "'");
        return value;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw ValidationError("header: bad integer in '" + token + "'");
    }
}

std::string next_line(std::istream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("unexpected end of input reading " + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<VertexId> parse_neighbor_line(const std::string& line, int vertex) {
    std::vector<VertexId> row;
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) {
        try {
            std::size_t used = 0;
            row.push_back(std::stoi(token, &used));
            if (used != token.size()) throw std::invalid_argument("junk");
        } catch (const std::exception&) {
            throw ValidationError("graph: bad neighbor token '" + token + "' on vertex line " +
                                  std::to_string(vertex));
        }
    }
    return row;
}

ManipulationGraph read_graph_body(std::istream& in, int n, int k) {
    std::vector<std::vector<VertexId>> adj;
    adj.reserve(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x)
        adj.push_back(parse_neighbor_line(next_line(in, "vertex line " + std::to_string(x)), x));
    return ManipulationGraph(n, std::move(adj), k);
}

void write_graph_body(std::ostream& out, const ManipulationGraph& graph) {
    for (VertexId x = 0; x < graph.size(); ++x) {
        const auto& row = graph.neighbors(x);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ' ';
            out << row[i];
        }
        out << '\n';
    }
}

template <typename Reader>
auto from_file(const std::string& path, Reader reader) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    return reader(in);
}

template <typename Item, typename Writer>
void to_file(const std::string& path, const Item& item, Writer writer) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    writer(out, item);
    if (!out) throw ValidationError("write to '" + path + "' failed");
}

}  // namespace

ManipulationGraph read_graph(std::istream& in) {
    std::istringstream header(next_line(in, "graph header"));
    std::string tn, tk;
    if (!(header >> tn >> tk)) throw ValidationError("graph header: expected 'n=<int> k=<int>'");
    return read_graph_body(in, parse_kv(tn, "n"), parse_kv(tk, "k"));
}

ManipulationGraph read_graph_file(const std::string& path) {
    return from_file(path, [](std::istream& in) { return read_graph(in); });
}

void write_graph(std::ostream& out, const ManipulationGraph& graph) {
    out << "n=" << graph.size() << " k=" << graph.declared_k() << '\n';
    write_graph_body(out, graph);
}

void write_graph_file(const std::string& path, const ManipulationGraph& graph) {
    to_file(path, graph, [](std::ostream& out, const ManipulationGraph& g) { write_graph(out, g); });
}

HypothesisClass read_class(std::istream& in) {
    std::istringstream header(next_line(in, "class header"));
    std::string tn;
    if (!(header >> tn)) throw ValidationError("class header: expected 'n=<int>'");
    const int n = parse_kv(tn, "n");
    std::vector<Hypothesis> members;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (static_cast<int>(line.size()) != n)
            throw ValidationError("class: bit-string of length " + std::to_string(line.size()) +
                                  ", expected " + std::to_string(n));
        std::vector<std::uint8_t> bits;
        bits.reserve(line.size());
        for (char c : line) {
            if (c != '0' && c != '1')
                throw ValidationError("class: bit-string contains '" + std::string(1, c) + "'");
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        members.emplace_back(std::move(bits));
    }
    return HypothesisClass(std::move(members));
}

HypothesisClass read_class_file(const std::string& path) {
    return from_file(path, [](std::istream& in) { return read_class(in); });
}

void write_class(std::ostream& out, const HypothesisClass& cls) {
    out << "n=" << cls.universe() << '\n';
    for (const auto& h : cls.members()) {
        for (int x = 0; x < h.size(); ++x) out << (h(x) ? '1' : '0');
        out << '\n';
    }
}

void write_class_file(const std::string& path, const HypothesisClass& cls) {
    to_file(path, cls, [](std::ostream& out, const HypothesisClass& c) { write_class(out, c); });
}

GraphClass read_graph_class(std::istream& in) {
    std::istringstream header(next_line(in, "graph class header"));
    std::string tn, tk, tc;
    if (!(header >> tn >> tk >> tc))
        throw ValidationError("graph class header: expected 'n=<int> k=<int> count=<int>'");
    const int n = parse_kv(tn, "n");
    const int k = parse_kv(tk, "k");
    const int count = parse_kv(tc, "count");
    if (count <= 0) throw ValidationError("graph class: count must be positive");
    std::vector<ManipulationGraph> members;
    members.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        if (i > 0) {
            const std::string sep = next_line(in, "graph separator");
            if (!sep.empty())
                throw ValidationError("graph class: expected blank separator before graph " +
                                      std::to_string(i));
        }
        members.push_back(read_graph_body(in, n, k));
    }
    return GraphClass(std::move(members));
}

GraphClass read_graph_class_file(const std::string& path) {
    return from_file(path, [](std::istream& in) { return read_graph_class(in); });
}

void write_graph_class(std::ostream& out, const GraphClass& cls) {
    out << "n=" << cls.universe() << " k=" << cls.declared_k()
        << " count=" << cls.size() << '\n';
    for (int i = 0; i < cls.size(); ++i) {
        if (i > 0) out << '\n';
        write_graph_body(out, cls.at(i));
    }
}

void write_graph_class_file(const std::string& path, const GraphClass& cls) {
    to_file(path, cls, [](std::ostream& out, const GraphClass& c) { write_graph_class(out, c); });
}

}  // namespace sclab
