#include "kanlm/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kanlm/errors.hpp"

namespace kanlm {

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Whitespace-token reader over pre-split lines. Every error cites the
// 1-based line number of the offending record.
struct LineReader {
  std::vector<std::string> lines;
  std::size_t pos = 0;

  explicit LineReader(const std::string& text) {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur += ch;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }

  bool done() const { return pos >= lines.size(); }
  int line_no() const { return static_cast<int>(pos); }  // after next(), pos is 1-based

  std::vector<std::string> next(const std::string& what) {
    while (!done() && lines[pos].find_first_not_of(" \t") == std::string::npos) ++pos;
    if (done()) throw InvalidInput("model text: unexpected end of input, expected " + what);
    std::istringstream iss(lines[pos++]);
    std::vector<std::string> toks;
    std::string t;
    while (iss >> t) toks.push_back(t);
    return toks;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput("model text line " + std::to_string(line_no()) + ": " + msg);
  }
};

double parse_num(LineReader& rd, const std::string& tok) {
  const char* s = tok.c_str();
  char* endp = nullptr;
  double v = std::strtod(s, &endp);
  if (endp != s + tok.size()) rd.fail("bad number '" + tok + "'");
  return v;
}

int parse_int(LineReader& rd, const std::string& tok) {
  double v = parse_num(rd, tok);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) rd.fail("expected integer, got '" + tok + "'");
  return i;
}

void network_body(std::string& out, const KanNetwork& net) {
  out += "widths";
  for (int w : net.widths) out += " " + std::to_string(w);
  out += "\n";
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const KanLayer& layer = net.layers[l];
    for (int j = 0; j < layer.n_out; ++j) {
      for (int i = 0; i < layer.n_in; ++i) {
        const ActivationEdge& e = layer.edge(j, i);
        out += "edge " + std::to_string(l) + " " + std::to_string(j) + " " + std::to_string(i) +
               "\n";
        out += "grid " + std::to_string(e.grid.degree) + " " + std::to_string(e.grid.intervals) +
               " " + fmt_g(e.grid.domain_lo) + " " + fmt_g(e.grid.domain_hi) + "\n";
        out += "coeffs";
        for (double c : e.coeffs) out += " " + fmt_g(c);
        out += "\n";
        out += "w " + fmt_g(e.w_b) + " " + fmt_g(e.w_s) + "\n";
        if (e.fixed) {
          out += std::string("fixed ") + candidate_name(e.fixed->cid) + " " + fmt_g(e.fixed->a) +
                 " " + fmt_g(e.fixed->b) + " " + fmt_g(e.fixed->c) + " " + fmt_g(e.fixed->d) +
                 "\n";
        }
        if (e.pruned) out += "pruned\n";
        out += "end\n";
      }
    }
  }
}

// Reads the `widths` line and every edge block. Self-delimiting: the widths
// fix the edge count, so the caller can keep parsing its own records after.
KanNetwork read_network_body(LineReader& rd) {
  KanNetwork net;
  auto toks = rd.next("widths");
  if (toks.empty() || toks[0] != "widths" || toks.size() < 3)
    rd.fail("expected 'widths n0 n1 ...'");
  for (std::size_t k = 1; k < toks.size(); ++k) {
    int w = parse_int(rd, toks[k]);
    if (w < 1) rd.fail("widths must be positive");
    net.widths.push_back(w);
  }
  for (std::size_t l = 0; l + 1 < net.widths.size(); ++l) {
    KanLayer layer;
    layer.n_in = net.widths[l];
    layer.n_out = net.widths[l + 1];
    for (int j = 0; j < layer.n_out; ++j) {
      for (int i = 0; i < layer.n_in; ++i) {
        auto head = rd.next("edge");
        if (head.size() != 4 || head[0] != "edge") rd.fail("expected 'edge <layer> <j> <i>'");
        if (parse_int(rd, head[1]) != static_cast<int>(l) || parse_int(rd, head[2]) != j ||
            parse_int(rd, head[3]) != i)
          rd.fail("edge out of order, expected layer " + std::to_string(l) + " j " +
                  std::to_string(j) + " i " + std::to_string(i));
        ActivationEdge e;
        auto g = rd.next("grid");
        if (g.size() != 5 || g[0] != "grid") rd.fail("expected 'grid <deg> <G> <lo> <hi>'");
        int deg = parse_int(rd, g[1]);
        int G = parse_int(rd, g[2]);
        double lo = parse_num(rd, g[3]);
        double hi = parse_num(rd, g[4]);
        e.grid = make_grid(lo, hi, G, deg);
        auto c = rd.next("coeffs");
        if (c.empty() || c[0] != "coeffs") rd.fail("expected 'coeffs ...'");
        for (std::size_t k = 1; k < c.size(); ++k) e.coeffs.push_back(parse_num(rd, c[k]));
        if (static_cast<int>(e.coeffs.size()) != e.grid.basis_count())
          rd.fail("expected " + std::to_string(e.grid.basis_count()) + " coefficients, got " +
                  std::to_string(e.coeffs.size()));
        auto w = rd.next("w");
        if (w.size() != 3 || w[0] != "w") rd.fail("expected 'w <w_b> <w_s>'");
        e.w_b = parse_num(rd, w[1]);
        e.w_s = parse_num(rd, w[2]);
        auto tail = rd.next("end");
        if (tail.size() == 6 && tail[0] == "fixed") {
          FixedForm ff;
          if (!candidate_from_name(tail[1], ff.cid)) rd.fail("unknown candidate '" + tail[1] + "'");
          ff.a = parse_num(rd, tail[2]);
          ff.b = parse_num(rd, tail[3]);
          ff.c = parse_num(rd, tail[4]);
          ff.d = parse_num(rd, tail[5]);
          e.fixed = ff;
          tail = rd.next("end");
        }
        if (tail.size() == 1 && tail[0] == "pruned") {
          e.pruned = true;
          tail = rd.next("end");
        }
        if (tail.size() != 1 || tail[0] != "end") rd.fail("expected 'end'");
        layer.edges.push_back(std::move(e));
      }
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

void expect_done(LineReader& rd, const char* header) {
  while (!rd.done()) {
    if (rd.lines[rd.pos].find_first_not_of(" \t") != std::string::npos)
      throw InvalidInput(std::string(header) + ": trailing content at line " +
                         std::to_string(rd.pos + 1));
    ++rd.pos;
  }
}

}  // namespace

std::string network_to_text(const KanNetwork& net) {
  if (net.widths.size() < 2 || net.layers.size() + 1 != net.widths.size())
    throw InvalidInput("network_to_text: malformed network");
  std::string out = "kanlm-net v1\n";
  network_body(out, net);
  return out;
}

KanNetwork network_from_text(const std::string& text) {
  LineReader rd(text);
  auto header = rd.next("header");
  if (header.size() != 2 || header[0] != "kanlm-net" || header[1] != "v1")
    throw InvalidInput("network text: expected 'kanlm-net v1' header");
  KanNetwork net = read_network_body(rd);
  expect_done(rd, "network text");
  return net;
}

std::string model_to_text(const ModelFile& model) {
  if (model.inputs.empty()) throw InvalidInput("model_to_text: no input channels");
  if (model.targets.empty()) throw InvalidInput("model_to_text: no targets");
  std::string out = "kanlm-model v1\n";
  out += "inputs";
  for (Channel c : model.inputs) out += std::string(" ") + channel_name(c);
  out += "\n";
  for (const auto& [ch, st] : model.stats.channels)
    out += std::string("norm ") + channel_name(ch) + " " + fmt_g(st.mean) + " " +
           fmt_g(st.stddev) + "\n";
  for (const auto& [ch, net] : model.targets) {
    out += std::string("target ") + channel_name(ch) + "\n";
    network_body(out, net);
  }
  out += "end\n";
  return out;
}

ModelFile model_from_text(const std::string& text) {
  LineReader rd(text);
  auto header = rd.next("header");
  if (header.size() != 2 || header[0] != "kanlm-model" || header[1] != "v1")
    throw InvalidInput("model text: expected 'kanlm-model v1' header");
  ModelFile model;
  auto in = rd.next("inputs");
  if (in.size() < 2 || in[0] != "inputs") rd.fail("expected 'inputs <channel> ...'");
  for (std::size_t k = 1; k < in.size(); ++k) model.inputs.push_back(channel_from_name(in[k]));
  for (;;) {
    auto toks = rd.next("norm, target or end");
    if (toks.size() == 4 && toks[0] == "norm") {
      ChannelStats st;
      st.mean = parse_num(rd, toks[2]);
      st.stddev = parse_num(rd, toks[3]);
      model.stats.channels[channel_from_name(toks[1])] = st;
    } else if (toks.size() == 2 && toks[0] == "target") {
      Channel ch = channel_from_name(toks[1]);
      if (model.targets.count(ch)) rd.fail("duplicate target " + toks[1]);
      model.targets[ch] = read_network_body(rd);
    } else if (toks.size() == 1 && toks[0] == "end") {
      break;
    } else {
      rd.fail("expected 'norm', 'target' or 'end'");
    }
  }
  expect_done(rd, "model text");
  if (model.targets.empty()) throw InvalidInput("model text: no targets");
  for (const auto& [ch, net] : model.targets) {
    if (net.n_inputs() != static_cast<int>(model.inputs.size()))
      throw InvalidInput(std::string("model text: network for ") + channel_name(ch) +
                         " expects " + std::to_string(net.n_inputs()) + " inputs, contract has " +
                         std::to_string(model.inputs.size()));
  }
  return model;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("write failed for " + path);
}

}  // namespace

void write_model(const std::string& path, const ModelFile& model) {
  spill(path, model_to_text(model));
}

ModelFile read_model(const std::string& path) { return model_from_text(slurp(path)); }

void write_network(const std::string& path, const KanNetwork& net) {
  spill(path, network_to_text(net));
}

KanNetwork read_network(const std::string& path) { return network_from_text(slurp(path)); }

}  // namespace kanlm
