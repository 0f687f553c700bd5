#include "kanlm/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "kanlm/errors.hpp"

namespace kanlm {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::V: return "V";
    case Channel::F: return "f";
    case Channel::P: return "P";
    case Channel::Q: return "Q";
  }
  return "?";
}

Channel channel_from_name(const std::string& name) {
  if (name == "V") return Channel::V;
  if (name == "f") return Channel::F;
  if (name == "P") return Channel::P;
  if (name == "Q") return Channel::Q;
  throw InvalidInput("unknown channel name: " + name);
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Train: return "train";
    case Role::Validation: return "validation";
    case Role::Test: return "test";
  }
  return "?";
}

double Sample::get(Channel c) const {
  switch (c) {
    case Channel::V: return v;
    case Channel::F: return f;
    case Channel::P: return p;
    case Channel::Q: return q;
  }
  return 0.0;
}

void Sample::set(Channel c, double value) {
  switch (c) {
    case Channel::V: v = value; return;
    case Channel::F: f = value; return;
    case Channel::P: p = value; return;
    case Channel::Q: q = value; return;
  }
}

void validate_dataset(const Dataset& data) {
  if (data.samples.size() < 2) throw InvalidInput("dataset needs at least 2 samples");
  double prev_t = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    for (double x : {s.t, s.v, s.f, s.p, s.q})
      if (!std::isfinite(x))
        throw InvalidInput("dataset sample " + std::to_string(i) + " has a non-finite value");
    if (!(s.t > prev_t))
      throw InvalidInput("dataset time not strictly increasing at sample " + std::to_string(i));
    prev_t = s.t;
  }
  if (data.inputs.empty()) throw InvalidInput("dataset has no input channels");
}

std::vector<double> channel_values(const Dataset& data, Channel c) {
  std::vector<double> out;
  out.reserve(data.samples.size());
  for (const Sample& s : data.samples) out.push_back(s.get(c));
  return out;
}

std::vector<std::vector<double>> input_matrix(const Dataset& data) {
  std::vector<std::vector<double>> out;
  out.reserve(data.samples.size());
  for (const Sample& s : data.samples) {
    std::vector<double> row;
    row.reserve(data.inputs.size());
    for (Channel c : data.inputs) row.push_back(s.get(c));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> target_vector(const Dataset& data) {
  return channel_values(data, data.target);
}

const ChannelStats& NormStats::at(Channel c) const {
  auto it = channels.find(c);
  if (it == channels.end())
    throw InvalidInput(std::string("no normalization stats for channel ") + channel_name(c));
  return it->second;
}

NormStats zscore_fit(const Dataset& data, const std::vector<Channel>& chans) {
  if (data.samples.size() < 2) throw InvalidInput("zscore_fit needs at least 2 samples");
  NormStats stats;
  const double n = static_cast<double>(data.samples.size());
  for (Channel c : chans) {
    double mean = 0.0;
    for (const Sample& s : data.samples) mean += s.get(c);
    mean /= n;
    double var = 0.0;
    for (const Sample& s : data.samples) {
      const double d = s.get(c) - mean;
      var += d * d;
    }
    var /= n;  // population variance
    const double sd = std::sqrt(var);
    if (!(sd > 0.0))
      throw InvalidInput(std::string("degenerate channel ") + channel_name(c) +
                         ": constant values, cannot z-score");
    stats.channels[c] = ChannelStats{mean, sd};
  }
  return stats;
}

NormStats zscore_fit(const Dataset& data) {
  std::vector<Channel> chans = data.inputs;
  bool have_target = false;
  for (Channel c : chans) have_target = have_target || c == data.target;
  if (!have_target) chans.push_back(data.target);
  return zscore_fit(data, chans);
}

double zscore_apply(const ChannelStats& s, double x) { return (x - s.mean) / s.stddev; }

double zscore_invert(const ChannelStats& s, double z) { return s.stddev * z + s.mean; }

Dataset zscore_apply(const NormStats& stats, const Dataset& data) {
  Dataset out = data;
  for (Sample& s : out.samples)
    for (Channel c : {Channel::V, Channel::F, Channel::P, Channel::Q})
      if (stats.has(c)) s.set(c, zscore_apply(stats.at(c), s.get(c)));
  return out;
}

Dataset zscore_invert(const NormStats& stats, const Dataset& data) {
  Dataset out = data;
  for (Sample& s : out.samples)
    for (Channel c : {Channel::V, Channel::F, Channel::P, Channel::Q})
      if (stats.has(c)) s.set(c, zscore_invert(stats.at(c), s.get(c)));
  return out;
}

namespace {

constexpr const char* kCsvHeader = "time,V,f,P,Q";

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_field(const std::string& origin, const std::string& field, std::size_t line_no,
                   const char* what) {
  if (field.empty())
    throw InvalidInput(origin + " line " + std::to_string(line_no) + ": empty " + what + " field");
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + field.size() || !std::isfinite(v))
    throw InvalidInput(origin + " line " + std::to_string(line_no) + ": bad " + what + " value '" +
                       field + "'");
  return v;
}

}  // namespace

std::string csv_text(const Dataset& data) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const Sample& s : data.samples) {
    out += format_full(s.t);
    for (double x : {s.v, s.f, s.p, s.q}) {
      out += ',';
      out += format_full(x);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open for writing: " + path);
  f << csv_text(data);
  if (!f) throw InvalidInput("write failed: " + path);
}

Dataset parse_csv(const std::string& text, Role role, const std::string& origin) {
  Dataset data;
  data.role = role;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!saw_header) {
      if (line != kCsvHeader)
        throw InvalidInput(origin + " line 1: expected header '" + kCsvHeader + "', got '" +
                           line + "'");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 5)
      throw InvalidInput(origin + " line " + std::to_string(line_no) + ": expected 5 fields, got " +
                         std::to_string(fields.size()));
    Sample s;
    s.t = parse_field(origin, fields[0], line_no, "time");
    s.v = parse_field(origin, fields[1], line_no, "V");
    s.f = parse_field(origin, fields[2], line_no, "f");
    s.p = parse_field(origin, fields[3], line_no, "P");
    s.q = parse_field(origin, fields[4], line_no, "Q");
    data.samples.push_back(s);
  }
  if (!saw_header) throw InvalidInput(origin + ": empty file, missing csv header");
  validate_dataset(data);
  return data;
}

Dataset read_csv(const std::string& path, Role role) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open csv file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str(), role, path);
}

}  // namespace kanlm
