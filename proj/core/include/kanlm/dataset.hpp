#pragma once

#include <map>
#include <string>
#include <vector>

namespace kanlm {

enum class Channel { V, F, P, Q };

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);

enum class Role { Train, Validation, Test };

const char* role_name(Role r);

struct Sample {
  double t = 0.0;
  double v = 0.0;
  double f = 0.0;
  double p = 0.0;
  double q = 0.0;

  double get(Channel c) const;
  void set(Channel c, double value);
};

// Timestamped measurement series plus the channel contract used for
// training: which channels feed the model and which one it predicts.
struct Dataset {
  std::vector<Sample> samples;
  Role role = Role::Train;
  std::vector<Channel> inputs{Channel::V, Channel::F};
  Channel target = Channel::P;
};

// Checks dataset invariants: >= 2 samples, finite values, strictly
// increasing time. Throws InvalidInput.
void validate_dataset(const Dataset& data);

std::vector<double> channel_values(const Dataset& data, Channel c);

// Per-sample input rows (in data.inputs order) and target column.
std::vector<std::vector<double>> input_matrix(const Dataset& data);
std::vector<double> target_vector(const Dataset& data);

struct ChannelStats {
  double mean = 0.0;
  double stddev = 1.0;
};

struct NormStats {
  std::map<Channel, ChannelStats> channels;

  bool has(Channel c) const { return channels.count(c) != 0; }
  // Throws InvalidInput naming the channel when absent.
  const ChannelStats& at(Channel c) const;
};

// Population mean / standard deviation over the listed channels.
// A constant channel (sigma = 0) raises InvalidInput naming it.
NormStats zscore_fit(const Dataset& data, const std::vector<Channel>& channels);
// Default channel list: data.inputs plus data.target.
NormStats zscore_fit(const Dataset& data);

double zscore_apply(const ChannelStats& s, double x);
double zscore_invert(const ChannelStats& s, double z);

// Normalizes (or denormalizes) every channel present in stats; other
// channels pass through untouched.
Dataset zscore_apply(const NormStats& stats, const Dataset& data);
Dataset zscore_invert(const NormStats& stats, const Dataset& data);

// CSV round trip. Header is exactly `time,V,f,P,Q`; values rendered at
// full precision so write-read-write is byte stable. Read errors cite
// 1-based line numbers.
void write_csv(const std::string& path, const Dataset& data);
std::string csv_text(const Dataset& data);
Dataset read_csv(const std::string& path, Role role);
Dataset parse_csv(const std::string& text, Role role, const std::string& origin);

}  // namespace kanlm
