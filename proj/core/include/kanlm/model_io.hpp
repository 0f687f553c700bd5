#pragma once

#include <map>
#include <string>

#include "kanlm/dataset.hpp"
#include "kanlm/kan.hpp"

namespace kanlm {

// Plain-text persistence. Both formats render every floating point value
// with %.17g, so write -> read -> write reproduces the file byte for byte.
//
// Network ("kanlm-net v1"): a `widths` line followed by one block per edge
// in pack order (layer, then output node j, then input node i):
//
//   edge <layer> <j> <i>
//   grid <degree> <intervals> <lo> <hi>
//   coeffs <c0> <c1> ...
//   w <w_b> <w_s>
//   fixed <candidate> <a> <b> <c> <d>   (only when symbolically locked)
//   pruned                              (only when pruned)
//   end

std::string network_to_text(const KanNetwork& net);
KanNetwork network_from_text(const std::string& text);

// Bundle written by the training CLI: the channel contract, the z-score
// statistics shared by every network, and one network per fitted target.
struct ModelFile {
  std::vector<Channel> inputs;
  NormStats stats;
  std::map<Channel, KanNetwork> targets;
};

// "kanlm-model v1": `inputs ...`, `norm <channel> <mean> <stddev>` lines,
// then per target `target <channel>` plus the embedded network body, and a
// closing `end`.
std::string model_to_text(const ModelFile& model);
ModelFile model_from_text(const std::string& text);

void write_model(const std::string& path, const ModelFile& model);
ModelFile read_model(const std::string& path);

void write_network(const std::string& path, const KanNetwork& net);
KanNetwork read_network(const std::string& path);

}  // namespace kanlm
