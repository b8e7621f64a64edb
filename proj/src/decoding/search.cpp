// Copyright 2026 The LAQG Bench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "laqg/decoding/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "laqg/data/text.hpp"
#include "laqg/data/vocab.hpp"
#include "laqg/error.hpp"

namespace laqg::decoding {

using data::Vocab;

namespace {

bool emittable(int token) { return token != Vocab::kPad && token != Vocab::kBos; }

int argmax(const std::vector<double>& log_probs) {
  int best = -1;
  for (int v = 0; v < static_cast<int>(log_probs.size()); ++v) {
    if (!emittable(v)) continue;
    if (best < 0 || log_probs[v] > log_probs[best]) best = v;
  }
  if (best < 0) throw ContractError("decoder produced no emittable token");
  return best;
}

double normalized(double log_prob, std::size_t length, double alpha) {
  if (alpha == 0.0 || length == 0) return log_prob;
  return log_prob / std::pow(static_cast<double>(length), alpha);
}

struct Live {
  std::vector<int> tokens;
  double log_prob = 0.0;
  std::any state;
  std::vector<double> next;
};

}  // namespace

Hypothesis greedy_decode(StepModel& model, std::size_t max_len) {
  std::any state = model.start();
  std::vector<double> lp = model.step(state, Vocab::kBos);
  Hypothesis h;
  while (true) {
    const int tok = argmax(lp);
    h.log_prob += lp[tok];
    if (tok == Vocab::kEos) {
      h.finished = true;
      break;
    }
    h.tokens.push_back(tok);
    if (h.tokens.size() >= max_len) break;
    lp = model.step(state, tok);
  }
  h.score = h.log_prob;
  return h;
}

Hypothesis beam_search(StepModel& model, std::size_t width, double length_penalty,
                       std::size_t max_len) {
  if (width < 1) throw ConfigError("beam width must be at least 1");
  if (length_penalty < 0.0) throw ConfigError("length penalty must be non-negative");
  std::vector<Live> live(1);
  live[0].state = model.start();
  live[0].next = model.step(live[0].state, Vocab::kBos);
  std::vector<Hypothesis> finished;
  auto finish = [&](std::vector<int> tokens, double log_prob, bool eos) {
    const std::size_t length = tokens.size() + (eos ? 1 : 0);
    finished.push_back({std::move(tokens), log_prob, normalized(log_prob, length, length_penalty), eos});
  };

  while (!live.empty()) {
    struct Candidate {
      double log_prob;
      std::size_t parent;
      int token;
    };
    std::vector<Candidate> cands;
    for (std::size_t b = 0; b < live.size(); ++b)
      for (int v = 0; v < static_cast<int>(live[b].next.size()); ++v)
        if (emittable(v)) cands.push_back({live[b].log_prob + live[b].next[v], b, v});
    const std::size_t keep = std::min(width, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                      [&](const Candidate& a, const Candidate& b) {
                        const double sa = normalized(a.log_prob, live[a.parent].tokens.size() + 1, length_penalty);
                        const double sb = normalized(b.log_prob, live[b.parent].tokens.size() + 1, length_penalty);
                        if (sa != sb) return sa > sb;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    std::vector<Live> next;
    for (std::size_t i = 0; i < keep; ++i) {
      const Candidate& c = cands[i];
      const Live& parent = live[c.parent];
      if (c.token == Vocab::kEos) {
        finish(parent.tokens, c.log_prob, true);
        continue;
      }
      Live child;
      child.tokens = parent.tokens;
      child.tokens.push_back(c.token);
      child.log_prob = c.log_prob;
      if (child.tokens.size() >= max_len) {
        finish(std::move(child.tokens), child.log_prob, false);
        continue;
      }
      child.state = parent.state;
      child.next = model.step(child.state, c.token);
      next.push_back(std::move(child));
    }
    live = std::move(next);
    // Without length normalization scores only fall as hypotheses grow, so
    // a finished hypothesis that beats every live one is final.
    if (length_penalty == 0.0 && !finished.empty() && !live.empty()) {
      double best_done = -std::numeric_limits<double>::infinity();
      for (const auto& f : finished) best_done = std::max(best_done, f.score);
      double best_live = -std::numeric_limits<double>::infinity();
      for (const auto& l : live) best_live = std::max(best_live, l.log_prob);
      if (best_done >= best_live) break;
    }
  }
  // Stable: the earliest-found hypothesis wins ties.
  auto best = std::max_element(finished.begin(), finished.end(),
                               [](const Hypothesis& a, const Hypothesis& b) { return a.score < b.score; });
  return *best;
}

double sequence_log_prob(StepModel& model, const std::vector<int>& tokens, bool with_eos) {
  std::any state = model.start();
  std::vector<double> lp = model.step(state, Vocab::kBos);
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    total += lp.at(static_cast<std::size_t>(tokens[i]));
    if (i + 1 < tokens.size() || with_eos) lp = model.step(state, tokens[i]);
  }
  if (with_eos) total += lp.at(Vocab::kEos);
  return total;
}

ModelStepper::ModelStepper(const models::Model& model, const models::SourceInput& source)
    : model_(model) {
  ad::Graph g(false);
  models::Encoded enc = model_.encode(g, source);
  source_ = enc.source;
  memory_ = enc.memory.value();
  if (enc.memory2) memory2_ = enc.memory2->value();
  for (const auto& s : enc.final_states) final_states_.emplace_back(s.h.value(), s.c.value());
}

models::Encoded ModelStepper::thaw(ad::Graph& g) const {
  models::Encoded enc;
  enc.memory = g.constant(memory_);
  if (memory2_) enc.memory2 = g.constant(*memory2_);
  for (const auto& [h, c] : final_states_) enc.final_states.push_back({g.constant(h), g.constant(c)});
  enc.source = source_;
  return enc;
}

std::any ModelStepper::start() {
  ad::Graph g(false);
  models::Encoded enc = thaw(g);
  models::DecoderState s = model_.start(g, enc);
  Frozen f;
  for (const auto& l : s.layers) f.layers.emplace_back(l.h.value(), l.c.value());
  if (s.feed) f.feed = s.feed->value();
  f.prefix = s.prefix;
  return f;
}

std::vector<double> ModelStepper::step(std::any& state, int token) {
  Frozen& f = std::any_cast<Frozen&>(state);
  ad::Graph g(false);
  models::Encoded enc = thaw(g);
  models::DecoderState s;
  for (const auto& [h, c] : f.layers) s.layers.push_back({g.constant(h), g.constant(c)});
  if (f.feed) s.feed = g.constant(*f.feed);
  s.prefix = f.prefix;
  models::StepOutput out = model_.step(g, enc, s, token);
  for (std::size_t l = 0; l < s.layers.size(); ++l)
    f.layers[l] = {s.layers[l].h.value(), s.layers[l].c.value()};
  if (s.feed) f.feed = s.feed->value();
  f.prefix = std::move(s.prefix);
  const auto& v = out.log_probs.value().data();
  return {v.begin(), v.end()};
}

std::string render(const std::vector<int>& tokens, const models::SourceInput& source,
                   const data::Vocab& vocab) {
  data::Tokens words;
  for (int t : tokens) {
    if (t == Vocab::kEos || t == Vocab::kPad || t == Vocab::kBos) continue;
    words.push_back(source.ext.render(t, vocab));
  }
  return data::detokenize(words);
}

Hypothesis decode(const models::Model& model, const models::SourceInput& source,
                  const DecodeOptions& options) {
  ModelStepper stepper(model, source);
  if (options.beam_width == 1 && options.length_penalty == 0.0) {
    return greedy_decode(stepper, options.max_len);
  }
  return beam_search(stepper, options.beam_width, options.length_penalty, options.max_len);
}

}  // namespace laqg::decoding
