// Copyright 2026 The kgx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgx/combiner.h"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace kgx {
namespace {

// Symbol ids sorted by probability descending, ties by id.
std::vector<SymbolId> RankOrder(const std::vector<double>& probs) {
  std::vector<SymbolId> order(probs.size());
  std::iota(order.begin(), order.end(), SymbolId{0});
  std::stable_sort(order.begin(), order.end(), [&](SymbolId a, SymbolId b) {
    return probs[a] > probs[b];
  });
  return order;
}

// A lattice position: ranks into the sorted symbol lists. Unary nodes use
// (i = individual rank, j = class rank); binary nodes use (i = subject rank,
// j = object rank, k = relation rank).
struct Node {
  Candidate candidate;
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::uint32_t k = 0;
};

struct HeapOrder {
  bool operator()(const Node& a, const Node& b) const {
    return RanksBefore(b.candidate, a.candidate);
  }
};

class TopQWalker {
 public:
  explicit TopQWalker(const DetectionOutput& det)
      : det_(det),
        ind_(RankOrder(det.individuals)),
        cls_(RankOrder(det.classes)),
        rel_(RankOrder(det.relations)) {}

  std::vector<Candidate> Run(std::size_t q) {
    if (!ind_.empty() && !cls_.empty()) PushUnary(0, 0);
    if (ind_.size() >= 2 && !rel_.empty()) PushBinary(0, 0, 0);

    std::vector<Candidate> out;
    double cutoff = -1.0;
    while (!heap_.empty()) {
      const Node node = heap_.top();
      if (out.size() >= q && node.candidate.joint < cutoff) break;
      heap_.pop();
      Expand(node);
      if (node.candidate.fact.is_binary() &&
          node.candidate.fact.subject == node.candidate.fact.object) {
        continue;
      }
      out.push_back(node.candidate);
      // Pops arrive in non-increasing joint order, so the q-th pop fixes the
      // cutoff; later pops with an equal joint are kept for tie-breaking.
      if (out.size() == q) cutoff = node.candidate.joint;
    }
    std::sort(out.begin(), out.end(), RanksBefore);
    if (out.size() > q) out.resize(q);
    return out;
  }

 private:
  void PushUnary(std::uint32_t i, std::uint32_t j) {
    const Fact f = Fact::Unary(cls_[j], ind_[i]);
    heap_.push(Node{{f, det_.individuals[f.subject] * det_.classes[f.predicate]},
                    i, j, 0});
  }

  void PushBinary(std::uint32_t i, std::uint32_t j, std::uint32_t k) {
    // Same expression as joint_score; reflexive nodes are walked through
    // but never emitted.
    const Fact f = Fact::Binary(rel_[k], ind_[i], ind_[j]);
    const double joint = det_.individuals[f.subject] *
                         det_.individuals[f.object] *
                         det_.relations[f.predicate];
    heap_.push(Node{{f, joint}, i, j, k});
  }

  // Each node has exactly one parent in this expansion tree, so nothing is
  // pushed twice, and every child's joint is <= its parent's.
  void Expand(const Node& n) {
    if (n.candidate.fact.is_unary()) {
      if (n.j + 1 < cls_.size()) PushUnary(n.i, n.j + 1);
      if (n.j == 0 && n.i + 1 < ind_.size()) PushUnary(n.i + 1, 0);
      return;
    }
    if (n.k + 1 < rel_.size()) PushBinary(n.i, n.j, n.k + 1);
    if (n.k == 0 && n.j + 1 < ind_.size()) PushBinary(n.i, n.j + 1, 0);
    if (n.k == 0 && n.j == 0 && n.i + 1 < ind_.size()) {
      PushBinary(n.i + 1, 0, 0);
    }
  }

  const DetectionOutput& det_;
  std::vector<SymbolId> ind_;
  std::vector<SymbolId> cls_;
  std::vector<SymbolId> rel_;
  std::priority_queue<Node, std::vector<Node>, HeapOrder> heap_;
};

std::vector<SymbolId> Passing(const std::vector<double>& probs, double tau) {
  std::vector<SymbolId> ids;
  for (SymbolId i = 0; i < probs.size(); ++i) {
    if (probs[i] > tau) ids.push_back(i);
  }
  return ids;
}

std::vector<Candidate> ThresholdProduct(const DetectionOutput& det,
                                        const CandidateConfig& cfg) {
  const auto inds = Passing(det.individuals, cfg.tau_ind);
  const auto classes = Passing(det.classes, cfg.tau_cls);
  const auto rels = Passing(det.relations, cfg.tau_rel);
  std::vector<Candidate> out;
  for (SymbolId c : classes) {
    for (SymbolId s : inds) {
      const Fact f = Fact::Unary(c, s);
      out.push_back({f, joint_score(f, det)});
    }
  }
  for (SymbolId r : rels) {
    for (SymbolId s : inds) {
      for (SymbolId o : inds) {
        if (s == o) continue;
        const Fact f = Fact::Binary(r, s, o);
        out.push_back({f, joint_score(f, det)});
      }
    }
  }
  std::sort(out.begin(), out.end(), RanksBefore);
  return out;
}

}  // namespace

std::string_view StrategyName(CandidateStrategy s) {
  return s == CandidateStrategy::kTopQ ? "top_q" : "threshold_product";
}

void CandidateConfig::Validate() const {
  if (q == 0) throw std::invalid_argument("candidate q must be >= 1");
  for (double t : {tau_ind, tau_cls, tau_rel}) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("candidate thresholds must lie in [0,1]");
    }
  }
}

bool RanksBefore(const Candidate& a, const Candidate& b) {
  if (a.joint != b.joint) return a.joint > b.joint;
  return a.fact < b.fact;
}

double joint_score(const Fact& fact, const DetectionOutput& det) {
  const std::size_t n = det.individuals.size();
  if (fact.is_unary()) {
    if (fact.subject >= n || fact.predicate >= det.classes.size()) {
      throw std::invalid_argument("joint_score: invalid unary fact");
    }
    return det.individuals[fact.subject] * det.classes[fact.predicate];
  }
  if (fact.subject >= n || fact.object >= n || fact.subject == fact.object ||
      fact.predicate >= det.relations.size()) {
    throw std::invalid_argument("joint_score: invalid binary fact");
  }
  return det.individuals[fact.subject] * det.individuals[fact.object] *
         det.relations[fact.predicate];
}

std::vector<Candidate> generate_candidates(const DetectionOutput& det,
                                           const Vocabulary& vocab,
                                           const CandidateConfig& cfg) {
  cfg.Validate();
  if (det.individuals.size() != vocab.num_individuals() ||
      det.classes.size() != vocab.num_unary() ||
      det.relations.size() != vocab.num_binary()) {
    throw std::invalid_argument(
        "generate_candidates: detection output does not match vocabulary");
  }
  if (cfg.strategy == CandidateStrategy::kThresholdProduct) {
    return ThresholdProduct(det, cfg);
  }
  return TopQWalker(det).Run(cfg.q);
}

double candidate_recall(std::span<const Candidate> candidates,
                        std::span<const Fact> positives) {
  if (positives.empty()) return 1.0;
  std::unordered_set<Fact, FactHash> pool;
  pool.reserve(candidates.size());
  for (const auto& c : candidates) pool.insert(c.fact);
  std::size_t hit = 0;
  for (const auto& f : positives) hit += pool.count(f);
  return static_cast<double>(hit) / static_cast<double>(positives.size());
}

}  // namespace kgx
