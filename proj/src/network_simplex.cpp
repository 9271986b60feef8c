#include "wpt/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wpt/errors.hpp"

namespace wpt {

namespace {

// Spanning-tree basis over n supply nodes, m demand nodes and an artificial
// root. Real arc e = i*m + j goes i -> n+j; artificial arcs connect every node
// to the root (supply k -> root, root -> demand k) with a prohibitive cost.
// Non-basic arcs always carry zero flow (the problem is uncapacitated), so
// flow is stored only for the n+m basic slots.
class NetworkSimplex {
 public:
  NetworkSimplex(std::span<const double> cost, std::span<const double> a, std::span<const double> b)
      : cost_(cost), n_(static_cast<int>(a.size())), m_(static_cast<int>(b.size())) {
    nodes_ = n_ + m_ + 1;
    root_ = n_ + m_;
    real_arcs_ = static_cast<long>(n_) * m_;
    total_arcs_ = real_arcs_ + n_ + m_;

    double cmax = 0.0;
    for (double c : cost_) cmax = std::max(cmax, std::abs(c));
    art_cost_ = (cmax + 1.0) * static_cast<double>(n_ + m_);
    eps_ = 1e-14 * (cmax + art_cost_);
    double total = 0.0;
    for (double x : a) total += x;
    snap_ = 1e-15 * std::max(total, 1.0);

    slot_arc_.resize(n_ + m_);
    slot_flow_.resize(n_ + m_);
    adj_.assign(nodes_, {});
    for (int k = 0; k < n_ + m_; ++k) {
      slot_arc_[k] = real_arcs_ + k;
      slot_flow_[k] = k < n_ ? a[k] : b[k - n_];
      adj_[k].push_back(k);
      adj_[root_].push_back(k);
    }
    parent_.assign(nodes_, -1);
    pred_slot_.assign(nodes_, -1);
    depth_.assign(nodes_, 0);
    pot_.assign(nodes_, 0.0);
    block_ = std::max<long>(10, static_cast<long>(std::sqrt(static_cast<double>(total_arcs_))));
    rebuild_tree();
  }

  TransportSolution run() {
    TransportSolution sol;
    long arc;
    while ((arc = find_entering()) >= 0) {
      pivot(arc);
      ++sol.pivots;
    }
    for (int s = 0; s < n_ + m_; ++s) {
      const long e = slot_arc_[s];
      if (e < real_arcs_ && slot_flow_[s] > 0.0) {
        const int i = static_cast<int>(e / m_);
        const int j = static_cast<int>(e % m_);
        sol.plan.push_back({i, j, slot_flow_[s]});
      }
    }
    std::sort(sol.plan.begin(), sol.plan.end(), [](const auto &x, const auto &y) {
      return x.source != y.source ? x.source < y.source : x.target < y.target;
    });
    for (const auto &t : sol.plan) sol.cost += t.mass * cost_[static_cast<size_t>(t.source) * m_ + t.target];
    return sol;
  }

 private:
  [[nodiscard]] int src(long e) const {
    if (e < real_arcs_) return static_cast<int>(e / m_);
    const int k = static_cast<int>(e - real_arcs_);
    return k < n_ ? k : root_;
  }
  [[nodiscard]] int tgt(long e) const {
    if (e < real_arcs_) return n_ + static_cast<int>(e % m_);
    const int k = static_cast<int>(e - real_arcs_);
    return k < n_ ? root_ : k;
  }
  [[nodiscard]] double arc_cost(long e) const { return e < real_arcs_ ? cost_[e] : art_cost_; }
  [[nodiscard]] double reduced_cost(long e) const { return arc_cost(e) + pot_[src(e)] - pot_[tgt(e)]; }

  void rebuild_tree() {
    std::vector<int> stack{root_};
    std::fill(parent_.begin(), parent_.end(), -1);
    parent_[root_] = root_;
    depth_[root_] = 0;
    pot_[root_] = 0.0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int s : adj_[u]) {
        const long e = slot_arc_[s];
        const int v = src(e) == u ? tgt(e) : src(e);
        if (parent_[v] != -1) continue;
        parent_[v] = u;
        pred_slot_[v] = s;
        depth_[v] = depth_[u] + 1;
        pot_[v] = src(e) == u ? pot_[u] + arc_cost(e) : pot_[u] - arc_cost(e);
        stack.push_back(v);
      }
    }
  }

  // Block search: most negative reduced cost within the first block that
  // contains a candidate, scanning cyclically from where the last search
  // stopped.
  long find_entering() {
    long best = -1;
    double best_rc = -eps_;
    long scanned = 0;
    long e = next_;
    while (scanned < total_arcs_) {
      const long stop = std::min(total_arcs_, scanned + block_);
      for (; scanned < stop; ++scanned) {
        const double rc = reduced_cost(e);
        if (rc < best_rc) {
          best_rc = rc;
          best = e;
        }
        if (++e == total_arcs_) e = 0;
      }
      if (best >= 0) {
        next_ = e;
        return best;
      }
    }
    return -1;
  }

  // An arc is "up" at node u when it points from u to parent(u).
  [[nodiscard]] bool is_up(int u) const { return src(slot_arc_[pred_slot_[u]]) == u; }

  void pivot(long in) {
    const int first = src(in);
    const int second = tgt(in);
    int u = first, v = second;
    while (u != v) {
      if (depth_[u] >= depth_[v]) u = parent_[u];
      else v = parent_[v];
    }
    const int join = u;

    // Cunningham's rule: the last blocking arc met when walking the cycle
    // from the join in the orientation of the entering arc.
    double delta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (int w = first; w != join; w = parent_[w]) {
      if (!is_up(w)) continue;
      const double r = std::max(0.0, slot_flow_[pred_slot_[w]]);
      if (r < delta) {
        delta = r;
        leave = w;
      }
    }
    for (int w = second; w != join; w = parent_[w]) {
      if (is_up(w)) continue;
      const double r = std::max(0.0, slot_flow_[pred_slot_[w]]);
      if (r <= delta) {
        delta = r;
        leave = w;
      }
    }
    if (leave < 0) throw Error(ErrorCode::SolverDiverged, "network simplex: unbounded cycle");

    auto adjust = [&](int s, double d) {
      double &f = slot_flow_[s];
      f += d;
      if (std::abs(f) < snap_) f = 0.0;
    };
    for (int w = first; w != join; w = parent_[w]) adjust(pred_slot_[w], is_up(w) ? -delta : delta);
    for (int w = second; w != join; w = parent_[w]) adjust(pred_slot_[w], is_up(w) ? delta : -delta);

    const int slot = pred_slot_[leave];
    const long out = slot_arc_[slot];
    auto drop = [&](int node) {
      auto &l = adj_[node];
      l.erase(std::find(l.begin(), l.end(), slot));
    };
    drop(src(out));
    drop(tgt(out));
    slot_arc_[slot] = in;
    slot_flow_[slot] = delta < snap_ ? 0.0 : delta;
    adj_[first].push_back(slot);
    adj_[second].push_back(slot);
    rebuild_tree();
  }

  std::span<const double> cost_;
  int n_, m_, nodes_, root_;
  long real_arcs_, total_arcs_;
  double art_cost_, eps_, snap_;
  long block_;
  long next_ = 0;

  std::vector<long> slot_arc_;
  std::vector<double> slot_flow_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> parent_, pred_slot_, depth_;
  std::vector<double> pot_;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> cost, std::span<const double> a,
                                  std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "empty marginal");
  if (cost.size() != a.size() * b.size()) throw Error(ErrorCode::InvalidArgument, "cost matrix has wrong size");
  NetworkSimplex ns(cost, a, b);
  return ns.run();
}

}  // namespace wpt
