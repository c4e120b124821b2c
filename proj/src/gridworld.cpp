#include "mscr/gridworld.hpp"

namespace mscr {

namespace {
enum Attr { kDirX = 0, kDirY, kOnFoodAttr, kAdjN, kAdjS, kAdjE, kAdjW };
}

Gridworld::Gridworld(int width, int height) : w_(width), h_(height) {
  if (w_ < 1 || h_ < 1 || w_ * h_ < 2) throw DataError("grid too small");
  schema_.arities = {3, 3, 2, 3, 3, 3, 3};
  schema_.names = {"dir_x", "dir_y", "on_food", "adj_n", "adj_s",
                   "adj_e", "adj_w"};
}

void Gridworld::reset(uint64_t seed) {
  SplitMix64 rng(seed);
  ax_ = static_cast<int>(rng.below(w_));
  ay_ = static_cast<int>(rng.below(h_));
  do {
    fx_ = static_cast<int>(rng.below(w_));
    fy_ = static_cast<int>(rng.below(h_));
  } while (fx_ == ax_ && fy_ == ay_);
}

int Gridworld::cell(int x, int y) const {
  if (x < 0 || x >= w_ || y < 0 || y >= h_) return 1;
  return (x == fx_ && y == fy_) ? 2 : 0;
}

FeatureSet Gridworld::perceive() const {
  FeatureSet p;
  p.insert({kDirX, fx_ < ax_ ? 0 : fx_ == ax_ ? 1 : 2, false});
  p.insert({kDirY, fy_ < ay_ ? 0 : fy_ == ay_ ? 1 : 2, false});
  p.insert({kOnFoodAttr, (ax_ == fx_ && ay_ == fy_) ? 1 : 0, false});
  p.insert({kAdjN, cell(ax_, ay_ - 1), false});
  p.insert({kAdjS, cell(ax_, ay_ + 1), false});
  p.insert({kAdjE, cell(ax_ + 1, ay_), false});
  p.insert({kAdjW, cell(ax_ - 1, ay_), false});
  return p;
}

void Gridworld::act(ActionId a) {
  int nx = ax_, ny = ay_;
  switch (a) {
    case 0: --ny; break;
    case 1: ++ny; break;
    case 2: ++nx; break;
    case 3: --nx; break;
    default: throw DataError("unknown action");
  }
  if (cell(nx, ny) != 1) {
    ax_ = nx;
    ay_ = ny;
  }
}

bool Gridworld::holds(GoalId g) const {
  switch (g) {
    case kOnFood: return ax_ == fx_ && ay_ == fy_;
    case kXAligned: return ax_ == fx_;
    case kYAligned: return ay_ == fy_;
    default: throw DataError("unknown goal");
  }
}

Literal Gridworld::goal_literal(GoalId g) const {
  switch (g) {
    case kOnFood: return {kOnFoodAttr, 1, false};
    case kXAligned: return {kDirX, 1, false};
    case kYAligned: return {kDirY, 1, false};
    default: throw DataError("unknown goal");
  }
}

std::vector<int> Gridworld::related_attrs(const std::vector<int>& changed) const {
  std::vector<int> out;
  for (int a : changed) {
    switch (a) {
      case kDirX:
        out.push_back(kDirX);
        break;
      case kDirY:
        out.push_back(kDirY);
        break;
      case kOnFoodAttr:
        out.insert(out.end(), {kDirX, kDirY});
        break;
      default:
        break;
    }
  }
  return out;
}

FSMemory gridworld_base_memory() {
  FSMemory m;
  FSRule seek;
  seek.goal = Gridworld::kOnFood;
  seek.subgoals = {Gridworld::kXAligned, Gridworld::kYAligned};
  m.add_rule(seek);
  return m;
}

}  // namespace mscr
