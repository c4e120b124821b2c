#pragma once

#include "mscr/funcsys.hpp"

namespace mscr {

// Bounded grid with one agent and one food cell. Percept attributes:
//   0 dir_x  : 0 food is west, 1 same column, 2 food is east
//   1 dir_y  : 0 food is north, 1 same row, 2 food is south
//   2 on_food: 0/1
//   3..6 adjacent cell north/south/east/west: 0 empty, 1 wall, 2 food
// Actions: 0 north, 1 south, 2 east, 3 west. Moving into a wall is a no-op.
class Gridworld : public Environment {
 public:
  static constexpr GoalId kOnFood = 0;
  static constexpr GoalId kXAligned = 1;
  static constexpr GoalId kYAligned = 2;

  explicit Gridworld(int width = 15, int height = 15);

  void reset(uint64_t seed) override;
  FeatureSet perceive() const override;
  void act(ActionId a) override;
  int action_count() const override { return 4; }
  int goal_count() const override { return 3; }
  bool holds(GoalId g) const override;
  std::vector<int> related_attrs(const std::vector<int>& changed) const override;
  Literal goal_literal(GoalId g) const override;

  const AttributeSchema& schema() const { return schema_; }
  int agent_x() const { return ax_; }
  int agent_y() const { return ay_; }
  int food_x() const { return fx_; }
  int food_y() const { return fy_; }

 private:
  int cell(int x, int y) const;  // 0 empty, 1 wall, 2 food
  int w_, h_;
  int ax_ = 0, ay_ = 0, fx_ = 1, fy_ = 1;
  AttributeSchema schema_;
};

// Planner memory preloaded with the goal hierarchy: on-food decomposes into
// column alignment then row alignment. Leaf rules come from exploration.
FSMemory gridworld_base_memory();

}  // namespace mscr
