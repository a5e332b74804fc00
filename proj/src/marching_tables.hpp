#pragma once

namespace obstacle_mcf::detail {

// Cube corners as (axis0, axis1, axis2) offsets, in the order the
// triangle table expects.
inline constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1},
                                      {0, 1, 0}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1}};

inline constexpr int kEdgeCorners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                            {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

// Edge triples per corner sign pattern (bit i set when corner i is negative),
// terminated by -1.
extern const int kTriTable[256][16];

}  // namespace obstacle_mcf::detail
