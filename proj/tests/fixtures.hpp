#pragma once

// Frozen regression fixtures.
//
// Overshoot instance: a Parseval frame of 26 vectors in R^2 and a vector x
// whose clipped coefficients satisfy the four overshoot conditions, so the
// clip-aware iteration with alpha = beta = 1 leaves the ball of radius |x|
// at step two. Found by a seeded corridor search over two leading vectors
// plus a split Parseval completion; all inequality margins exceed 1e-3
// except the overshoot itself (8.4e-5 absolute).

#include <cstddef>
#include <vector>

#include "declip/frames.hpp"

namespace declip::testfix {

inline constexpr double kOvershootLambda = 0.57059609962064661;
inline constexpr double kOvershootX[2] = {0.59850116186049396, 1.8589727146439274};

inline Frame overshoot_frame() {
    std::vector<Vec> vs;
    vs.push_back(Vec{-0.27558990224924729, 0.40407039845600129});
    vs.push_back(Vec{0.95337509094702166, 0.0});
    for (int i = 0; i < 12; ++i)
        vs.push_back(Vec{-0.0049605822582525798, 0.00066042751911106598});
    for (int i = 0; i < 12; ++i)
        vs.push_back(Vec{0.035155432515139008, 0.26405837093300549});
    return Frame(2, std::move(vs));
}

// Same leading pair and target, but with the Parseval completion left as two
// long vectors: conditions (a), (b), (d) hold while (c) fails on the last
// coordinate.
inline Frame overshoot_frame_c_violated() {
    std::vector<Vec> vs;
    vs.push_back(Vec{-0.27558990224924729, 0.40407039845600129});
    vs.push_back(Vec{0.95337509094702166, 0.0});
    vs.push_back(Vec{-0.017183961012836452, 0.0022877880356340636});
    vs.push_back(Vec{0.12178199055655936, 0.91472502923966859});
    return Frame(2, std::move(vs));
}

inline Vec overshoot_x() { return Vec{kOvershootX[0], kOvershootX[1]}; }

}  // namespace declip::testfix
