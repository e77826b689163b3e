import copy

import pytest

# l = 5, d0 = 1, F = F0 = Q.  One bad place at 11 with ord(q) = 3; K/Q tamely
# ramified there with e = 2.  Above 5 = l the ramification is l - 1 = 4.
BASIC = {
    "schema": 1,
    "l": 5,
    "d0": 1,
    "deg_F": 1,
    "fibers": [
        {"p": 5, "places": [{"e0": 1, "f0": 1, "eK": 4, "fK": 1, "diffK": "3/4",
                             "nos": {"cond": False, "disc_F": False}}]},
        {"p": 11, "places": [{"e0": 1, "f0": 1, "eK": 2, "fK": 1, "diffK": "1/2",
                              "bad": {"ord_q": 3, "ord_delta": 3},
                              "nos": {"cond": True, "disc_F": False}}]},
    ],
    "invariants": {"delta_min": {"11": 3}, "cond": 11, "disc_F": 1, "deg_K": 480, "disc_K": {"5": 360, "11": 240}},
}


@pytest.fixture
def basic_raw():
    return copy.deepcopy(BASIC)
