# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Built-in vehicle and tire parameter sets.
"""

_LOSSES = {
    "c_xb": 1.1231,
    "r_bx1": 13.476,
    "r_bx2": 11.354,
    "c_yk": 1.0533,
    "r_by1": 7.7856,
    "r_by2": 8.1697,
}

# Sports car
SPORTS_VEHICLE = {
    "m": 1480.0,
    "a": 1.421,
    "b": 1.029,
    "h": 0.42,
    "I_zz": 1950.0,
    "I_xz": -50.0,
    "I_yy": 1730.0,
    "g": 9.81,
}

SPORTS_TIRES = {
    "rear": {
        "d_x": 1.688,
        "c_x": 1.65,
        "b_x": 8.22,
        "e_x": -10.0,
        "d_y": 1.688,
        "c_y": 1.79,
        "b_y": 8.822,
        "e_y": -2.02,
        **_LOSSES,
    },
    "front": {
        "d_x": 1.688,
        "c_x": 1.65,
        "b_x": 8.22,
        "e_x": -10.0,
        "d_y": 1.688,
        "c_y": 1.79,
        "b_y": 12.848,
        "e_y": -1.206,
        **_LOSSES,
    },
}

# Multibody reference model
ADAMS_VEHICLE = {
    "m": 1528.68,
    "a": 1.48,
    "b": 1.08,
    "h": 0.43,
    "I_zz": 6022.36,
    "I_xz": -1.91,
    "I_yy": 6129.12,
    "g": 9.81,
}

_ADAMS_AXLE = {
    "d_x": 1.48,
    "c_x": 1.37,
    "b_x": 18.22,
    "e_x": -0.46,
    "d_y": 1.22,
    "c_y": 1.25,
    "b_y": 17.8,
    "e_y": 0.02,
    **_LOSSES,
}

ADAMS_TIRES = {"rear": dict(_ADAMS_AXLE), "front": dict(_ADAMS_AXLE)}

BUILT_IN_VEHICLES = {"sports": SPORTS_VEHICLE, "adams": ADAMS_VEHICLE}
BUILT_IN_TIRES = {"sports": SPORTS_TIRES, "adams": ADAMS_TIRES}
