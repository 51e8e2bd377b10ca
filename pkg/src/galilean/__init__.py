"""Special Galilean group SGal(3): maps, uncertainty and IMU preintegration."""

from .errors import GalileanError
from .sgal3 import (
    DIM,
    Event,
    GalileanTransform,
    act,
    ad_small,
    adjoint,
    compose,
    exp,
    identity,
    inverse,
    left_jacobian_group,
    log,
    right_jacobian_group,
    tangent,
    vee,
    wedge,
)

__all__ = [
    "DIM",
    "Event",
    "GalileanError",
    "GalileanTransform",
    "act",
    "ad_small",
    "adjoint",
    "compose",
    "exp",
    "identity",
    "inverse",
    "left_jacobian_group",
    "log",
    "right_jacobian_group",
    "tangent",
    "vee",
    "wedge",
]
