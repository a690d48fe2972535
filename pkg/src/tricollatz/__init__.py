"""Exact triadic-rational machinery for rescaled Collatz orbits."""

from .triadic import (
    TriadicRational,
    ZeroValueError,
    digits_base3,
    floor_scale,
    log3_floor,
    normalize,
    parse_triadic,
    phi_member,
)
from .maps import (
    Orbit,
    OrbitRecord,
    RescaledIterate,
    col2_step,
    col3_iterate,
    col3_step,
    col4_step,
    orbit,
    rescaled_iterates,
)
from .diophantine import (
    ApproxPair,
    PrefixTarget,
    frac_part,
    log2_3,
    prefix_order,
    prefix_target,
    record_pairs,
    steering_pairs,
)

__version__ = "0.1.0"
