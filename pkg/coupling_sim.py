"""Finite-cylinder simulation of the odometer / ⊕Z/2 orbit coupling.

Points of the truncated cylinder {0,1}^N are ints read least-significant bit
first, so the odometer is x + 1 with overflow flagged at the all-ones point and
a finite-support element s of ⊕Z/2 acts by XOR with its bitmask.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import pandas as pd

from errors import CocycleError

logger = logging.getLogger(__name__)

Support = FrozenSet[int]
# ("Z", k) for the k-th power of the odometer, ("L", s) for the flip by s
Generator = Tuple[str, Union[int, Support]]


@dataclass(frozen=True)
class CylinderSpace:
    bits: int

    @property
    def size(self) -> int:
        return 1 << self.bits

    @property
    def weight(self) -> float:
        return 1.0 / self.size

    def points(self) -> range:
        return range(self.size)

    def format_point(self, x: int) -> str:
        """LSB-first bit string"""
        return ''.join('1' if x >> i & 1 else '0' for i in range(self.bits))

    def parse_point(self, text: str) -> int:
        if len(text) != self.bits or set(text) - {'0', '1'}:
            raise CocycleError(f"{text!r} is not a {self.bits}-bit point")
        return sum(1 << i for i, c in enumerate(text) if c == '1')


def support_mask(space: CylinderSpace, s: Iterable[int]) -> int:
    s = frozenset(s)
    if any(k < 0 or k >= space.bits for k in s):
        raise CocycleError(f"Support {sorted(s)} exceeds {space.bits} bits", witness=sorted(s))
    return sum(1 << k for k in s)


def odometer(space: CylinderSpace, x: int) -> Tuple[Optional[int], bool]:
    """Add one with carry; (result, overflowed). The all-ones point has no image in the truncation."""
    return odometer_power(space, x, 1)


def odometer_power(space: CylinderSpace, x: int, k: int) -> Tuple[Optional[int], bool]:
    """T^k(x), or (None, True) when the carry leaves the truncation; never wrapped"""
    y = x + k
    if 0 <= y < space.size:
        return y, False
    return None, True


def flip(space: CylinderSpace, s: Iterable[int], x: int) -> int:
    return x ^ support_mask(space, s)


def oe_cocycle(space: CylinderSpace, s: Iterable[int], x: int) -> Tuple[int, bool]:
    """The k with odometer^k(x) = flip(s, x); exact on the truncation, which never overflows here"""
    return flip(space, s, x) - x, False


def oe_inverse_cocycle(space: CylinderSpace, k: int, x: int) -> Tuple[Optional[Support], bool]:
    """The support s with flip(s, x) = odometer^k(x); (None, True) when odometer^k leaves the truncation"""
    y, overflow = odometer_power(space, x, k)
    if overflow:
        return None, True
    diff = x ^ y
    return frozenset(i for i in range(space.bits) if diff >> i & 1), False


def act(space: CylinderSpace, g: Generator, x: int) -> Tuple[Optional[int], bool]:
    kind, value = g
    if kind == 'Z':
        return odometer_power(space, x, value)
    if kind == 'L':
        return flip(space, value, x), False
    raise CocycleError(f"Unknown generator tag {kind!r}")


def format_generator(g: Generator) -> str:
    kind, value = g
    if kind == 'L':
        return '{' + ','.join(str(k) for k in sorted(value)) + '}'
    return f"T^{value}"


@dataclass
class CocycleTable:
    """c(g, x) for generators g of ⊕Z/2, with the points where the truncation overflowed"""
    space: CylinderSpace
    values: Dict[Tuple[Support, int], int] = field(default_factory=dict)
    overflow: Dict[Tuple[Support, int], bool] = field(default_factory=dict)

    def __call__(self, s: Iterable[int], x: int) -> int:
        return self.values[(frozenset(s), x)]

    @property
    def generators(self) -> List[Support]:
        return sorted({s for s, _ in self.values}, key=lambda s: (len(s), sorted(s)))


def build_oe_table(space: CylinderSpace, generators: Iterable[Iterable[int]]) -> CocycleTable:
    table = CocycleTable(space)
    for s in generators:
        s = frozenset(s)
        for x in space.points():
            k, overflow = oe_cocycle(space, s, x)
            table.values[(s, x)] = k
            table.overflow[(s, x)] = overflow
    logger.info(f"Cocycle table on {space.bits} bits for {len(table.generators)} generators")
    return table


@dataclass(frozen=True)
class CocycleLawReport:
    holds: bool
    checked: int
    violations: Tuple[Tuple[Support, Support, int], ...] = ()


def cocycle_law_check(table: CocycleTable, samples: Optional[Iterable[int]] = None) -> CocycleLawReport:
    """c(s1·s2, x) = c(s1, s2·x) + c(s2, x) wherever the product s1·s2 is tabulated and nothing overflowed"""
    space = table.space
    gens = table.generators
    present = set(gens)
    points = list(samples) if samples is not None else list(space.points())
    violations = []
    checked = 0
    for s1 in gens:
        for s2 in gens:
            product = s1 ^ s2
            if product not in present:
                continue
            for x in points:
                y = flip(space, s2, x)
                keys = [(product, x), (s1, y), (s2, x)]
                if any(table.overflow.get(key, True) for key in keys):
                    continue
                checked += 1
                if table.values[(product, x)] != table.values[(s1, y)] + table.values[(s2, x)]:
                    violations.append((s1, s2, x))
    if violations:
        logger.warning(f"Cocycle law fails at {len(violations)} of {checked} triples")
    return CocycleLawReport(not violations, checked, tuple(violations))


def linfty_bound(space: CylinderSpace, s: Iterable[int]) -> int:
    bound = 0
    for x in space.points():
        k, overflow = oe_cocycle(space, s, x)
        if not overflow:
            bound = max(bound, abs(k))
    return bound


def cohomologous(table: CocycleTable, phi: Callable[[int], int]) -> CocycleTable:
    """c'(s, x) = φ(s·x) + c(s, x) − φ(x)"""
    space = table.space
    result = CocycleTable(space, overflow=dict(table.overflow))
    for (s, x), k in table.values.items():
        result.values[(s, x)] = phi(flip(space, s, x)) + k - phi(x)
    return result


def return_set(space: CylinderSpace, x: int, region: Callable[[int], bool], elements: Iterable[int]) -> List[int]:
    """Odometer powers k in the given ball with T^k(x) in the region, skipping those that overflow"""
    found = []
    for k in elements:
        y, overflow = odometer_power(space, x, k)
        if not overflow and region(y):
            found.append(k)
    return found


def return_density(space: CylinderSpace, x: int, region: Callable[[int], bool], n: int) -> float:
    """|R_Z(x) ∩ B(n)| / |B(n)|"""
    ball = range(-n, n + 1)
    return len(return_set(space, x, region, ball)) / len(ball)


def cocycle_statistics(table: CocycleTable) -> pd.DataFrame:
    """Per generator: mean, max |c| and overflow count, one row each"""
    rows = []
    for s in table.generators:
        keys = [(s, x) for x in table.space.points()]
        values = [table.values[key] for key in keys if not table.overflow[key]]
        rows.append({
            'generator': format_generator(('L', s)),
            'mean': sum(values) / len(values) if values else 0.0,
            'mean_abs': sum(abs(v) for v in values) / len(values) if values else 0.0,
            'linfty': max((abs(v) for v in values), default=0),
            'overflow': sum(1 for key in keys if table.overflow[key]),
        })
    return pd.DataFrame(rows, columns=['generator', 'mean', 'mean_abs', 'linfty', 'overflow'])
