"""Constructors for concrete families: worked examples and seeded test fodder.

Three shapes matter in practice.  Initial-segment chains ({n : p_n < x}) are
the canonical nested families.  The dyadic construction keyed by binary
expansions produces genuine almost chains that are not chains: each index
omits the truncations of its own expansion sitting just below it, so lower
indices keep elements that higher ones drop.  Seeded perturbations and
sign-matrix ingestion supply reproducible noisy instances for the checkers
and the adjuster.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    ChainFamily,
    GroundSet,
    IndexValue,
    InputError,
    SetBits,
    parse_index,
)


@dataclass(frozen=True)
class DyadicGround:
    """Ground set enumerating the dyadics k/2^depth inside (0, 1) in order."""

    depth: int

    def __post_init__(self) -> None:
        if not isinstance(self.depth, int) or self.depth < 1:
            raise InputError(f"depth must be a positive integer, got {self.depth!r}")

    @property
    def ground(self) -> GroundSet:
        return GroundSet((1 << self.depth) - 1)

    def point(self, n: int) -> IndexValue:
        """Numeric value of ground element n."""
        self.ground.check_element(n)
        return Fraction(n + 1, 1 << self.depth)

    def index_of(self, q: IndexValue) -> int:
        scaled = q * (1 << self.depth)
        if scaled.denominator != 1 or not 1 <= scaled.numerator < (1 << self.depth):
            raise InputError(f"{q} is not a depth-{self.depth} dyadic in (0, 1)")
        return scaled.numerator - 1


@dataclass(frozen=True)
class BitIndex:
    """An index given by a finite binary expansion 0.b1 b2 ... bL."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bits or any(b not in (0, 1) for b in self.bits):
            raise InputError(f"bits must be a nonempty 0/1 word, got {self.bits!r}")

    @classmethod
    def from_string(cls, word: str) -> BitIndex:
        if not word or set(word) - {"0", "1"}:
            raise InputError(f"bit word must be nonempty over 0/1, got {word!r}")
        return cls(tuple(int(c) for c in word))

    @property
    def value(self) -> IndexValue:
        return Fraction(int("".join(map(str, self.bits)), 2), 1 << len(self.bits))


def excluded_dyadics(x: BitIndex, depth: int) -> tuple[IndexValue, ...]:
    """Truncations of x at the positions where its expansion carries a 1.

    For every position n < depth whose next bit is 1, the truncation to n bits
    (the value of the word with that 1 zeroed out) is a dyadic lying just
    below x; truncations equal to 0 fall outside the open-interval ground and
    are dropped.
    """
    values = []
    t = Fraction(0)
    for n in range(depth):
        if x.bits[n] == 1 and t > 0:
            values.append(t)
        t += Fraction(x.bits[n], 1 << (n + 1))
    return tuple(values)


def initial_segment_chain(
    points: Sequence[IndexValue], cut_indices: Sequence[IndexValue]
) -> ChainFamily:
    """Family A_x = {n : p_n < x} over ground positions p_n; always a chain."""
    positions = tuple(points)
    ground = GroundSet(len(positions))
    xs = tuple(cut_indices)
    for a, b in zip(xs, xs[1:]):
        if not a < b:
            raise InputError(f"cut indices not strictly increasing at {a} >= {b}")
    taken = set(positions)
    pairs = []
    for x in xs:
        if x in taken:
            raise InputError(f"cut index {x} coincides with a ground position")
        mask = 0
        for n, p in enumerate(positions):
            if p < x:
                mask |= 1 << n
        pairs.append((x, SetBits(ground, mask)))
    return ChainFamily(ground, xs, tuple(s for _, s in pairs))


def marciszewski_family(xs: Sequence[BitIndex], ground: DyadicGround) -> ChainFamily:
    """Family A'_x = {q in ground : q < x, q not an excluded truncation of x}.

    Each x must carry at least `depth` bits and must not itself be a dyadic of
    depth <= `depth`, so that every comparison with a ground point is strict.
    """
    d = ground.depth
    gset = ground.ground
    scale = 1 << d
    pairs: list[tuple[IndexValue, SetBits]] = []
    seen: set[IndexValue] = set()
    for x in xs:
        if len(x.bits) < d:
            raise InputError(
                f"bit word of length {len(x.bits)} is shorter than depth {d}"
            )
        v = x.value
        if (v * scale).denominator == 1:
            raise InputError(f"{v} is a depth-{d} dyadic; comparisons would be ambiguous")
        if v in seen:
            raise InputError(f"duplicate index value {v}")
        seen.add(v)
        below = v.numerator * scale // v.denominator  # ground points strictly below x
        mask = (1 << below) - 1
        for t in excluded_dyadics(x, d):
            mask &= ~(1 << ground.index_of(t))
        pairs.append((v, SetBits(gset, mask)))
    return ChainFamily.from_pairs(gset, pairs)


def uniform_positions(size: int) -> tuple[IndexValue, ...]:
    """Evenly spaced ground positions (n+1)/(size+1) inside (0, 1)."""
    return tuple(Fraction(n + 1, size + 1) for n in range(size))


def sample_cut_indices(rng: random.Random, size: int, count: int) -> tuple[IndexValue, ...]:
    """Draw `count` distinct cut indices that avoid the uniform positions.

    Values come from an odd-numerator grid (2r+1)/(2T(size+1)), so they can
    never equal any (n+1)/(size+1).
    """
    if count < 0:
        raise InputError(f"count must be non-negative, got {count}")
    repeats = max(1, -(-count // (size + 1)))  # ceil
    slots = repeats * (size + 1)
    draws = rng.sample(range(slots), count)
    return tuple(sorted(Fraction(2 * r + 1, 2 * slots) for r in draws))


def random_bit_indices(
    rng: random.Random, depth: int, count: int, extra_bits: int = 8
) -> tuple[BitIndex, ...]:
    """Draw distinct bit words of length depth+extra_bits, final bit forced to 1.

    The forced tail bit keeps every value off the depth-`depth` dyadic grid.
    """
    if extra_bits < 1:
        raise InputError(f"extra_bits must be positive, got {extra_bits}")
    length = depth + extra_bits
    if count > (1 << (length - 1)):
        raise InputError(f"cannot draw {count} distinct words of length {length}")
    prefixes = rng.sample(range(1 << (length - 1)), count)
    return tuple(
        BitIndex(tuple(int(c) for c in format(2 * p + 1, f"0{length}b")))
        for p in prefixes
    )


def perturbed_chain(
    seed: int, size: int, cut_indices: Sequence[IndexValue], flips_per_set: int
) -> ChainFamily:
    """Initial-segment chain over uniform positions with seeded bit flips.

    Exactly `flips_per_set` distinct elements are toggled in each set, in
    index order, so the output is a deterministic function of its arguments.
    """
    if flips_per_set < 0:
        raise InputError(f"flips_per_set must be non-negative, got {flips_per_set}")
    if flips_per_set > size:
        raise InputError(f"cannot flip {flips_per_set} distinct bits in a ground of {size}")
    base = initial_segment_chain(uniform_positions(size), cut_indices)
    rng = random.Random(seed)
    flipped = []
    for s in base.sets:
        mask = s.mask
        for n in rng.sample(range(size), flips_per_set):
            mask ^= 1 << n
        flipped.append(SetBits(base.ground, mask))
    return ChainFamily(base.ground, base.indices, tuple(flipped))


def from_sign_matrix(
    indices: Sequence[IndexValue], rows: Sequence[Sequence[Fraction]]
) -> ChainFamily:
    """Family A_y = {n : h(y, n) < 0} from a dense matrix of rationals."""
    if len(indices) != len(rows):
        raise InputError(f"{len(indices)} indices but {len(rows)} matrix rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"matrix is ragged, row lengths {sorted(widths)}")
    ground = GroundSet(widths.pop())
    pairs = []
    for y, row in zip(indices, rows):
        mask = 0
        for n, value in enumerate(row):
            if value < 0:
                mask |= 1 << n
        pairs.append((y, SetBits(ground, mask)))
    return ChainFamily.from_pairs(ground, pairs)


# --- generator configs --------------------------------------------------------
#
# A generator config is a JSON object {"kind": ..., ...} naming one of the
# constructors above, either with explicit data or with (seed, sizes) for the
# seeded samplers.  Unknown kinds and unknown keys are rejected.

GENERATOR_KINDS = ("initial-chain", "marciszewski", "perturbed", "sign-matrix")


def _check_keys(cfg: dict, allowed: set[str], required: set[str]) -> None:
    keys = set(cfg)
    unknown = keys - allowed
    if unknown:
        raise InputError(f"unknown config keys {sorted(unknown)} for kind {cfg['kind']!r}")
    missing = required - keys
    if missing:
        raise InputError(f"missing config keys {sorted(missing)} for kind {cfg['kind']!r}")


def _int_field(cfg: dict, key: str, default: int | None = None) -> int:
    value = cfg.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise InputError(f"config key {key!r} must be an integer, got {value!r}")
    return value


def _index_list(values) -> tuple[IndexValue, ...]:
    if not isinstance(values, list):
        raise InputError(f"expected a list of 'p/q' strings, got {values!r}")
    return tuple(parse_index(v) for v in values)


def generator_config_from_text(text: str) -> dict:
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"generator config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise InputError("generator config must be an object with a 'kind' key")
    if cfg["kind"] not in GENERATOR_KINDS:
        raise InputError(f"unknown generator kind {cfg['kind']!r}")
    return cfg


def family_from_config(cfg: dict) -> ChainFamily:
    """Run the generator described by a validated config object."""
    kind = cfg.get("kind")
    if kind == "initial-chain":
        if "points" in cfg or "X" in cfg:
            _check_keys(cfg, {"kind", "points", "X"}, {"kind", "points", "X"})
            return initial_segment_chain(_index_list(cfg["points"]), _index_list(cfg["X"]))
        _check_keys(cfg, {"kind", "seed", "ground_size", "count"}, {"kind", "ground_size", "count"})
        size = _int_field(cfg, "ground_size")
        rng = random.Random(_int_field(cfg, "seed", 0))
        xs = sample_cut_indices(rng, size, _int_field(cfg, "count"))
        return initial_segment_chain(uniform_positions(size), xs)
    if kind == "marciszewski":
        if "xs" in cfg:
            _check_keys(cfg, {"kind", "depth", "xs"}, {"kind", "depth", "xs"})
            words = cfg["xs"]
            if not isinstance(words, list):
                raise InputError(f"'xs' must be a list of bit words, got {words!r}")
            xs = tuple(BitIndex.from_string(w) for w in words)
        else:
            _check_keys(cfg, {"kind", "depth", "seed", "count"}, {"kind", "depth", "count"})
            rng = random.Random(_int_field(cfg, "seed", 0))
            xs = random_bit_indices(rng, _int_field(cfg, "depth"), _int_field(cfg, "count"))
        return marciszewski_family(xs, DyadicGround(_int_field(cfg, "depth")))
    if kind == "perturbed":
        allowed = {"kind", "seed", "ground_size", "flips", "X", "count"}
        _check_keys(cfg, allowed, {"kind", "ground_size", "flips"})
        size = _int_field(cfg, "ground_size")
        seed = _int_field(cfg, "seed", 0)
        if "X" in cfg:
            xs = _index_list(cfg["X"])
        elif "count" in cfg:
            xs = sample_cut_indices(random.Random(seed ^ 0x5EED), size, _int_field(cfg, "count"))
        else:
            raise InputError("perturbed config needs either 'X' or 'count'")
        return perturbed_chain(seed, size, xs, _int_field(cfg, "flips"))
    if kind == "sign-matrix":
        if "rows" in cfg or "Y" in cfg:
            _check_keys(cfg, {"kind", "Y", "rows"}, {"kind", "Y", "rows"})
            rows = [
                tuple(v if isinstance(v, int) else parse_index(v) for v in row)
                for row in cfg["rows"]
            ]
            return from_sign_matrix(_index_list(cfg["Y"]), rows)
        _check_keys(cfg, {"kind", "seed", "ground_size", "count"}, {"kind", "ground_size", "count"})
        size = _int_field(cfg, "ground_size")
        rng = random.Random(_int_field(cfg, "seed", 0))
        ys = sample_cut_indices(rng, size, _int_field(cfg, "count"))
        rows = [
            tuple(rng.choice((Fraction(-1), Fraction(1))) for _ in range(size))
            for _ in ys
        ]
        return from_sign_matrix(ys, rows)
    raise InputError(f"unknown generator kind {kind!r}")
