"""Upper bounds on the success probability of codes above the strong converse rates.

Two envelopes are provided for codes obeying a maximum photon-number
constraint:

* ``envelope_thm1``: threshold ``g(eta N_S / ((1-eta) N_B + 1))``,
* ``envelope_thm2``: threshold ``g(eta N_S + (1-eta) N_B) - log2(1 + 2 (1-eta) N_B)``.

Each envelope is an exponential term plus slack terms built from a family of
vanishing sequences (``DeltaSet``). The additive-noise versions follow from
replacing ``(1-eta) N_B`` by ``n_bar`` and ``eta`` by one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from ..channels import ChannelParams
from ..entropy import g
from ..errors import InvalidArgumentError, MissingDeltaError


def root_exponential(n):
    """``exp(-sqrt(n))``: the default decay for the vanishing slack sequences."""
    return math.exp(-math.sqrt(n))


def inverse(n):
    return 1.0 / n


NAMED_SCHEDULES = {"root-exponential": root_exponential, "inverse": inverse, "zero": lambda n: 0.0}


@dataclass(frozen=True)
class DeltaSchedule:
    """A nonnegative sequence ``delta(n)`` given by a rule or a table.

    Args:
        rule: callable ``n -> value`` or the name of a built-in rule
            (``"root-exponential"``, ``"inverse"``, ``"zero"``).
        table: mapping ``n -> value``; used instead of ``rule`` when given.
            Looking up a block length that is not tabulated raises
            ``MissingDeltaError``.
    """

    rule: Union[str, Callable[[int], float], None] = "root-exponential"
    table: Mapping[int, float] = None

    def __post_init__(self):
        if self.table is not None:
            items = sorted((int(k), float(v)) for k, v in self.table.items())
            values = [v for _, v in items]
            if any(v < 0.0 for v in values):
                raise InvalidArgumentError("slack values must be nonnegative")
            if any(b > a for a, b in zip(values, values[1:])):
                raise InvalidArgumentError("tabulated slack must be nonincreasing in n")
            object.__setattr__(self, "table", dict(items))
        elif isinstance(self.rule, str):
            if self.rule not in NAMED_SCHEDULES:
                raise InvalidArgumentError(f"unknown schedule {self.rule!r}")
        elif not callable(self.rule):
            raise InvalidArgumentError("schedule needs a rule or a table")

    @classmethod
    def from_table(cls, table):
        return cls(rule=None, table=table)

    @property
    def name(self):
        if self.table is not None:
            return "table"
        return self.rule if isinstance(self.rule, str) else getattr(self.rule, "__name__", "custom")

    def __call__(self, n):
        if self.table is not None:
            if int(n) not in self.table:
                raise MissingDeltaError(f"no tabulated slack for n={n}")
            return self.table[int(n)]
        fn = NAMED_SCHEDULES[self.rule] if isinstance(self.rule, str) else self.rule
        value = float(fn(n))
        if value < 0.0:
            raise InvalidArgumentError(f"slack schedule returned {value} at n={n}")
        return value


def _as_schedule(value):
    if isinstance(value, DeltaSchedule):
        return value
    if isinstance(value, Mapping):
        return DeltaSchedule.from_table(value)
    return DeltaSchedule(rule=value)


@dataclass(frozen=True)
class DeltaSet:
    """Slack parameters of both envelopes.

    ``d1``, ``d4`` and ``d6`` are sequences in ``n`` (schedules, tables,
    callables or rule names); ``d2``, ``d3``, ``d5`` and ``delta`` are constants.
    ``d1`` bounds the weight of the code outside the photon cutoff, ``d4`` and
    ``d6`` the mass of the channel output beyond its typical photon number.
    """

    d1: object = "root-exponential"
    d2: float = 0.01
    d3: float = 0.01
    d4: object = "root-exponential"
    d5: float = 0.01
    d6: object = "root-exponential"
    delta: float = 0.01

    def __post_init__(self):
        for name in ("d1", "d4", "d6"):
            object.__setattr__(self, name, _as_schedule(getattr(self, name)))
        for name in ("d2", "d3", "d5", "delta"):
            if getattr(self, name) < 0.0:
                raise InvalidArgumentError(f"{name} must be nonnegative")

    @classmethod
    def zeros(cls):
        return cls("zero", 0.0, 0.0, "zero", 0.0, "zero", 0.0)

    def describe(self):
        return {
            "d1": self.d1.name,
            "d2": self.d2,
            "d3": self.d3,
            "d4": self.d4.name,
            "d5": self.d5,
            "d6": self.d6.name,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class ConverseEnvelope:
    """Rate, block length, channel and slack parameters for one envelope evaluation.

    ``channel`` selects ``"thermal"`` (reads ``params.eta`` and ``params.n_b``)
    or ``"additive"`` (reads ``params.n_bar``).
    """

    rate_R: float
    uses_n: int
    params: ChannelParams
    n_s: float
    deltas: DeltaSet = field(default_factory=DeltaSet)
    channel: str = "thermal"

    def __post_init__(self):
        if int(self.uses_n) != self.uses_n or self.uses_n < 1:
            raise InvalidArgumentError("uses_n must be a positive integer")
        if self.n_s < 0.0:
            raise InvalidArgumentError("N_S must be nonnegative")
        if self.channel not in ("thermal", "additive"):
            raise InvalidArgumentError(f"unknown channel {self.channel!r}")

    def at(self, n):
        return ConverseEnvelope(self.rate_R, int(n), self.params, self.n_s, self.deltas, self.channel)

    @property
    def _gain_and_noise(self):
        if self.channel == "additive":
            return 1.0, self.params.n_bar
        return self.params.eta, self.params.noise_photons


@dataclass(frozen=True)
class EnvelopeTerms:
    n: int
    threshold: float
    log2_exponential: float
    slack: float

    @property
    def exponential(self):
        return 2.0 ** min(self.log2_exponential, 1.0)

    @property
    def raw(self):
        return self.exponential + self.slack

    @property
    def bound(self):
        return min(1.0, self.raw)

    @property
    def vacuous(self):
        return self.raw >= 1.0


def threshold_thm1(env):
    eta, noise = env._gain_and_noise
    return g(eta * env.n_s / (noise + 1.0))


def threshold_thm2(env, d5=None):
    eta, noise = env._gain_and_noise
    d5 = env.deltas.d5 if d5 is None else d5
    return g(eta * env.n_s + noise + d5) - math.log2(1.0 + 2.0 * noise)


def terms_thm1(env):
    n, ds = env.uses_n, env.deltas
    thr = threshold_thm1(env)
    d1 = ds.d1(n)
    log2_exp = -n * (env.rate_R - thr - ds.d2 - ds.d3)
    slack = 2.0 * math.sqrt(d1 + ds.d4(n) + 2.0 * math.sqrt(d1))
    return EnvelopeTerms(n, thr, log2_exp, slack)


def terms_thm2(env):
    n, ds = env.uses_n, env.deltas
    thr = threshold_thm2(env)
    d1 = ds.d1(n)
    log2_exp = -n * (env.rate_R - thr + math.log2(n) / n - ds.delta)
    slack = 1.0 / n + 2.0 * math.sqrt(d1 + 2.0 * math.sqrt(d1) + ds.d6(n))
    return EnvelopeTerms(n, thr, log2_exp, slack)


def envelope_thm1(env):
    """Success-probability bound above the ``g(eta N_S')`` rate, clamped to ``[0, 1]``."""
    return terms_thm1(env).bound


def envelope_thm2(env):
    """Success-probability bound above the ``g(...) - log2(1 + 2(1-eta)N_B)`` rate."""
    return terms_thm2(env).bound


_TERMS = {1: terms_thm1, 2: terms_thm2}


@dataclass(frozen=True)
class EnvelopeCurve:
    theorem: int
    ns: np.ndarray
    bounds: np.ndarray
    vacuous: np.ndarray
    threshold: float

    @property
    def monotone_tail(self):
        """True when the curve never increases after its last vacuous point."""
        live = np.flatnonzero(~self.vacuous)
        if live.size == 0:
            return True
        tail = self.bounds[live[0]:]
        return bool(np.all(np.diff(tail) <= 1e-15))

    def first_below(self, level):
        hits = np.flatnonzero(self.bounds < level)
        return int(self.ns[hits[0]]) if hits.size else None


def envelope_curve(env, theorem, ns: Sequence[int]):
    """Evaluate one envelope over block lengths ``ns``."""
    if theorem not in _TERMS:
        raise InvalidArgumentError("theorem must be 1 or 2")
    terms = [_TERMS[theorem](env.at(n)) for n in ns]
    return EnvelopeCurve(
        theorem,
        np.asarray([t.n for t in terms], dtype=int),
        np.asarray([t.bound for t in terms]),
        np.asarray([t.vacuous for t in terms], dtype=bool),
        terms[0].threshold if terms else float("nan"),
    )
