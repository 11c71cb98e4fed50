"""Generating functions h(x, x') = (x - x')**2 / 2 + U(x) with cosine potentials."""
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PotentialSpec:
    """On-site potential U(x) = sum_k c_k cos(2 pi k x).

    ``harmonics`` is a sequence of ``(k, c)`` pairs with distinct positive
    integer wavenumbers. Amplitudes are stored raw; presets do any
    normalization.
    """

    harmonics: tuple = ()
    _k: np.ndarray = field(init=False, repr=False, compare=False)
    _c: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple((int(k), float(c)) for k, c in self.harmonics)
        ks = [k for k, _ in pairs]
        if any(k < 1 for k in ks):
            raise ValueError(f"wavenumbers must be >= 1, got {ks}")
        if len(set(ks)) != len(ks):
            raise ValueError(f"wavenumbers must be distinct, got {ks}")
        object.__setattr__(self, "harmonics", pairs)
        object.__setattr__(self, "_k", np.array(ks, dtype=float))
        object.__setattr__(self, "_c", np.array([c for _, c in pairs], dtype=float))

    def __call__(self, x, deriv=0):
        return potential_eval(self, x, deriv)

    def to_dict(self):
        return {"harmonics": [{"k": k, "c": c} for k, c in self.harmonics]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple((h["k"], h["c"]) for h in d["harmonics"]))


def potential_eval(spec: PotentialSpec, x, deriv: int = 0):
    """U(x), U'(x) or U''(x); broadcasts over array ``x``."""
    if deriv not in (0, 1, 2):
        raise ValueError(f"deriv must be 0, 1 or 2, got {deriv}")
    x = np.asarray(x, dtype=float)
    if spec._k.size == 0:
        out = np.zeros_like(x)
        return float(out) if out.ndim == 0 else out
    w = TWO_PI * spec._k
    phase = np.multiply.outer(x, w)
    if deriv == 0:
        out = np.cos(phase) @ spec._c
    elif deriv == 1:
        out = -np.sin(phase) @ (spec._c * w)
    else:
        out = -np.cos(phase) @ (spec._c * w**2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GeneratingModel:
    """h(x, x') = (x - x')**2 / 2 + U(x).

    The mixed partial h12 is identically -1, so the twist condition holds
    for every potential.
    """

    potential: PotentialSpec

    def U(self, x, deriv=0):
        return potential_eval(self.potential, x, deriv)

    def h(self, x, xp, which="value"):
        return h_partial(self, x, xp, which)


_SELECTORS = ("value", "1", "2", "11", "12", "22")


def h_partial(model: GeneratingModel, x, xp, which="value"):
    which = str(which)
    if which not in _SELECTORS:
        raise ValueError(f"unknown selector {which!r}; expected one of {_SELECTORS}")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    if which == "value":
        out = 0.5 * (x - xp) ** 2 + model.U(x)
    elif which == "1":
        out = (x - xp) + model.U(x, 1)
    elif which == "2":
        out = xp - x
    elif which == "11":
        out = 1.0 + model.U(x, 2)
    elif which == "12":
        out = np.full(np.broadcast(x, xp).shape, -1.0)
    else:
        out = np.ones(np.broadcast(x, xp).shape)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def multiharmonic(eps: float, amplitudes: Sequence[float]) -> GeneratingModel:
    """eps * sum_k a_k / (2 pi k)**2 cos(2 pi k x), k = 1..len(amplitudes)."""
    return GeneratingModel(PotentialSpec(tuple(
        (k, eps * a / (TWO_PI * k) ** 2) for k, a in enumerate(amplitudes, start=1)
    )))


def standard(eps: float) -> GeneratingModel:
    return multiharmonic(eps, (1.0,))


THREEHARMONIC_AMPLITUDES = (1.0, -0.3, 0.2)


def threeharmonic(eps: float) -> GeneratingModel:
    return multiharmonic(eps, THREEHARMONIC_AMPLITUDES)


def example4() -> GeneratingModel:
    # (2 pi k)**-1 normalization, not (2 pi k)**-2
    return GeneratingModel(PotentialSpec((
        (1, -0.18 / TWO_PI),
        (2, 0.42 / (2 * TWO_PI)),
        (3, 0.11 / (3 * TWO_PI)),
    )))


FAMILIES = {"standard": standard, "threeharmonic": threeharmonic}


def preset(name: str, eps: float = None) -> GeneratingModel:
    """Build a named model. ``name`` may carry the parameter as ``name:eps``."""
    if ":" in name:
        name, _, tail = name.partition(":")
        if eps is not None:
            raise ValueError("parameter given twice")
        eps = float(tail)
    if name in FAMILIES:
        if eps is None:
            raise ValueError(f"preset {name!r} needs a parameter, e.g. {name}:1.2")
        return FAMILIES[name](eps)
    if name == "example4":
        if eps is not None:
            raise ValueError("preset 'example4' takes no parameter")
        return example4()
    raise ValueError(f"unknown preset {name!r}")


def load_model(path) -> GeneratingModel:
    with open(path) as fh:
        return GeneratingModel(PotentialSpec.from_dict(json.load(fh)))


def dump_model(model: GeneratingModel, path):
    with open(path, "w") as fh:
        json.dump(model.potential.to_dict(), fh, indent=2)
        fh.write("\n")
