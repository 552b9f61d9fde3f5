"""Built-in catalog of harmonic functions and common-zero-set pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

from .errors import InputError
from .harmonic import ClosedForm, HarmonicSpec
from .region import Region


def im_zk(k: int, dimension: int = 2) -> ClosedForm:
    return ClosedForm("im_zk", (k,), dimension)


def exp_sin(dimension: int = 2) -> ClosedForm:
    return ClosedForm("exp_sin", (), dimension)


def cosh_sin(dimension: int = 2) -> ClosedForm:
    return ClosedForm("cosh_sin", (), dimension)


def im_zk_perturbed(k: int, a: float, dimension: int = 2) -> ClosedForm:
    return ClosedForm("im_zk_perturbed", (k, a), dimension)


@dataclass(frozen=True)
class PairRecord:
    id: str
    u: HarmonicSpec
    v: HarmonicSpec
    domain: Region
    note: str = ""


def _disc(radius=1.0):
    return Region((0.0, 0.0), radius, 128)


SPECS: Dict[str, HarmonicSpec] = {
    "im_z1": im_zk(1),
    "im_z2": im_zk(2),
    "im_z3": im_zk(3),
    "exp_sin": exp_sin(),
    "cosh_sin": cosh_sin(),
    "im_z1_pert": im_zk_perturbed(1, 0.3),
    "im_z2_pert": im_zk_perturbed(2, 0.3),
    "im_z3_pert": im_zk_perturbed(3, 0.3),
}

PAIRS: Dict[str, PairRecord] = {
    rec.id: rec
    for rec in [
        PairRecord("exp_cosh", exp_sin(), cosh_sin(), _disc(),
                   "e^x sin y and cosh x sin y share their real zeros; ratio e^x sech x"),
        PairRecord("im_z1_pert", im_zk(1), im_zk_perturbed(1, 0.3), _disc(),
                   "Im(z + a z^2) = y (1 + 2a x)"),
        PairRecord("im_z2_pert", im_zk(2), im_zk_perturbed(2, 0.3), _disc(),
                   "Im(w + a w^2) = Im w (1 + 2a Re w), w = z^2"),
        PairRecord("im_z3_pert", im_zk(3), im_zk_perturbed(3, 0.3), _disc(),
                   "Im(w + a w^2) = Im w (1 + 2a Re w), w = z^3"),
    ]
}


def get_spec(name: str) -> HarmonicSpec:
    try:
        return SPECS[name]
    except KeyError:
        raise InputError(f"unknown catalog spec {name!r}; valid ids: {', '.join(sorted(SPECS))}") from None


def get_pair(pair_id: str) -> PairRecord:
    try:
        return PAIRS[pair_id]
    except KeyError:
        raise InputError(f"unknown pair id {pair_id!r}; valid ids: {', '.join(sorted(PAIRS))}") from None
