"""Exact JSON round-trips for laws, paths, and point systems.

Rationals travel as strings "p/q" so nothing is lost to floats; dumps are
canonical (sorted keys, two-space indent, trailing newline) so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .density import LocationLaw, PiecewiseDensity
from .paths import PiecewiseLinearPath
from .poset import PointSystem


def rat_str(x) -> str:
    return str(Fraction(x))


def parse_rat(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ValueError(f"expected a rational string, got {value!r}")
    return Fraction(value)


def law_to_obj(law: LocationLaw) -> dict:
    return {
        "T": rat_str(law.T),
        "atoms": {
            "zero": rat_str(law.atom0),
            "T": rat_str(law.atomT),
            "inf": rat_str(law.atomInf),
        },
        "density": {
            "breakpoints": [rat_str(x) for x in law.density.breakpoints],
            "segments": [
                {"p": rat_str(p), "q": rat_str(q)} for p, q in law.density.segments
            ],
        },
    }


def law_from_obj(obj: dict) -> LocationLaw:
    density = obj["density"]
    f = PiecewiseDensity(
        tuple(parse_rat(x) for x in density["breakpoints"]),
        tuple((parse_rat(s["p"]), parse_rat(s["q"])) for s in density["segments"]),
    )
    atoms = obj["atoms"]
    return LocationLaw(
        T=parse_rat(obj["T"]),
        density=f,
        atom0=parse_rat(atoms["zero"]),
        atomT=parse_rat(atoms["T"]),
        atomInf=parse_rat(atoms["inf"]),
    )


def path_to_obj(path: PiecewiseLinearPath) -> dict:
    return {"nodes": [[rat_str(t), rat_str(y)] for t, y in path.nodes]}


def path_from_obj(obj: dict) -> PiecewiseLinearPath:
    return PiecewiseLinearPath(
        tuple((parse_rat(t), parse_rat(y)) for t, y in obj["nodes"])
    )


def point_system_to_obj(system: PointSystem) -> dict:
    obj = {
        "points": [rat_str(p) for p in system.points],
        "order_kind": system.order_kind,
    }
    if system.explicit_order is not None:
        obj["explicit_order"] = list(system.explicit_order)
    return obj


def point_system_from_obj(obj: dict) -> PointSystem:
    ranks = obj.get("explicit_order")
    return PointSystem(
        points=tuple(parse_rat(p) for p in obj["points"]),
        order_kind=obj["order_kind"],
        explicit_order=None if ranks is None else tuple(int(r) for r in ranks),
    )


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("top-level JSON value must be an object")
    return obj
