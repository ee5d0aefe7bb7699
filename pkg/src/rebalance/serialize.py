"""Flat ``key=value`` text records for fitted models.

Floats are written with ``repr`` so they parse back bit-identically.  Stumps
are ``stump=feature,threshold,polarity,alpha`` lines; ensemble members are
delimited by ``member=<i>`` lines, each followed by that member's
``threshold_b`` and stumps.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from .core import ParameterError
from .ensemble import MetaEnsemble
from .learn import BoostedModel, LinearModel, Stump

Model = Union[LinearModel, BoostedModel, MetaEnsemble]


def _floats(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")] if text else []


def _boosted_lines(model: BoostedModel) -> list[str]:
    lines = [f"threshold_b={model.threshold_b!r}"]
    for stump, alpha in zip(model.stumps, model.alphas):
        lines.append(f"stump={stump.feature_index},{stump.threshold!r},"
                     f"{stump.polarity},{alpha!r}")
    return lines


def model_to_text(model: Model) -> str:
    if isinstance(model, LinearModel):
        cw = ",".join(f"{k}:{v!r}" for k, v in sorted(model.class_weights.items()))
        lines = [
            "kind=logistic",
            f"penalty={model.penalty.value}",
            f"strength={float(model.strength)!r}",
            f"theta={_floats(model.theta)}",
            f"mean={_floats(model.mean)}",
            f"scale={_floats(model.scale)}",
            f"class_weights={cw}",
        ]
    elif isinstance(model, BoostedModel):
        lines = ["kind=boosted"] + _boosted_lines(model)
    elif isinstance(model, MetaEnsemble):
        lines = ["kind=meta", f"n_members={len(model.members)}"]
        for i, m in enumerate(model.members):
            lines.append(f"member={i}")
            lines += _boosted_lines(m)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return "\n".join(lines) + "\n"


def _pairs(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"line {lineno}: expected key=value, got {line!r}")
        yield key.strip(), value.strip()


def _parse_stump(value: str) -> tuple[Stump, float]:
    f, thr, pol, alpha = value.split(",")
    return Stump(int(f), float(thr), int(pol)), float(alpha)


def model_from_text(text: str) -> Model:
    pairs = list(_pairs(text))
    if not pairs or pairs[0][0] != "kind":
        raise ParameterError("model record must start with kind=")
    kind = pairs[0][1]
    body = pairs[1:]
    if kind == "logistic":
        kv = dict(body)
        cw = {}
        for item in filter(None, kv.get("class_weights", "").split(",")):
            k, v = item.split(":")
            cw[int(k)] = float(v)
        return LinearModel(
            theta=np.array(_parse_floats(kv["theta"])),
            penalty=kv["penalty"],
            strength=float(kv["strength"]),
            class_weights=cw or {0: 1.0, 1: 1.0},
            mean=np.array(_parse_floats(kv["mean"])),
            scale=np.array(_parse_floats(kv["scale"])),
        )
    if kind == "boosted":
        return _boosted_from_pairs(body)
    if kind == "meta":
        groups: list[list] = []
        for key, value in body:
            if key == "n_members":
                continue
            if key == "member":
                groups.append([])
            elif not groups:
                raise ParameterError(f"{key}= before the first member= line")
            else:
                groups[-1].append((key, value))
        return MetaEnsemble([_boosted_from_pairs(g) for g in groups])
    raise ParameterError(f"unknown model kind {kind!r}")


def _boosted_from_pairs(pairs) -> BoostedModel:
    b = 0.0
    stumps, alphas = [], []
    for key, value in pairs:
        if key == "threshold_b":
            b = float(value)
        elif key == "stump":
            s, a = _parse_stump(value)
            stumps.append(s)
            alphas.append(a)
        else:
            raise ParameterError(f"unexpected key {key!r} in boosted model")
    return BoostedModel(stumps, alphas, b)
