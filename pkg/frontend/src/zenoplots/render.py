"""Turn a FigureSpec plus simulator CSVs into an image file.

No numerics beyond the (V/lambda)^a and lambda/V^k rescalings, which are
recomputed here from each file's metadata rather than trusted from
precomputed columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvdata import Curve, SchemaError, check_shared, load_glob
from .figspec import FigureSpec


@dataclass
class RenderResult:
    """What was drawn, exposed for spot checks without parsing the image."""

    out_path: Path
    curves: list[Curve]
    main: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    inset: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)


def rescale_values(entropy: np.ndarray, lam: float, V: float, a: int) -> np.ndarray:
    return entropy * (V / lam) ** a


def rescale_times(times: np.ndarray, lam: float, V: float, k: int) -> np.ndarray:
    return times * lam / V**k


def render(spec: FigureSpec) -> RenderResult:
    curves = load_glob(spec.input, base=spec.base_dir)
    fig, ax = plt.subplots(figsize=(6, 4))
    result = RenderResult(out_path=Path(spec.base_dir) / spec.out, curves=curves)
    if spec.kind == "ee_curves":
        _draw_ee(ax, curves, result)
    elif spec.kind == "rescaled_inset":
        _draw_rescaled(fig, ax, curves, spec, result)
    elif spec.kind == "spectrum":
        _draw_spectrum(ax, curves, result)
    elif spec.kind == "collapse":
        _draw_collapse(ax, curves, result)
    else:
        _draw_coefficients(ax, curves, result)
    ax.set_xscale(spec.xscale)
    ax.set_yscale(spec.yscale)
    if spec.title:
        ax.set_title(spec.title)
    result.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(result.out_path, dpi=150)
    plt.close(fig)
    return result


def _draw_ee(ax, curves: list[Curve], result: RenderResult) -> None:
    check_shared(curves, ("L", "perturbation"))
    for c in curves:
        t, s = c.column("time"), c.column("entropy")
        ax.plot(t, s, label=c.label())
        result.main.append((t, s))
    ax.set_xlabel("Jt")
    ax.set_ylabel("S [nats]")
    ax.legend(fontsize=8)


def _draw_rescaled(fig, ax, curves, spec: FigureSpec, result: RenderResult) -> None:
    check_shared(curves, ("L", "sector", "perturbation"))
    inset = fig.add_axes([0.58, 0.55, 0.3, 0.3])
    for c in curves:
        t, s = c.column("time"), c.column("entropy")
        ax.plot(t, s, label=c.label())
        result.main.append((t, s))
        ti = rescale_times(t, c.lam, c.V, spec.time_exponent)
        si = rescale_values(s, c.lam, c.V, spec.value_exponent)
        inset.plot(ti, si)
        result.inset.append((ti, si))
    ax.set_xlabel("Jt")
    ax.set_ylabel("S [nats]")
    ax.legend(fontsize=8, loc="lower right")
    inset.set_xscale("log")
    inset.set_yscale("log")
    inset.set_ylabel(rf"$S (V/\lambda)^{spec.value_exponent}$", fontsize=8)


def _draw_spectrum(ax, curves: list[Curve], result: RenderResult) -> None:
    for c in curves:
        energy = c.column("energy")
        sectors = c.text_column("dominant_sector")
        palette = {s: i for i, s in enumerate(sorted(set(sectors)))}
        colors = [palette[s] for s in sectors]
        ax.scatter(np.arange(len(energy)), energy, c=colors, cmap="tab20", s=6)
        result.main.append((np.arange(len(energy)), energy))
    ax.set_xlabel("eigenstate index")
    ax.set_ylabel("E/J")


def _draw_collapse(ax, curves: list[Curve], result: RenderResult) -> None:
    check_shared(curves, ("L", "sector", "perturbation"))
    for c in curves:
        t = c.column("rescaled_time")
        s = c.column("rescaled_entropy")
        ax.plot(t, s, label=c.label())
        result.main.append((t, s))
    ax.set_xlabel("rescaled time")
    ax.set_ylabel(r"$S (V/\lambda)^2$")
    ax.legend(fontsize=8)


def _draw_coefficients(ax, curves: list[Curve], result: RenderResult) -> None:
    for c in curves:
        t = c.column("time")
        names = [n for n in c.columns if n.startswith("coeff_abs_")]
        if not names:
            raise SchemaError(f"{c.path}: no coeff_abs_* columns")
        for name in names:
            vals = c.column(name)
            ax.plot(t, vals, label=f"{name[10:]} ({c.label()})")
            result.main.append((t, vals))
    ax.set_xlabel("Jt")
    ax.set_ylabel("|coefficient|")
    ax.legend(fontsize=6)
