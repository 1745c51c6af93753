"""Figure descriptions in the same flat key=value format as the simulator."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

KINDS = ("ee_curves", "spectrum", "rescaled_inset", "collapse", "coefficients")

SPEC_KEYS = (
    "kind", "input", "out", "xscale", "yscale", "title",
    "value_exponent", "time_exponent",
)


class FigSpecError(ValueError):
    pass


@dataclass
class FigureSpec:
    kind: str = ""
    input: str = ""            # CSV glob, relative to the spec file
    out: str = "figure.png"
    xscale: str = "log"
    yscale: str = "linear"
    title: str = ""
    value_exponent: int = 2    # inset: entropy * (V/lambda)^a
    time_exponent: int = 0     # inset: time * lambda / V^k
    base_dir: Path = Path(".")


def parse_figspec(path: str | Path) -> FigureSpec:
    path = Path(path)
    spec = FigureSpec(base_dir=path.parent)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FigSpecError(f"cannot read figure spec {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FigSpecError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in SPEC_KEYS:
            raise FigSpecError(f"{path}:{lineno}: unknown key {key!r}")
        if key in ("value_exponent", "time_exponent"):
            try:
                setattr(spec, key, int(value))
            except ValueError as exc:
                raise FigSpecError(f"{path}:{lineno}: {exc}") from exc
        else:
            setattr(spec, key, value)
    if spec.kind not in KINDS:
        raise FigSpecError(f"{path}: kind must be one of {KINDS}, got {spec.kind!r}")
    if not spec.input:
        raise FigSpecError(f"{path}: input glob is required")
    for name in ("xscale", "yscale"):
        if getattr(spec, name) not in ("log", "linear"):
            raise FigSpecError(f"{path}: {name} must be log or linear")
    return spec
